#pragma once

// Deployment-series runner: levers -> overruns -> two-sided attribution ->
// financing -> contract outcomes, one plant at a time.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "overrun/attribution.hpp"
#include "overrun/contracts.hpp"
#include "overrun/cost_model.hpp"
#include "overrun/financing.hpp"
#include "overrun/types.hpp"

namespace overrun {

struct ContractAssignment {
  Stakeholder stakeholder = Stakeholder::EquipmentSuppliers;
  ContractTerms terms;
  friend bool operator==(const ContractAssignment&, const ContractAssignment&) = default;
};

struct ScenarioConfig {
  std::string scenario_name;
  std::size_t n_plants = 0;
  BaselineCostModel baseline;  // first plant of the series
  /// Multiplier on baseline money for each plant (learning-by-doing, bulk
  /// ordering and the like). Empty means no baseline learning.
  std::vector<double> baseline_learning;
  LeverSchedule lever_schedule;
  OverrunModelParams overrun_params;
  FinancingParams financing;
  std::vector<ContractAssignment> contracts;
  ResponsibilityMatrix responsibility_matrix = default_responsibility_matrix();
  StakeholderValues responsibility_position = midpoint_position();

  double learning_factor(std::size_t plant_index) const {
    return baseline_learning.empty() ? 1.0 : baseline_learning.at(plant_index - 1);
  }

  BaselineCostModel baseline_for_plant(std::size_t plant_index) const {
    return baseline.scaled(learning_factor(plant_index));
  }

  void validate() const {
    if (n_plants == 0) throw ConfigError("n_plants", "must be >= 1");
    baseline.validate("baseline");
    if (!baseline_learning.empty()) {
      if (baseline_learning.size() != n_plants)
        throw ConfigError("baseline_learning", "needs exactly n_plants entries (" + std::to_string(n_plants) + ")");
      for (std::size_t i = 0; i < baseline_learning.size(); ++i)
        if (!std::isfinite(baseline_learning[i]) || baseline_learning[i] <= 0.0)
          throw ConfigError("baseline_learning[" + std::to_string(i) + "]", "must be > 0");
    }
    lever_schedule.validate("lever_schedule");
    if (lever_schedule.size() != n_plants)
      throw ConfigError("lever_schedule", "needs exactly n_plants entries (" + std::to_string(n_plants) + ")");
    overrun_params.validate("overrun_params");
    if (overrun_params.scd_months_per_plant.size() < n_plants)
      throw ConfigError("overrun_params.scd_months_per_plant",
                        "needs at least n_plants entries (" + std::to_string(n_plants) + ")");
    financing.validate("financing");
    for (std::size_t i = 0; i < contracts.size(); ++i) {
      const std::string field = "contracts[" + std::to_string(i) + "]";
      if (contracts[i].stakeholder == Stakeholder::Creditors)
        throw ConfigError(field + ".stakeholder", "creditors have no contract scope");
      validate_terms(contracts[i].terms, field + ".terms");
    }
    responsibility_matrix.validate("responsibility_matrix");
    for (auto s : kNonCreditors) {
      const double p = responsibility_position[s];
      if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("responsibility_position." + std::string(to_string(s)), "must lie in [0, 1]");
    }
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Same scenario with construction proficiency pinned at its minimum for every plant.
inline ScenarioConfig with_fixed_construction_proficiency(ScenarioConfig config) {
  for (auto& l : config.lever_schedule.per_plant) l.cp = kMinConstructionProficiency;
  return config;
}

struct PlantSchedule {
  double tc0 = 0.0;
  double dt_total = 0.0;
  double ts = 0.0;
  friend bool operator==(const PlantSchedule&, const PlantSchedule&) = default;
};

struct ContractOutcome {
  Stakeholder stakeholder = Stakeholder::EquipmentSuppliers;
  ContractTerms terms;
  StakeholderScope scope;
  double profit_cause = 0.0;
  double profit_recipient = 0.0;
  double delta = 0.0;
  LitigationFlags flags;
  friend bool operator==(const ContractOutcome&, const ContractOutcome&) = default;
};

struct PlantResult {
  std::size_t plant_index = 0;  // 1-based
  double plant_capacity_kwe = 0.0;
  double baseline_occ = 0.0;
  double baseline_financing = 0.0;
  double baseline_tci = 0.0;
  StakeholderValues baseline_scope;  // well-executed cost billed by each stakeholder
  LeverState levers;
  ReworkFactors rework_factors;
  OverrunTotals overrun_totals;
  double financing_overrun = 0.0;
  AttributionResult attribution;
  PlantSchedule schedule;
  std::vector<ContractOutcome> contract_outcomes;

  double occ_overrun() const { return overrun_totals.dc_rework + overrun_totals.dc_lp; }
  double total_overrun() const { return occ_overrun() + financing_overrun; }
  double occ() const { return baseline_occ + occ_overrun(); }
  double tci() const { return baseline_tci + total_overrun(); }
  double per_kwe(double usd) const { return usd / plant_capacity_kwe; }

  EnumArray<CostOverrunType> cost_type_totals() const {
    EnumArray<CostOverrunType> t;
    t[CostOverrunType::Rework] = overrun_totals.dc_rework;
    t[CostOverrunType::LowProductivity] = overrun_totals.dc_lp;
    t[CostOverrunType::Financing] = financing_overrun;
    return t;
  }

  friend bool operator==(const PlantResult&, const PlantResult&) = default;
};

/// Evaluates one plant of the series with an arbitrary overrun model.
template <OverrunModel Model>
PlantResult run_plant(const ScenarioConfig& config, const Model& model, const ResponsibilityShares& shares,
                      std::size_t plant_index) {
  using S = Stakeholder;
  using T = CostOverrunType;

  PlantResult r;
  r.plant_index = plant_index;
  const BaselineCostModel baseline = config.baseline_for_plant(plant_index);
  r.plant_capacity_kwe = baseline.plant_capacity_kwe;
  r.levers = config.lever_schedule.at_plant(plant_index);

  const ScheduleState t0{baseline.tc0_months, baseline.ts0_months};
  r.baseline_occ = baseline.total();
  r.baseline_financing = financing_cost(r.baseline_occ, t0, config.financing);
  r.baseline_tci = r.baseline_occ + r.baseline_financing;
  r.baseline_scope = baseline_scope_by_recipient(baseline);

  r.rework_factors = model.rework_factors(r.levers);
  r.overrun_totals = evaluate_overruns(model, r.levers, baseline, plant_index);
  const auto& tot = r.overrun_totals;
  auto rework_fn = [&](const ReworkFactors& f) { return model.rework_cost(f, baseline); };

  // Causers of OCC and schedule overruns.
  const auto rework_by = attribute_rework_causers(tot.dc_rework, r.rework_factors, rework_fn);
  const auto lp_by = attribute_lp_causers(tot.dc_lp, shares);
  auto& ledger = r.attribution;
  ledger.schedule_by_causer_and_type = attribute_schedule_causers(
      ScheduleOverruns{tot.dt_rework, tot.dt_lp, tot.dt_scd}, r.rework_factors, shares, rework_fn);

  EnumArray<S, StakeholderDelta> deltas;
  for (auto s : all_values<S>()) {
    ledger.cost_by_causer_and_type[s][T::Rework] = rework_by[s];
    ledger.cost_by_causer_and_type[s][T::LowProductivity] = lp_by[s];
    deltas[s] = {rework_by[s] + lp_by[s], ledger.schedule_caused_by(s)};
  }

  // Financing overrun and its causers.
  r.schedule = {t0.tc, tot.dt_total(), t0.ts};
  const ScheduleState actual{t0.tc + tot.dt_total(), t0.ts};
  r.financing_overrun =
      std::max(financing_overrun_total(r.occ(), actual, r.baseline_occ, t0, config.financing), 0.0);
  const auto fin_by = attribute_financing_causers(r.baseline_occ, t0, deltas, r.financing_overrun, config.financing);
  for (auto s : all_values<S>()) ledger.cost_by_causer_and_type[s][T::Financing] = fin_by[s];

  // Recipients.
  EnumArray<T> by_type;
  by_type[T::Rework] = tot.dc_rework;
  by_type[T::LowProductivity] = tot.dc_lp;
  ledger.cost_by_type_and_recipient = attribute_recipients(by_type, baseline, r.financing_overrun);

  // Contracts.
  for (std::size_t i = 0; i < config.contracts.size(); ++i) {
    const auto& c = config.contracts[i];
    ContractOutcome o;
    o.stakeholder = c.stakeholder;
    o.terms = c.terms;
    o.scope = {r.baseline_scope[c.stakeholder], ledger.caused_by(c.stakeholder), ledger.received_by(c.stakeholder)};
    if (!(o.scope.we > 0.0))
      throw ConfigError("contracts[" + std::to_string(i) + "].stakeholder", "stakeholder has no baseline cost scope");
    o.profit_cause = profit(c.terms, o.scope.we, o.scope.or_caused);
    o.profit_recipient = profit(c.terms, o.scope.we, o.scope.or_received);
    o.delta = o.profit_recipient - o.profit_cause;
    o.flags = litigation_flags(c.terms, o.scope);
    r.contract_outcomes.push_back(std::move(o));
  }
  return r;
}

template <OverrunModel Model>
std::vector<PlantResult> run_scenario(const ScenarioConfig& config, const Model& model) {
  config.validate();
  const auto shares = compute_responsibility_shares(config.responsibility_matrix, config.responsibility_position);
  std::vector<PlantResult> out;
  out.reserve(config.n_plants);
  for (std::size_t i = 1; i <= config.n_plants; ++i) out.push_back(run_plant(config, model, shares, i));
  return out;
}

inline std::vector<PlantResult> run_scenario(const ScenarioConfig& config) {
  return run_scenario(config, ReferenceOverrunModel{config.overrun_params});
}

// ---------------------------------------------------------------------------
// Aggregation and Sankey projection
// ---------------------------------------------------------------------------

struct AggregateResult {
  std::size_t n_plants = 0;
  AttributionResult attribution;
  EnumArray<CostOverrunType> cost_type_totals;
  EnumArray<ScheduleOverrunType> schedule_type_totals;
  friend bool operator==(const AggregateResult&, const AggregateResult&) = default;
};

inline AggregateResult aggregate(const std::vector<PlantResult>& results) {
  if (results.empty()) throw DomainError("aggregate: no plant results");
  AggregateResult agg;
  agg.n_plants = results.size();
  auto& a = agg.attribution;
  for (const auto& r : results) {
    for (auto s : all_values<Stakeholder>()) {
      for (auto t : all_values<CostOverrunType>()) {
        a.cost_by_causer_and_type[s][t] += r.attribution.cost_by_causer_and_type[s][t];
        a.cost_by_type_and_recipient[t][s] += r.attribution.cost_by_type_and_recipient[t][s];
      }
      for (auto t : all_values<ScheduleOverrunType>())
        a.schedule_by_causer_and_type[s][t] += r.attribution.schedule_by_causer_and_type[s][t];
    }
    const auto ct = r.cost_type_totals();
    for (auto t : all_values<CostOverrunType>()) agg.cost_type_totals[t] += ct[t];
    agg.schedule_type_totals[ScheduleOverrunType::Rework] += r.overrun_totals.dt_rework;
    agg.schedule_type_totals[ScheduleOverrunType::LowProductivity] += r.overrun_totals.dt_lp;
    agg.schedule_type_totals[ScheduleOverrunType::SupplyChainDelay] += r.overrun_totals.dt_scd;
  }
  return agg;
}

struct SankeyLink {
  std::string source;
  std::string target;
  double value = 0.0;
  friend bool operator==(const SankeyLink&, const SankeyLink&) = default;
};

/// Causer -> overrun type -> recipient.
struct SankeyFlows {
  EnumMatrix<Stakeholder, CostOverrunType> causer_to_type{};
  EnumMatrix<CostOverrunType, Stakeholder> type_to_recipient{};

  static std::string causer_node(Stakeholder s) { return "causer:" + std::string(to_string(s)); }
  static std::string type_node(CostOverrunType t) { return "type:" + std::string(to_string(t)); }
  static std::string recipient_node(Stakeholder s) { return "recipient:" + std::string(to_string(s)); }

  /// Non-zero links, left layer first.
  std::vector<SankeyLink> links() const {
    std::vector<SankeyLink> out;
    for (auto s : all_values<Stakeholder>())
      for (auto t : all_values<CostOverrunType>())
        if (causer_to_type[s][t] != 0.0) out.push_back({causer_node(s), type_node(t), causer_to_type[s][t]});
    for (auto t : all_values<CostOverrunType>())
      for (auto s : all_values<Stakeholder>())
        if (type_to_recipient[t][s] != 0.0) out.push_back({type_node(t), recipient_node(s), type_to_recipient[t][s]});
    return out;
  }

  /// Largest relative inflow/outflow mismatch over the type nodes.
  double node_balance_error() const {
    const auto in = column_sums(causer_to_type);
    double worst = 0.0;
    for (auto t : all_values<CostOverrunType>()) {
      const double out = type_to_recipient[t].sum();
      const double scale = std::max(std::abs(in[t]), std::abs(out));
      if (scale > 0.0) worst = std::max(worst, std::abs(in[t] - out) / scale);
    }
    return worst;
  }

  friend bool operator==(const SankeyFlows&, const SankeyFlows&) = default;
};

inline SankeyFlows sankey_flows(const PlantResult& result) {
  return {result.attribution.cost_by_causer_and_type, result.attribution.cost_by_type_and_recipient};
}

}  // namespace overrun
