#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "overrun/types.hpp"

namespace overrun {

inline constexpr double kMinConstructionProficiency = 0.5;
inline constexpr double kMaxConstructionProficiency = 2.0;
inline constexpr double kDefaultIndirectSubcontractorShare = 0.306;

namespace detail {

inline void require_finite_nonnegative(double v, const std::string& field) {
  if (!std::isfinite(v) || v < 0.0) throw ConfigError(field, "must be finite and >= 0");
}

inline void require_in_range(double v, double lo, double hi, const std::string& field) {
  if (!std::isfinite(v) || v < lo || v > hi)
    throw ConfigError(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace detail

/// Well-executed (no rework, full productivity) cost and schedule of one
/// two-unit plant. Money in 2024 USD.
struct BaselineCostModel {
  double plant_capacity_kwe = 0.0;
  EnumMatrix<Account, CostElement> occ0{};
  double indirect_subcontractor_share = kDefaultIndirectSubcontractorShare;
  double tc0_months = 0.0;
  double ts0_months = 0.0;

  double account_total(Account a) const { return occ0[a].sum(); }

  double total() const {
    double s = 0.0;
    for (auto a : all_values<Account>()) s += account_total(a);
    return s;
  }

  /// Accounts 2 + 3, the base for rework and low-productivity overruns.
  double direct_plus_indirect() const {
    return account_total(Account::Direct) + account_total(Account::Indirect);
  }

  double direct_site_labor() const { return occ0[Account::Direct][CostElement::SiteLabor]; }

  /// Copy with every money cell multiplied by `factor`; schedule is untouched.
  BaselineCostModel scaled(double factor) const {
    BaselineCostModel out = *this;
    for (auto& row : out.occ0)
      for (auto& cell : row) cell *= factor;
    return out;
  }

  void validate(const std::string& prefix = "baseline") const {
    if (!std::isfinite(plant_capacity_kwe) || plant_capacity_kwe <= 0.0)
      throw ConfigError(prefix + ".plant_capacity_kwe", "must be > 0");
    for (auto a : all_values<Account>())
      for (auto e : all_values<CostElement>())
        detail::require_finite_nonnegative(
            occ0[a][e], prefix + ".occ0." + std::string(to_string(a)) + "." + std::string(to_string(e)));
    detail::require_in_range(indirect_subcontractor_share, 0.0, 1.0,
                             prefix + ".indirect_subcontractor_share");
    if (!std::isfinite(tc0_months) || tc0_months <= 0.0)
      throw ConfigError(prefix + ".tc0_months", "must be > 0");
    detail::require_finite_nonnegative(ts0_months, prefix + ".ts0_months");
  }

  friend bool operator==(const BaselineCostModel&, const BaselineCostModel&) = default;
};

/// Proficiency and design-completion levers for one plant.
struct LeverState {
  double cp = kMinConstructionProficiency;  // construction proficiency, [0.5, 2.0]
  double aep = 0.0;                         // architect-engineer proficiency, [0, 1]
  double dc = 0.0;                          // design completion fraction, [0, 1]

  static LeverState full_proficiency() { return {kMaxConstructionProficiency, 1.0, 1.0}; }

  void validate(const std::string& prefix = "levers") const {
    detail::require_in_range(cp, kMinConstructionProficiency, kMaxConstructionProficiency,
                             prefix + ".cp");
    detail::require_in_range(aep, 0.0, 1.0, prefix + ".aep");
    detail::require_in_range(dc, 0.0, 1.0, prefix + ".dc");
  }

  friend bool operator==(const LeverState&, const LeverState&) = default;
};

struct LeverSchedule {
  std::vector<LeverState> per_plant;

  std::size_t size() const { return per_plant.size(); }
  const LeverState& at_plant(std::size_t plant_index) const { return per_plant.at(plant_index - 1); }

  void validate(const std::string& prefix = "lever_schedule") const {
    if (per_plant.empty()) throw ConfigError(prefix, "must contain at least one plant");
    for (std::size_t i = 0; i < per_plant.size(); ++i)
      per_plant[i].validate(prefix + "[" + std::to_string(i) + "]");
  }

  friend bool operator==(const LeverSchedule&, const LeverSchedule&) = default;
};

/// Rework multipliers; 1 means the corresponding party causes no rework.
struct ReworkFactors {
  double r_c = 1.0;
  double r_ae = 1.0;
  double r_design = 1.0;

  friend bool operator==(const ReworkFactors&, const ReworkFactors&) = default;
};

/// Constants of the reference overrun model.
struct OverrunModelParams {
  double rho_c = 0.0;        // rework factor slope per unit construction-proficiency deficit
  double rho_ae = 0.0;       // rework factor slope per unit A-E proficiency deficit
  double rho_d = 0.0;        // rework factor slope per unit design-completion deficit
  double lambda_lp = 0.0;    // scale on inverse-productivity inflation of site labor
  double sigma_sched = 0.0;  // months of delay per month of baseline construction, per unit relative overrun
  std::vector<double> scd_months_per_plant;  // supply-chain delay, months, indexed by plant

  void validate(const std::string& prefix = "overrun_params") const {
    detail::require_finite_nonnegative(rho_c, prefix + ".rho_c");
    detail::require_finite_nonnegative(rho_ae, prefix + ".rho_ae");
    detail::require_finite_nonnegative(rho_d, prefix + ".rho_d");
    detail::require_finite_nonnegative(lambda_lp, prefix + ".lambda_lp");
    detail::require_finite_nonnegative(sigma_sched, prefix + ".sigma_sched");
    for (std::size_t i = 0; i < scd_months_per_plant.size(); ++i)
      detail::require_finite_nonnegative(scd_months_per_plant[i],
                                         prefix + ".scd_months_per_plant[" + std::to_string(i) + "]");
  }

  friend bool operator==(const OverrunModelParams&, const OverrunModelParams&) = default;
};

struct ScheduleOverruns {
  double dt_rework = 0.0;
  double dt_lp = 0.0;
  double dt_scd = 0.0;

  double total() const { return dt_rework + dt_lp + dt_scd; }
  friend bool operator==(const ScheduleOverruns&, const ScheduleOverruns&) = default;
};

/// Plant-level overrun totals before attribution. Financing is computed downstream.
struct OverrunTotals {
  double dc_rework = 0.0;
  double dc_lp = 0.0;
  double dt_rework = 0.0;
  double dt_lp = 0.0;
  double dt_scd = 0.0;

  double dt_total() const { return dt_rework + dt_lp + dt_scd; }
  friend bool operator==(const OverrunTotals&, const OverrunTotals&) = default;
};

// ---------------------------------------------------------------------------
// Reference correlations
// ---------------------------------------------------------------------------

/// Site productivity (hours earned / hours planned) as an affine function of
/// construction proficiency. Evaluated in thousandths so that the lever end
/// points map to 0.7825 and 1.0 without rounding drift.
inline double productivity(double cp) {
  if (!(cp >= kMinConstructionProficiency && cp <= kMaxConstructionProficiency))
    throw DomainError("productivity: construction proficiency must lie in [0.5, 2.0]");
  return std::min((145.0 * cp + 710.0) / 1000.0, 1.0);
}

inline ReworkFactors rework_factors(const LeverState& levers, const OverrunModelParams& params) {
  levers.validate();
  const double cp_deficit =
      (kMaxConstructionProficiency - levers.cp) / (kMaxConstructionProficiency - kMinConstructionProficiency);
  return {1.0 + params.rho_c * cp_deficit, 1.0 + params.rho_ae * (1.0 - levers.aep),
          1.0 + params.rho_d * (1.0 - levers.dc)};
}

/// Multiplicative rework on Accounts 2 + 3.
inline double total_rework_cost(const ReworkFactors& f, const BaselineCostModel& baseline) {
  if (f.r_c < 1.0 || f.r_ae < 1.0 || f.r_design < 1.0)
    throw DomainError("total_rework_cost: rework factors must be >= 1");
  return baseline.direct_plus_indirect() * (f.r_c * f.r_ae * f.r_design - 1.0);
}

/// Unproductive site-labor hours priced at baseline labor cost.
inline double total_lp_cost(double cp, const BaselineCostModel& baseline, const OverrunModelParams& params) {
  return params.lambda_lp * baseline.direct_site_labor() * (1.0 / productivity(cp) - 1.0);
}

/// Schedule overruns by category. `plant_index` is 1-based.
inline ScheduleOverruns total_schedule_overruns(const ReworkFactors& f, double cp,
                                                const BaselineCostModel& baseline,
                                                const OverrunModelParams& params, std::size_t plant_index) {
  if (plant_index == 0 || plant_index > params.scd_months_per_plant.size())
    throw ConfigError("overrun_params.scd_months_per_plant",
                      "no supply-chain delay entry for plant " + std::to_string(plant_index));
  const double b23 = baseline.direct_plus_indirect();
  ScheduleOverruns out;
  if (b23 > 0.0) {
    const double months_per_unit = params.sigma_sched * baseline.tc0_months / b23;
    out.dt_rework = months_per_unit * total_rework_cost(f, baseline);
    out.dt_lp = months_per_unit * total_lp_cost(cp, baseline, params);
  }
  out.dt_scd = params.scd_months_per_plant[plant_index - 1];
  return out;
}

// ---------------------------------------------------------------------------
// Pluggable overrun model
// ---------------------------------------------------------------------------

/// Anything that maps levers to rework factors and prices the three overrun
/// categories can drive a scenario run.
template <class M>
concept OverrunModel = requires(const M& m, const LeverState& levers, const ReworkFactors& f,
                                const BaselineCostModel& b, double cp, std::size_t plant) {
  { m.rework_factors(levers) } -> std::convertible_to<ReworkFactors>;
  { m.rework_cost(f, b) } -> std::convertible_to<double>;
  { m.lp_cost(cp, b) } -> std::convertible_to<double>;
  { m.schedule_overruns(f, cp, b, plant) } -> std::convertible_to<ScheduleOverruns>;
};

struct ReferenceOverrunModel {
  OverrunModelParams params;

  ReworkFactors rework_factors(const LeverState& levers) const { return overrun::rework_factors(levers, params); }
  double rework_cost(const ReworkFactors& f, const BaselineCostModel& b) const { return total_rework_cost(f, b); }
  double lp_cost(double cp, const BaselineCostModel& b) const { return total_lp_cost(cp, b, params); }
  ScheduleOverruns schedule_overruns(const ReworkFactors& f, double cp, const BaselineCostModel& b,
                                     std::size_t plant_index) const {
    return total_schedule_overruns(f, cp, b, params, plant_index);
  }
};

static_assert(OverrunModel<ReferenceOverrunModel>);

/// Evaluates the three categories for one plant.
template <OverrunModel Model>
OverrunTotals evaluate_overruns(const Model& model, const LeverState& levers, const BaselineCostModel& baseline,
                                std::size_t plant_index) {
  const ReworkFactors f = model.rework_factors(levers);
  const ScheduleOverruns dt = model.schedule_overruns(f, levers.cp, baseline, plant_index);
  return {model.rework_cost(f, baseline), model.lp_cost(levers.cp, baseline), dt.dt_rework, dt.dt_lp, dt.dt_scd};
}

}  // namespace overrun
