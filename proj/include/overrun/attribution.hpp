#pragma once

// Two-sided overrun ledger: who caused each overrun dollar (and month) and who
// was paid for it.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "overrun/cost_model.hpp"
#include "overrun/types.hpp"

namespace overrun {

// ---------------------------------------------------------------------------
// Low-productivity responsibility
// ---------------------------------------------------------------------------

struct ResponsibilityCategory {
  std::string name;
  double hours_per_week = 0.0;
  EnumArray<Stakeholder, bool> capable{};  // Creditors are never capable

  friend bool operator==(const ResponsibilityCategory&, const ResponsibilityCategory&) = default;
};

/// Sources of unproductive hours and the stakeholders that could have caused each.
struct ResponsibilityMatrix {
  std::vector<ResponsibilityCategory> categories;

  double total_hours() const {
    double s = 0.0;
    for (const auto& c : categories) s += c.hours_per_week;
    return s;
  }

  void validate(const std::string& prefix = "responsibility_matrix") const {
    if (categories.empty()) throw ConfigError(prefix + ".categories", "must not be empty");
    for (std::size_t i = 0; i < categories.size(); ++i) {
      const auto& c = categories[i];
      const std::string field = prefix + ".categories[" + std::to_string(i) + "]";
      detail::require_finite_nonnegative(c.hours_per_week, field + ".hours_per_week");
      if (c.capable[Stakeholder::Creditors]) throw ConfigError(field + ".capable", "creditors cannot cause lost productivity");
      if (std::none_of(kNonCreditors.begin(), kNonCreditors.end(), [&](Stakeholder s) { return c.capable[s]; }))
        throw ConfigError(field + ".capable", "needs at least one capable stakeholder");
    }
    if (!(total_hours() > 0.0)) throw ConfigError(prefix + ".categories", "total hours must be > 0");
  }

  friend bool operator==(const ResponsibilityMatrix&, const ResponsibilityMatrix&) = default;
};

/// The survey of unproductive weekly hours on U.S. nuclear sites with the
/// possible-causer matrix used by default.
inline ResponsibilityMatrix default_responsibility_matrix() {
  using S = Stakeholder;
  auto caps = [](bool cs, bool dm, bool es) {
    EnumArray<S, bool> c{};
    c[S::ConstructionSubcontractors] = cs;
    c[S::DesignAndManagement] = dm;
    c[S::EquipmentSuppliers] = es;
    return c;
  };
  return {{
      {"Material Availability", 6.80, caps(true, true, true)},
      {"Tool Availability", 4.28, caps(true, false, false)},
      {"Crew Interfacing", 3.54, caps(true, true, false)},
      {"Overcrowded Work Areas", 4.62, caps(false, true, false)},
      {"Instructions Time", 2.27, caps(true, false, false)},
      {"Inspection Delays", 2.61, caps(false, true, false)},
  }};
}

/// Position within [min, max] used for each stakeholder; 0.5 is the midpoint.
inline StakeholderValues midpoint_position() {
  StakeholderValues p;
  for (auto s : kNonCreditors) p[s] = 0.5;
  return p;
}

struct ResponsibilityShares {
  StakeholderValues min;
  StakeholderValues max;
  StakeholderValues midpoint;             // min + position * (max - min)
  StakeholderValues normalized_midpoint;  // midpoint / sum of midpoints

  friend bool operator==(const ResponsibilityShares&, const ResponsibilityShares&) = default;
};

inline ResponsibilityShares compute_responsibility_shares(const ResponsibilityMatrix& matrix,
                                                          const StakeholderValues& position = midpoint_position()) {
  const double total = matrix.total_hours();
  if (!(total > 0.0)) throw DomainError("compute_responsibility_shares: total hours must be > 0");

  ResponsibilityShares out;
  for (const auto& c : matrix.categories) {
    const auto n_capable =
        std::count_if(kNonCreditors.begin(), kNonCreditors.end(), [&](Stakeholder s) { return c.capable[s]; });
    for (auto s : kNonCreditors) {
      if (!c.capable[s]) continue;
      out.max[s] += c.hours_per_week;
      if (n_capable == 1) out.min[s] += c.hours_per_week;
    }
  }
  double mid_sum = 0.0;
  for (auto s : kNonCreditors) {
    if (!(position[s] >= 0.0 && position[s] <= 1.0))
      throw DomainError("compute_responsibility_shares: position must lie in [0, 1]");
    out.min[s] /= total;
    out.max[s] /= total;
    out.midpoint[s] = out.min[s] + position[s] * (out.max[s] - out.min[s]);
    mid_sum += out.midpoint[s];
  }
  if (!(mid_sum > 0.0)) throw DomainError("compute_responsibility_shares: all responsibility points are zero");
  for (auto s : kNonCreditors) out.normalized_midpoint[s] = out.midpoint[s] / mid_sum;
  return out;
}

// ---------------------------------------------------------------------------
// Causer attribution
// ---------------------------------------------------------------------------

namespace detail {

inline void require_nonnegative_total(double total, const char* what) {
  if (!(total >= 0.0) || !std::isfinite(total)) throw DomainError(std::string(what) + ": total must be finite and >= 0");
}

}  // namespace detail

/// Splits a rework total (dollars or months) by evaluating `rework_cost` with
/// only one factor active at a time. The construction term goes to the
/// Construction Subcontractors; the A-E and design terms go to Design & Management.
template <class ReworkCostFn>
StakeholderValues attribute_rework_causers(double total, const ReworkFactors& f, const ReworkCostFn& rework_cost) {
  detail::require_nonnegative_total(total, "attribute_rework_causers");
  if (total == 0.0) return {};
  const double c = rework_cost(ReworkFactors{f.r_c, 1.0, 1.0});
  const double ae = rework_cost(ReworkFactors{1.0, f.r_ae, 1.0});
  const double design = rework_cost(ReworkFactors{1.0, 1.0, f.r_design});
  StakeholderValues weights;
  weights[Stakeholder::ConstructionSubcontractors] = c;
  weights[Stakeholder::DesignAndManagement] = ae + design;
  return detail::split_proportionally(total, weights, "attribute_rework_causers");
}

inline StakeholderValues attribute_rework_causers(double total, const ReworkFactors& f,
                                                  const BaselineCostModel& baseline) {
  return attribute_rework_causers(total, f, [&](const ReworkFactors& g) { return total_rework_cost(g, baseline); });
}

inline StakeholderValues attribute_lp_causers(double total, const ResponsibilityShares& shares) {
  detail::require_nonnegative_total(total, "attribute_lp_causers");
  return detail::split_proportionally(total, shares.normalized_midpoint, "attribute_lp_causers");
}

template <class ReworkCostFn>
EnumMatrix<Stakeholder, ScheduleOverrunType> attribute_schedule_causers(const ScheduleOverruns& totals,
                                                                        const ReworkFactors& f,
                                                                        const ResponsibilityShares& shares,
                                                                        const ReworkCostFn& rework_cost) {
  detail::require_nonnegative_total(totals.dt_scd, "attribute_schedule_causers");
  const auto rework = attribute_rework_causers(totals.dt_rework, f, rework_cost);
  const auto lp = attribute_lp_causers(totals.dt_lp, shares);
  EnumMatrix<Stakeholder, ScheduleOverrunType> out;
  for (auto s : all_values<Stakeholder>()) {
    out[s][ScheduleOverrunType::Rework] = rework[s];
    out[s][ScheduleOverrunType::LowProductivity] = lp[s];
  }
  out[Stakeholder::EquipmentSuppliers][ScheduleOverrunType::SupplyChainDelay] = totals.dt_scd;
  return out;
}

inline EnumMatrix<Stakeholder, ScheduleOverrunType> attribute_schedule_causers(const ScheduleOverruns& totals,
                                                                               const ReworkFactors& f,
                                                                               const ResponsibilityShares& shares,
                                                                               const BaselineCostModel& baseline) {
  return attribute_schedule_causers(totals, f, shares,
                                    [&](const ReworkFactors& g) { return total_rework_cost(g, baseline); });
}

// ---------------------------------------------------------------------------
// Recipient attribution
// ---------------------------------------------------------------------------

/// Baseline (well-executed) cost of Accounts 2 + 3 received by each stakeholder.
/// Accounts 1 and 5 are owner's costs and are not paid to any stakeholder here.
inline StakeholderValues baseline_scope_by_recipient(const BaselineCostModel& b) {
  using S = Stakeholder;
  using E = CostElement;
  const auto& direct = b.occ0[Account::Direct];
  const double indirect = b.account_total(Account::Indirect);
  StakeholderValues out;
  out[S::EquipmentSuppliers] = direct[E::FactoryEquipment];
  out[S::ConstructionSubcontractors] =
      direct[E::SiteMaterial] + direct[E::SiteLabor] + b.indirect_subcontractor_share * indirect;
  out[S::DesignAndManagement] = (1.0 - b.indirect_subcontractor_share) * indirect;
  return out;
}

/// Routes each overrun type to the stakeholders who bill it. Non-financing
/// overruns follow the baseline Account 2 : Account 3 proportions; direct rework
/// follows the Account 2 element mix while direct low-productivity overrun is
/// site labor. Financing goes to the Creditors.
inline EnumMatrix<CostOverrunType, Stakeholder> attribute_recipients(const EnumArray<CostOverrunType>& overrun_by_type,
                                                                     const BaselineCostModel& b,
                                                                     double financing_overrun) {
  using S = Stakeholder;
  using E = CostElement;
  using T = CostOverrunType;
  detail::require_nonnegative_total(financing_overrun, "attribute_recipients");

  const double a2 = b.account_total(Account::Direct);
  const double a3 = b.account_total(Account::Indirect);
  const double s_cs = b.indirect_subcontractor_share;

  EnumMatrix<T, S> out;
  for (auto t : {T::Rework, T::LowProductivity}) {
    const double amount = overrun_by_type[t];
    detail::require_nonnegative_total(amount, "attribute_recipients");
    if (amount == 0.0) continue;
    if (!(a2 + a3 > 0.0)) throw InconsistencyError("attribute_recipients: overrun with empty Accounts 2 and 3");
    const double direct = amount * (a2 / (a2 + a3));
    const double indirect = amount - direct;
    auto& row = out[t];
    if (t == T::LowProductivity) {
      row[S::ConstructionSubcontractors] += direct;
    } else if (direct > 0.0) {
      const double factory = direct * (b.occ0[Account::Direct][E::FactoryEquipment] / a2);
      row[S::EquipmentSuppliers] += factory;
      row[S::ConstructionSubcontractors] += direct - factory;
    }
    const double indirect_cs = indirect * s_cs;
    row[S::ConstructionSubcontractors] += indirect_cs;
    row[S::DesignAndManagement] += indirect - indirect_cs;
  }
  out[T::Financing][S::Creditors] = financing_overrun;
  return out;
}

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

struct AttributionResult {
  EnumMatrix<Stakeholder, CostOverrunType> cost_by_causer_and_type{};
  EnumMatrix<CostOverrunType, Stakeholder> cost_by_type_and_recipient{};
  EnumMatrix<Stakeholder, ScheduleOverrunType> schedule_by_causer_and_type{};

  double caused_by(Stakeholder s) const { return cost_by_causer_and_type[s].sum(); }

  double received_by(Stakeholder s) const {
    double v = 0.0;
    for (auto t : all_values<CostOverrunType>()) v += cost_by_type_and_recipient[t][s];
    return v;
  }

  double schedule_caused_by(Stakeholder s) const { return schedule_by_causer_and_type[s].sum(); }

  EnumArray<CostOverrunType> causer_type_totals() const { return column_sums(cost_by_causer_and_type); }

  EnumArray<CostOverrunType> recipient_type_totals() const {
    EnumArray<CostOverrunType> out;
    for (auto t : all_values<CostOverrunType>()) out[t] = cost_by_type_and_recipient[t].sum();
    return out;
  }

  double total_cost() const { return causer_type_totals().sum(); }

  friend bool operator==(const AttributionResult&, const AttributionResult&) = default;
};

/// Largest relative mismatch between causer sums, recipient sums and `type_totals`.
inline double conservation_error(const AttributionResult& r, const EnumArray<CostOverrunType>& type_totals) {
  const auto caused = r.causer_type_totals();
  const auto received = r.recipient_type_totals();
  double worst = 0.0;
  for (auto t : all_values<CostOverrunType>()) {
    const double scale = std::max({std::abs(type_totals[t]), std::abs(caused[t]), std::abs(received[t])});
    if (scale == 0.0) continue;
    worst = std::max({worst, std::abs(caused[t] - type_totals[t]) / scale, std::abs(received[t] - type_totals[t]) / scale});
  }
  return worst;
}

}  // namespace overrun
