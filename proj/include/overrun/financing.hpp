#pragma once

// Interest during construction and startup on a sinusoidal spend curve, the
// financing overrun, its split among causers and the inverse problem of
// recovering the rate from a financing-cost target.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "overrun/types.hpp"

namespace overrun {

struct FinancingParams {
  double rate = 0.04;            // annual
  double time_step_months = 1.0;

  void validate(const std::string& prefix = "financing") const {
    if (!std::isfinite(rate) || rate < 0.0) throw ConfigError(prefix + ".rate", "must be finite and >= 0");
    if (!std::isfinite(time_step_months) || time_step_months <= 0.0)
      throw ConfigError(prefix + ".time_step_months", "must be > 0");
  }

  friend bool operator==(const FinancingParams&, const FinancingParams&) = default;
};

struct ScheduleState {
  double tc = 0.0;  // construction, months
  double ts = 0.0;  // startup, months

  friend bool operator==(const ScheduleState&, const ScheduleState&) = default;
};

/// Cumulative fraction of OCC spent by month `t` of a `tc`-month build.
inline double spend_fraction(double t, double tc) {
  if (!(tc > 0.0)) throw DomainError("spend_fraction: construction duration must be > 0");
  if (!(t >= 0.0 && t <= tc)) throw DomainError("spend_fraction: t must lie in [0, tc]");
  if (t == tc) return 1.0;
  if (t == 0.0) return 0.0;
  return 0.5 * (1.0 + std::sin(std::numbers::pi / tc * (t - tc / 2.0)));
}

/// Interest during construction plus interest during startup.
///
/// Construction is cut into steps of `time_step_months` (the last one may be
/// shorter); the OCC spent in a step is booked at the step end and compounds
/// annually-quoted interest for the remaining (tc - t) / 12 years. Startup
/// adds no spend and compounds the whole balance for ts / 12 years.
inline double financing_cost(double occ, const ScheduleState& schedule, const FinancingParams& params) {
  if (!(occ >= 0.0)) throw DomainError("financing_cost: occ must be >= 0");
  if (!(schedule.tc > 0.0)) throw DomainError("financing_cost: construction duration must be > 0");
  if (!(schedule.ts >= 0.0)) throw DomainError("financing_cost: startup duration must be >= 0");
  const double h = params.time_step_months;
  if (!(h > 0.0)) throw DomainError("financing_cost: time step must be > 0");
  const double growth = 1.0 + params.rate;
  if (params.rate == 0.0 || occ == 0.0) return 0.0;

  const double tc = schedule.tc;
  // Steps shorter than this are merged into the previous one.
  const double merge_tol = 1e-9 * h;
  double idc_fraction = 0.0;
  double prev_f = 0.0;
  for (std::int64_t k = 1;; ++k) {
    double t = static_cast<double>(k) * h;
    const bool last = t >= tc - merge_tol;
    if (last) t = tc;
    const double f = spend_fraction(t, tc);
    idc_fraction += (f - prev_f) * std::expm1(std::log(growth) * (tc - t) / 12.0);
    prev_f = f;
    if (last) break;
  }
  const double idc = occ * idc_fraction;
  const double ids = (occ + idc) * std::expm1(std::log(growth) * schedule.ts / 12.0);
  return idc + ids;
}

/// Rate in [0, 1] at which `financing_cost(occ, schedule, rate)` equals `cfin_target`.
inline double back_calculate_rate(double occ, double cfin_target, const ScheduleState& schedule,
                                  double time_step_months = 1.0) {
  if (!(cfin_target >= 0.0)) throw DomainError("back_calculate_rate: target must be >= 0");
  if (cfin_target == 0.0) return 0.0;
  auto residual = [&](double r) { return financing_cost(occ, schedule, {r, time_step_months}) - cfin_target; };
  constexpr double kMaxRate = 1.0;
  if (residual(kMaxRate) < 0.0) throw SolverError("back_calculate_rate: target unreachable for rates in [0, 1]");

  std::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, kMaxRate, -cfin_target, residual(kMaxRate),
                                                          boost::math::tools::eps_tolerance<double>(50), max_iter);
  if (max_iter >= 200) throw SolverError("back_calculate_rate: root finder did not converge");
  return 0.5 * (lo + hi);
}

/// Financing with all overruns on minus financing of the well-executed plant.
inline double financing_overrun_total(double occ, const ScheduleState& schedule, double occ0,
                                      const ScheduleState& schedule0, const FinancingParams& params) {
  return financing_cost(occ, schedule, params) - financing_cost(occ0, schedule0, params);
}

/// Overrun caused by one stakeholder: extra OCC and extra construction months.
struct StakeholderDelta {
  double occ = 0.0;
  double months = 0.0;

  friend bool operator==(const StakeholderDelta&, const StakeholderDelta&) = default;
};

/// Shares `total_overrun` among stakeholders in proportion to the financing
/// overrun each would produce alone, with their delays spread uniformly over
/// construction (i.e. simply lengthening it).
inline StakeholderValues attribute_financing_causers(double occ0, const ScheduleState& t0,
                                                     const EnumArray<Stakeholder, StakeholderDelta>& per_stakeholder,
                                                     double total_overrun, const FinancingParams& params) {
  if (!(total_overrun >= 0.0)) throw DomainError("attribute_financing_causers: total must be >= 0");
  if (total_overrun == 0.0) return {};
  const double base = financing_cost(occ0, t0, params);
  StakeholderValues alone;
  for (auto s : all_values<Stakeholder>()) {
    const auto& d = per_stakeholder[s];
    if (!(d.occ >= 0.0 && d.months >= 0.0))
      throw DomainError("attribute_financing_causers: stakeholder deltas must be >= 0");
    if (d.occ == 0.0 && d.months == 0.0) continue;
    alone[s] = std::max(financing_cost(occ0 + d.occ, {t0.tc + d.months, t0.ts}, params) - base, 0.0);
  }
  if (!(alone.sum() > 0.0))
    throw InconsistencyError("attribute_financing_causers: positive financing overrun but no stakeholder causes one");

  return detail::split_proportionally(total_overrun, alone, "attribute_financing_causers");
}

}  // namespace overrun
