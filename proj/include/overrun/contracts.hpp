#pragma once

// Contract families and profit-vs-overrun curves, and the comparison between
// cause-based and recipient-based profit allocation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "overrun/types.hpp"

namespace overrun {

/// Margin falls linearly from `pm_at_zero` at no overrun to zero at
/// `zero_profit_overrun_frac` of the well-executed cost, and stays there.
struct PerformanceBased {
  double pm_at_zero = 0.16;
  double zero_profit_overrun_frac = 0.60;
  friend bool operator==(const PerformanceBased&, const PerformanceBased&) = default;
};

/// Fixed award priced with a contingency; overruns beyond it come out of profit
/// dollar for dollar.
struct FixedPrice {
  double contingency_frac = 0.30;
  double pm_at_contingency = 0.08;
  friend bool operator==(const FixedPrice&, const FixedPrice&) = default;
};

struct CostPlus {
  double pm = 0.08;
  friend bool operator==(const CostPlus&, const CostPlus&) = default;
};

using ContractTerms = std::variant<PerformanceBased, FixedPrice, CostPlus>;

inline std::string_view contract_kind(const ContractTerms& terms) {
  constexpr std::string_view kNames[] = {"performance_based", "fixed_price", "cost_plus"};
  return kNames[terms.index()];
}

inline void validate_terms(const ContractTerms& terms, const std::string& prefix = "terms") {
  auto finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(prefix + "." + name, "must be finite");
  };
  auto nonneg = [&](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(prefix + "." + name, "must be finite and >= 0");
  };
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PerformanceBased>) {
          nonneg(t.pm_at_zero, "pm_at_zero");
          nonneg(t.zero_profit_overrun_frac, "zero_profit_overrun_frac");
        } else if constexpr (std::is_same_v<T, FixedPrice>) {
          nonneg(t.contingency_frac, "contingency_frac");
          finite(t.pm_at_contingency, "pm_at_contingency");
        } else {
          finite(t.pm, "pm");
        }
      },
      terms);
}

/// Cost scope of one stakeholder: what a well-executed job would have been
/// charged, and the overruns it caused and received.
struct StakeholderScope {
  double we = 0.0;
  double or_caused = 0.0;
  double or_received = 0.0;
  friend bool operator==(const StakeholderScope&, const StakeholderScope&) = default;
};

namespace detail {

inline void require_valid_we(double we, const char* what) {
  if (!(we > 0.0) || !std::isfinite(we)) throw DomainError(std::string(what) + ": well-executed cost must be > 0");
}

inline void require_valid_overrun(double overrun, const char* what) {
  if (!(overrun >= 0.0) || !std::isfinite(overrun)) throw DomainError(std::string(what) + ": overrun must be >= 0");
}

inline double performance_margin(const PerformanceBased& t, double ratio) {
  if (t.zero_profit_overrun_frac == 0.0) return ratio > 0.0 ? 0.0 : t.pm_at_zero;
  return std::clamp(t.pm_at_zero * (1.0 - ratio / t.zero_profit_overrun_frac), 0.0, t.pm_at_zero);
}

}  // namespace detail

inline double profit(const ContractTerms& terms, double we, double overrun) {
  detail::require_valid_we(we, "profit");
  detail::require_valid_overrun(overrun, "profit");
  return std::visit(
      [&](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PerformanceBased>) {
          return detail::performance_margin(t, overrun / we) * (we + overrun);
        } else if constexpr (std::is_same_v<T, FixedPrice>) {
          const double baseline_profit = t.pm_at_contingency * we * (1.0 + t.contingency_frac);
          return baseline_profit - (overrun - t.contingency_frac * we);
        } else {
          return t.pm * (we + overrun);
        }
      },
      terms);
}

inline double margin(const ContractTerms& terms, double we, double overrun) {
  return profit(terms, we, overrun) / (we + overrun);
}

/// Profit change when the stakeholder is paid on overruns received instead of caused.
inline double allocation_delta(const ContractTerms& terms, const StakeholderScope& scope) {
  return profit(terms, scope.we, scope.or_received) - profit(terms, scope.we, scope.or_caused);
}

/// d(profit)/d(overrun). Inside the performance-based zero-profit region the
/// slope is 0; at the threshold the left derivative is returned.
inline double profit_slope(const ContractTerms& terms, double we, double overrun) {
  detail::require_valid_we(we, "profit_slope");
  detail::require_valid_overrun(overrun, "profit_slope");
  return std::visit(
      [&](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PerformanceBased>) {
          if (t.zero_profit_overrun_frac == 0.0 || overrun > t.zero_profit_overrun_frac * we) return 0.0;
          const double k = t.pm_at_zero / (t.zero_profit_overrun_frac * we);
          // pm(OR) = pm0 - k OR, profit = pm(OR) (WE + OR)
          return detail::performance_margin(t, overrun / we) - k * (we + overrun);
        } else if constexpr (std::is_same_v<T, FixedPrice>) {
          return -1.0;
        } else {
          return t.pm;
        }
      },
      terms);
}

inline bool in_zero_profit_region(const ContractTerms& terms, double we, double overrun) {
  const auto* pb = std::get_if<PerformanceBased>(&terms);
  return pb != nullptr && overrun >= pb->zero_profit_overrun_frac * we && !(overrun == 0.0 && pb->zero_profit_overrun_frac == 0.0);
}

// ---------------------------------------------------------------------------
// Curves and summaries
// ---------------------------------------------------------------------------

struct CurvePoint {
  double overrun = 0.0;
  double profit = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct ProfitCurve {
  std::vector<CurvePoint> samples;
  CurvePoint cause_point;
  CurvePoint recipient_point;
  friend bool operator==(const ProfitCurve&, const ProfitCurve&) = default;
};

/// `n` evenly spaced samples of profit over [0, or_max], with the cause-based
/// and recipient-based outcomes of `scope` marked. The scope's `we` is ignored
/// in favour of the explicit `we` argument.
inline ProfitCurve profit_curve_samples(const ContractTerms& terms, double we, double or_max, std::size_t n,
                                        const StakeholderScope& scope) {
  if (n < 2) throw DomainError("profit_curve_samples: need at least two samples");
  if (!(or_max > 0.0) || !std::isfinite(or_max)) throw DomainError("profit_curve_samples: or_max must be > 0");
  ProfitCurve curve;
  curve.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (i + 1 == n) ? or_max : or_max * static_cast<double>(i) / static_cast<double>(n - 1);
    curve.samples.push_back({x, profit(terms, we, x)});
  }
  curve.cause_point = {scope.or_caused, profit(terms, we, scope.or_caused)};
  curve.recipient_point = {scope.or_received, profit(terms, we, scope.or_received)};
  return curve;
}

/// One row of the contract-terms table. `min_margin` is -infinity when the
/// profit is unbounded below.
struct TermsSummary {
  double margin_at_0 = 0.0;
  double margin_at_30 = 0.0;
  double margin_at_60 = 0.0;
  double max_margin = 0.0;
  double min_margin = 0.0;
  friend bool operator==(const TermsSummary&, const TermsSummary&) = default;
};

inline TermsSummary summarize_terms(const ContractTerms& terms, double we = 1.0) {
  detail::require_valid_we(we, "summarize_terms");
  TermsSummary s;
  s.margin_at_0 = margin(terms, we, 0.0);
  s.margin_at_30 = margin(terms, we, 0.3 * we);
  s.margin_at_60 = margin(terms, we, 0.6 * we);
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PerformanceBased>) {
          s.max_margin = t.pm_at_zero;
          s.min_margin = 0.0;
        } else if constexpr (std::is_same_v<T, FixedPrice>) {
          s.max_margin = s.margin_at_0;
          s.min_margin = -std::numeric_limits<double>::infinity();
        } else {
          s.max_margin = t.pm;
          s.min_margin = t.pm;
        }
      },
      terms);
  return s;
}

struct LitigationFlags {
  double delta = 0.0;  // recipient-based minus cause-based profit
  int delta_sign = 0;
  bool cause_in_zero_profit_region = false;
  bool recipient_in_zero_profit_region = false;
  int slope_sign_at_recipient = 0;
  /// A recipient-based allocation leaves the stakeholder worse off than its own
  /// performance warrants, giving it grounds to pursue the actual causers.
  bool litigation_risk_against_causers = false;
  friend bool operator==(const LitigationFlags&, const LitigationFlags&) = default;
};

inline LitigationFlags litigation_flags(const ContractTerms& terms, const StakeholderScope& scope) {
  auto sign = [](double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); };
  LitigationFlags f;
  f.delta = allocation_delta(terms, scope);
  f.delta_sign = sign(f.delta, 1e-12 * (scope.we + scope.or_caused + scope.or_received));
  f.cause_in_zero_profit_region = in_zero_profit_region(terms, scope.we, scope.or_caused);
  f.recipient_in_zero_profit_region = in_zero_profit_region(terms, scope.we, scope.or_received);
  f.slope_sign_at_recipient = sign(profit_slope(terms, scope.we, scope.or_received), 0.0);
  f.litigation_risk_against_causers = f.delta_sign < 0;
  return f;
}

}  // namespace overrun
