#pragma once

// Fits the reference overrun model to published FOAK / 10-OAK overruns (and
// optionally the FOAK build duration) in the fixed construction-proficiency
// scenario.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "overrun/scenario.hpp"

namespace overrun {

struct CalibrationAnchors {
  double foak_overrun_per_kwe = 9500.0;   // total TCI overrun, plant 1
  double tenoak_overrun_per_kwe = 3120.0;  // total TCI overrun, plant 10
  /// Construction + startup months of the first plant including overruns.
  /// When unset, `sigma_sched` is taken from the template.
  std::optional<double> foak_duration_months = 119.0;
};

/// Fixed ratios that tie the five scale constants to the fitted unknowns:
/// construction proficiency drives rework and low productivity together, and
/// A-E proficiency and design completion share one scale.
struct CalibrationShape {
  double lambda_per_rho_c = 23.0;
  double rho_d_per_rho_ae = 1.0;
};

struct CalibrationOptions {
  CalibrationShape shape;
  int max_iterations = 100;
  double tolerance = 1e-9;  // relative, on every anchor
};

struct CalibrationReport {
  OverrunModelParams params;
  int iterations = 0;
  std::vector<double> relative_residuals;
  double foak_overrun_per_kwe = 0.0;
  double tenoak_overrun_per_kwe = 0.0;
  double foak_duration_months = 0.0;
};

namespace detail {

inline OverrunModelParams params_from_scales(const OverrunModelParams& base, const CalibrationShape& shape, double s_c,
                                             double s_d, double sigma) {
  OverrunModelParams p = base;
  p.rho_c = s_c;
  p.lambda_lp = shape.lambda_per_rho_c * s_c;
  p.rho_ae = s_d;
  p.rho_d = shape.rho_d_per_rho_ae * s_d;
  p.sigma_sched = sigma;
  return p;
}

struct AnchorOutputs {
  double foak = 0.0;
  double tenoak = 0.0;
  double foak_duration = 0.0;
};

inline AnchorOutputs evaluate_anchors(const ScenarioConfig& fixed_cp, const ResponsibilityShares& shares,
                                      const OverrunModelParams& params) {
  const ReferenceOverrunModel model{params};
  const PlantResult p1 = run_plant(fixed_cp, model, shares, 1);
  const PlantResult p10 = run_plant(fixed_cp, model, shares, 10);
  return {p1.per_kwe(p1.total_overrun()), p10.per_kwe(p10.total_overrun()),
          p1.schedule.tc0 + p1.schedule.dt_total + p1.schedule.ts};
}

}  // namespace detail

/// Damped Newton on the anchor residuals with a finite-difference Jacobian.
inline CalibrationReport calibrate_reference_model_report(const CalibrationAnchors& anchors,
                                                          const ScenarioConfig& config_template,
                                                          const CalibrationOptions& options = {}) {
  for (double a : {anchors.foak_overrun_per_kwe, anchors.tenoak_overrun_per_kwe})
    if (!std::isfinite(a) || a < 0.0) throw ConfigError("anchors", "overrun anchors must be finite and >= 0");
  if (anchors.foak_duration_months && !(*anchors.foak_duration_months > 0.0))
    throw ConfigError("anchors.foak_duration_months", "must be > 0");
  if (config_template.n_plants < 10) throw ConfigError("n_plants", "calibration needs at least 10 plants");
  if (!(options.shape.lambda_per_rho_c >= 0.0) || !(options.shape.rho_d_per_rho_ae >= 0.0))
    throw ConfigError("calibration.shape", "ratios must be >= 0");

  const ScenarioConfig fixed_cp = with_fixed_construction_proficiency(config_template);
  fixed_cp.validate();
  const auto shares = compute_responsibility_shares(fixed_cp.responsibility_matrix, fixed_cp.responsibility_position);
  const auto& base = fixed_cp.overrun_params;
  const CalibrationShape& shape = options.shape;

  CalibrationReport report;
  auto finish = [&](const OverrunModelParams& p) {
    const auto out = detail::evaluate_anchors(fixed_cp, shares, p);
    report.params = p;
    report.foak_overrun_per_kwe = out.foak;
    report.tenoak_overrun_per_kwe = out.tenoak;
    report.foak_duration_months = out.foak_duration;
    return report;
  };

  // No overruns at all: nothing drives schedule either, so sigma is left alone.
  if (anchors.foak_overrun_per_kwe == 0.0 && anchors.tenoak_overrun_per_kwe == 0.0) {
    report.relative_residuals = {0.0, 0.0};
    return finish(detail::params_from_scales(base, shape, 0.0, 0.0, base.sigma_sched));
  }

  const bool fit_sigma = anchors.foak_duration_months.has_value();
  const Eigen::Index n = fit_sigma ? 3 : 2;
  auto params_of = [&](const Eigen::VectorXd& x) {
    return detail::params_from_scales(base, shape, x[0], x[1], fit_sigma ? x[2] : base.sigma_sched);
  };
  auto residual = [&](const Eigen::VectorXd& x) {
    const auto out = detail::evaluate_anchors(fixed_cp, shares, params_of(x));
    Eigen::VectorXd r(n);
    r[0] = (out.foak - anchors.foak_overrun_per_kwe) / std::max(anchors.foak_overrun_per_kwe, 1.0);
    r[1] = (out.tenoak - anchors.tenoak_overrun_per_kwe) / std::max(anchors.tenoak_overrun_per_kwe, 1.0);
    if (fit_sigma) r[2] = (out.foak_duration - *anchors.foak_duration_months) / *anchors.foak_duration_months;
    return r;
  };

  Eigen::VectorXd x(n);
  x[0] = base.rho_c > 0.0 ? base.rho_c : 0.2;
  x[1] = base.rho_ae > 0.0 ? base.rho_ae : 0.3;
  if (fit_sigma) x[2] = base.sigma_sched > 0.0 ? base.sigma_sched : 0.2;

  Eigen::VectorXd r = residual(x);
  int it = 0;
  for (; it < options.max_iterations && r.cwiseAbs().maxCoeff() > options.tolerance; ++it) {
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x;
      const double h = 1e-6 * std::max(std::abs(x[j]), 1e-3);
      xp[j] += h;
      jac.col(j) = (residual(xp) - r) / h;
    }
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) break;

    // Backtrack until the residual norm drops; unknowns stay non-negative.
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, alpha *= 0.5) {
      const Eigen::VectorXd trial = (x + alpha * step).cwiseMax(0.0);
      const Eigen::VectorXd rt = residual(trial);
      if (rt.allFinite() && rt.norm() < (1.0 - 1e-4 * alpha) * r.norm()) {
        x = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  report.iterations = it;
  report.relative_residuals.assign(r.data(), r.data() + r.size());
  if (!(r.cwiseAbs().maxCoeff() <= options.tolerance * 1e3))
    throw CalibrationError("calibrate_reference_model: anchors not reproduced after " + std::to_string(it) +
                               " iterations",
                           report.relative_residuals);
  return finish(params_of(x));
}

inline OverrunModelParams calibrate_reference_model(const CalibrationAnchors& anchors,
                                                    const ScenarioConfig& config_template,
                                                    const CalibrationOptions& options = {}) {
  return calibrate_reference_model_report(anchors, config_template, options).params;
}

}  // namespace overrun
