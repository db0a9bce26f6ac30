#ifndef ANCHORED_DIAGNOSTICS_HPP
#define ANCHORED_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchored/algorithms.hpp"
#include "anchored/schedules.hpp"
#include "anchored/trajectory.hpp"

namespace anchored {

/// V_k = A_k ||G(z^k)||^2 + B_k <G(z^k), z^k - z_bar^k> + c_k ||z* - z_bar^k||^2
/// with A_k = alpha_k (k+1)(k+2)/2 and B_k = k+1.
template <typename Scalar>
Scalar lyapunov_eagv(const SolverState<Scalar>& state, const JointPoint<Scalar>& z_star) {
  const auto coef = eagv_schedule_at(state.k, state.alpha);
  return coef.A * state.g.squaredNorm() + coef.B * state.g.dot(state.z - state.z_bar) +
         state.c() * (z_star - state.z_bar).squaredNorm();
}

/// V_k = A_k ||G(z^k)||^2 - B_k <G(z^k), z_bar^k - z^k> + c_k ||z* - z_bar^k||^2
/// with A_k = (k^2/2)(1/R + 2 rho) - k rho and B_k = k.
template <typename Scalar>
Scalar lyapunov_feg(const SolverState<Scalar>& state, const SaddleProblem<Scalar>& problem,
                    const JointPoint<Scalar>& z_star) {
  const auto coef = feg_schedule_at(state.k, problem.smoothness(), problem.comonotonicity());
  return coef.A * state.g.squaredNorm() - coef.B * state.g.dot(state.z_bar - state.z) +
         state.c() * (z_star - state.z_bar).squaredNorm();
}

/// Uses the problem's saddle point unless one is supplied.
template <typename Scalar>
Scalar lyapunov(const SolverState<Scalar>& state, const SaddleProblem<Scalar>& problem,
                const std::optional<JointPoint<Scalar>>& z_star = std::nullopt) {
  const auto& star = z_star ? z_star : problem.saddle_point();
  if (!star) throw std::invalid_argument("lyapunov: saddle point unknown");
  return state.algorithm() == Algorithm::eagv ? lyapunov_eagv(state, *star)
                                              : lyapunov_feg(state, problem, *star);
}

// ---------------------------------------------------------------------------

struct LyapunovReport {
  bool applicable = true;
  bool ok = true;
  std::optional<Index> first_violation;
  // Largest V_{k+1} - V_k (nonincreasing check) or largest excess over the
  // V_0 + sum e_j budget (strict negative mode).
  double max_increase = 0;
};

/// Checks V_{k+1} <= V_k + 1e-8 max(1, |V_k|) for fixed, positive and
/// proximal runs. In the strict negative mode the check is
/// V_k <= V_0 + sum_{j=1..k} e_j + 1e-8 max(1, V_0). The naive negative
/// mode has no guarantee and is reported as not applicable.
inline LyapunovReport check_lyapunov_monotone(const Trajectory& trajectory, AnchorMode mode,
                                              double e_scale = 1.0) {
  LyapunovReport report;
  if (mode == AnchorMode::moving_neg_naive) {
    report.applicable = false;
    return report;
  }
  for (const auto& rec : trajectory) {
    if (!rec.lyapunov) throw std::invalid_argument("check_lyapunov_monotone: missing V_k");
  }
  if (trajectory.empty()) return report;
  report.max_increase = -std::numeric_limits<double>::infinity();

  if (mode == AnchorMode::moving_neg_strict) {
    const double v0 = *trajectory.front().lyapunov;
    const double slack = 1e-8 * std::max(1.0, v0);
    double budget = 0;
    for (const auto& rec : trajectory) {
      if (rec.k > 0) budget += e_default<double>(rec.k, e_scale);
      const double excess = *rec.lyapunov - (v0 + budget);
      report.max_increase = std::max(report.max_increase, excess);
      if (excess > slack && !report.first_violation) report.first_violation = rec.k;
    }
  } else {
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
      const double prev = *trajectory[i - 1].lyapunov;
      const double inc = *trajectory[i].lyapunov - prev;
      report.max_increase = std::max(report.max_increase, inc);
      if (inc > 1e-8 * std::max(1.0, std::abs(prev)) && !report.first_violation) {
        report.first_violation = trajectory[i].k;
      }
    }
    if (trajectory.size() == 1) report.max_increase = 0;
  }
  report.ok = !report.first_violation.has_value();
  return report;
}

// ---------------------------------------------------------------------------

enum class BoundKind { eagv_fixed, eagv_moving, feg_moving };

struct BoundConstants {
  double alpha0 = 0;
  double alpha_inf = 0;
  double c0 = 0;
  double c_inf = 0;
  double R = 0;
  double rho = 0;
  double dist0_sq = 0;  // ||z^0 - z*||^2
};

struct BoundResult {
  std::optional<double> value;
  std::optional<std::string> warning;  // set when hypotheses fail
};

/// Which bound covers a run, if any. Fixed-anchor FEG is the gamma = 0 case
/// of the moving-anchor statement; negative-gamma modes carry no stated bound.
inline std::optional<BoundKind> bound_kind_for(Algorithm algorithm, AnchorMode mode) {
  if (mode == AnchorMode::moving_neg_naive || mode == AnchorMode::moving_neg_strict) {
    return std::nullopt;
  }
  if (algorithm == Algorithm::eagv) {
    return mode == AnchorMode::fixed ? BoundKind::eagv_fixed : BoundKind::eagv_moving;
  }
  return BoundKind::feg_moving;
}

/// Hypothesis check alone; empty when the bound applies.
inline std::optional<std::string> bound_hypothesis_warning(BoundKind kind,
                                                           const BoundConstants& c) {
  switch (kind) {
    case BoundKind::eagv_fixed:
      if (!(c.alpha0 > 0 && c.alpha0 * c.R < 0.75)) {
        return "EAG-V bound needs alpha0 in (0, 3/(4R)); alpha0 R = " +
               std::to_string(c.alpha0 * c.R);
      }
      return std::nullopt;
    case BoundKind::eagv_moving:
      if (!(c.c_inf * c.alpha_inf >= 1.0)) {
        return "moving-anchor EAG-V bound needs c_inf alpha_inf >= 1; got " +
               std::to_string(c.c_inf * c.alpha_inf);
      }
      return std::nullopt;
    case BoundKind::feg_moving: {
      const double need = 1.0 / (1.0 / c.R + 2.0 * c.rho);
      if (!(c.c_inf >= need)) {
        return "FEG bound needs c_inf >= 1/(1/R + 2 rho) = " + std::to_string(need) +
               "; got c_inf = " + std::to_string(c.c_inf);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Worst-case bound on ||G(z^k)||^2:
///   eagv_fixed:  4 (1 + alpha0 alpha_inf R^2) / alpha_inf^2 * D / ((k+1)(k+2))
///   eagv_moving: 4 (alpha0 R^2 + c0) D / (alpha_inf (k+1)(k+2)),  c_inf alpha_inf >= 1
///   feg_moving:  4 c0 D / (k^2 (1/R + 2 rho)),  c_inf >= 1/(1/R + 2 rho), k >= 1
/// with D = ||z^0 - z*||^2.
inline BoundResult theoretical_bound(Index k, BoundKind kind, const BoundConstants& c) {
  if (kind == BoundKind::feg_moving && k < 1) {
    throw std::domain_error("theoretical_bound: FEG bound is defined for k >= 1");
  }
  if (k < 0) throw std::domain_error("theoretical_bound: k < 0");
  BoundResult out;
  out.warning = bound_hypothesis_warning(kind, c);
  if (out.warning) return out;
  const double kk = static_cast<double>(k);
  const double R2 = c.R * c.R;
  switch (kind) {
    case BoundKind::eagv_fixed:
      out.value = 4.0 * (1.0 + c.alpha0 * c.alpha_inf * R2) / (c.alpha_inf * c.alpha_inf) *
                  c.dist0_sq / ((kk + 1.0) * (kk + 2.0));
      break;
    case BoundKind::eagv_moving:
      out.value = 4.0 * (c.alpha0 * R2 + c.c0) * c.dist0_sq /
                  (c.alpha_inf * (kk + 1.0) * (kk + 2.0));
      break;
    case BoundKind::feg_moving:
      out.value = 4.0 * c.c0 * c.dist0_sq / (kk * kk * (1.0 / c.R + 2.0 * c.rho));
      break;
  }
  return out;
}

/// Fills the bound column; returns the hypothesis warning, if any. The FEG
/// bound is left empty at k = 0.
inline std::optional<std::string> attach_bounds(Trajectory& trajectory, BoundKind kind,
                                                const BoundConstants& consts) {
  auto warning = bound_hypothesis_warning(kind, consts);
  for (auto& rec : trajectory) {
    rec.bound.reset();
    if (warning) continue;
    if (kind == BoundKind::feg_moving && rec.k < 1) continue;
    rec.bound = theoretical_bound(rec.k, kind, consts).value;
  }
  return warning;
}

// ---------------------------------------------------------------------------

struct RateReport {
  double slope = 0;
  Index k_min = 0;
  Index k_max = 0;
  double r_squared = 0;
};

class ExactConvergence : public std::runtime_error {
 public:
  explicit ExactConvergence(Index k)
      : std::runtime_error("converged exactly: ||G||^2 = 0 at k = " + std::to_string(k)),
        k_(k) {}
  Index k() const { return k_; }

 private:
  Index k_;
};

/// Least-squares slope of log ||G(z^k)||^2 against log k over [k_min, k_max].
inline RateReport rate_slope(const Trajectory& trajectory, Index k_min, Index k_max) {
  if (k_min < 1) throw std::invalid_argument("rate_slope: k_min must be >= 1");
  if (!(k_min < k_max)) throw std::invalid_argument("rate_slope: need k_min < k_max");
  if (trajectory.empty() || trajectory.back().k < k_max) {
    throw std::invalid_argument("rate_slope: trajectory does not cover the window");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  Index count = 0;
  Index seen_max = -1;
  for (const auto& rec : trajectory) {
    if (rec.k < k_min || rec.k > k_max) continue;
    if (!(rec.grad_norm_sq > 0)) throw ExactConvergence(rec.k);
    const double x = std::log(static_cast<double>(rec.k));
    const double y = std::log(rec.grad_norm_sq);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++count;
    seen_max = std::max(seen_max, rec.k);
  }
  if (count < 2 || seen_max < k_max) {
    throw std::invalid_argument("rate_slope: trajectory does not cover the window");
  }
  const double n = static_cast<double>(count);
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double cov = sxy - sx * sy / n;
  RateReport report;
  report.k_min = k_min;
  report.k_max = k_max;
  report.slope = cov / var_x;
  report.r_squared = var_y > 0 ? std::clamp(cov * cov / (var_x * var_y), 0.0, 1.0) : 1.0;
  return report;
}

}  // namespace anchored

#endif  // ANCHORED_DIAGNOSTICS_HPP
