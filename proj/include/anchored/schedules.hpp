#ifndef ANCHORED_SCHEDULES_HPP
#define ANCHORED_SCHEDULES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "anchored/types.hpp"

namespace anchored {

// ---------------------------------------------------------------------------
// EAG-V step sizes and Lyapunov coefficients (beta_k = 1/(k+2)).

/// alpha_{k+1} = alpha_k (1 - a / ((k+1)(k+3)(1 - a))),  a = alpha_k^2 R^2.
template <typename Scalar>
Scalar eagv_alpha_next(Scalar alpha, Index k, Scalar R) {
  const Scalar a = alpha * alpha * R * R;
  if (!(alpha > Scalar(0)) || !(alpha * R < Scalar(1))) {
    throw std::domain_error("eagv_alpha_next: need 0 < alpha R < 1 (alpha R = " +
                            std::to_string(double(alpha * R)) + ")");
  }
  const Scalar kk = Scalar(k);
  return alpha * (Scalar(1) - a / ((kk + Scalar(1)) * (kk + Scalar(3)) * (Scalar(1) - a)));
}

template <typename Scalar>
struct EagvCoefficients {
  Scalar beta;
  Scalar B;
  Scalar A;
};

template <typename Scalar>
EagvCoefficients<Scalar> eagv_schedule_at(Index k, Scalar alpha) {
  if (k < 0) throw std::invalid_argument("eagv_schedule_at: k < 0");
  const Scalar kk = Scalar(k);
  return {Scalar(1) / (kk + Scalar(2)), kk + Scalar(1),
          alpha * (kk + Scalar(1)) * (kk + Scalar(2)) / Scalar(2)};
}

template <typename Scalar>
struct AlphaLimit {
  Scalar value;       // alpha_inf, tail-corrected
  Scalar last;        // alpha_K at the stopping index
  Index stopped_at;   // K: first index with |alpha_{K+1} - alpha_K| < tol
};

/// Limit of the EAG-V step-size sequence.
///
/// The recurrence is iterated until one step changes alpha by less than
/// `tol`. The remaining decrease, sum_{j >= K} alpha a / ((j+1)(j+3)(1-a)),
/// is added back in closed form with a frozen at its last value, using
/// sum_{j >= K} 1/((j+1)(j+3)) = (1/(K+1) + 1/(K+2)) / 2.
template <typename Scalar>
AlphaLimit<Scalar> eagv_alpha_limit(Scalar alpha0, Scalar R, Scalar tol = Scalar(1e-14),
                                    Index max_iterations = 100000000) {
  Scalar alpha = alpha0;
  for (Index k = 0; k < max_iterations; ++k) {
    const Scalar next = eagv_alpha_next(alpha, k, R);
    if (alpha - next < tol) {
      const Scalar a = alpha * alpha * R * R;
      const Scalar kk = Scalar(k);
      const Scalar tail = (Scalar(1) / (kk + Scalar(1)) + Scalar(1) / (kk + Scalar(2))) / Scalar(2);
      return {alpha * (Scalar(1) - tail * a / (Scalar(1) - a)), alpha, k};
    }
    alpha = next;
  }
  throw std::runtime_error("eagv_alpha_limit: no convergence within iteration budget");
}

// ---------------------------------------------------------------------------
// FEG coefficients with alpha_k = 1/R, beta_k = 1/(k+1), rho_k = rho.

template <typename Scalar>
struct FegCoefficients {
  Scalar alpha;
  Scalar beta;
  Scalar B;
  Scalar A;
};

template <typename Scalar>
FegCoefficients<Scalar> feg_schedule_at(Index k, Scalar R, Scalar rho) {
  if (k < 0) throw std::invalid_argument("feg_schedule_at: k < 0");
  if (!(R > Scalar(0))) throw std::invalid_argument("feg_schedule_at: R must be > 0");
  if (!(rho > Scalar(-1) / (Scalar(2) * R))) {
    throw std::domain_error("feg_schedule_at: need rho > -1/(2R)");
  }
  const Scalar kk = Scalar(k);
  return {Scalar(1) / R, Scalar(1) / (kk + Scalar(1)), kk,
          kk * kk / Scalar(2) * (Scalar(1) / R + Scalar(2) * rho) - kk * rho};
}

// ---------------------------------------------------------------------------
// Anchor sequences c_k, delta_k, gamma_k, e_k.

/// delta_k = exp(scale / (k+1)^2) - 1, so that sum_k log(1 + delta_k) =
/// scale * pi^2 / 6.
template <typename Scalar>
Scalar delta_default(Index k, Scalar scale) {
  const Scalar kk = Scalar(k) + Scalar(1);
  return std::expm1(scale / (kk * kk));
}

/// delta_k = exp(scale (k+1)^2) - 1. The log-sum diverges, so c_k collapses
/// to zero; kept for comparison only.
template <typename Scalar>
Scalar delta_literal(Index k, Scalar scale) {
  const Scalar kk = Scalar(k) + Scalar(1);
  return std::expm1(scale * kk * kk);
}

/// Summable cap sequence for the strict negative-gamma mode.
template <typename Scalar>
Scalar e_default(Index k, Scalar e_scale) {
  const Scalar kk = Scalar(k) + Scalar(1);
  return e_scale / (kk * kk);
}

template <typename Scalar>
struct AnchorStep {
  Scalar c_next;
  Scalar gamma_next;
};

/// c_{k+1} = c_k / (1 + delta_k),  gamma_{k+1} = B_{k+1} / (c_{k+1} (1 + 1/delta_k)).
template <typename Scalar>
AnchorStep<Scalar> anchor_schedule_next(Scalar c, Scalar delta, Scalar B_next) {
  if (!(delta > Scalar(0))) throw std::domain_error("anchor_schedule_next: delta must be > 0");
  if (!(c > Scalar(0))) throw std::domain_error("anchor_schedule_next: c must be > 0");
  const Scalar c_next = c / (Scalar(1) + delta);
  return {c_next, B_next / (c_next * (Scalar(1) + Scalar(1) / delta))};
}

/// min(gamma_raw, e_next / (2 B_next ||G(z^{k+1})||^2)); the cap is vacuous
/// when the gradient vanishes.
template <typename Scalar>
Scalar negative_gamma_cap(Scalar gamma_raw, Scalar e_next, Scalar B_next, Scalar grad_norm_sq) {
  if (grad_norm_sq == Scalar(0)) return gamma_raw;
  return std::min(gamma_raw, e_next / (Scalar(2) * B_next * grad_norm_sq));
}

template <typename Scalar>
struct AnchorParams {
  AnchorMode mode = AnchorMode::moving_pos;
  Scalar c0 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar> / Scalar(6);
  Scalar delta_scale = 1;
  bool delta_literal = false;
  Scalar e_scale = 1;
};

/// Iterator over (c_k, delta_k). The sign convention of the applied gamma
/// depends on the mode; see signed_gamma().
template <typename Scalar>
class AnchorSchedule {
 public:
  AnchorSchedule() : AnchorSchedule(AnchorParams<Scalar>{}) {}

  explicit AnchorSchedule(const AnchorParams<Scalar>& params) : params_(params), c_(params.c0) {
    if (!(params.c0 > Scalar(0))) throw std::invalid_argument("AnchorSchedule: c0 must be > 0");
    if (!(params.delta_scale > Scalar(0))) {
      throw std::invalid_argument("AnchorSchedule: delta_scale must be > 0");
    }
    if (!(params.e_scale > Scalar(0))) throw std::invalid_argument("AnchorSchedule: e_scale must be > 0");
  }

  const AnchorParams<Scalar>& params() const { return params_; }
  AnchorMode mode() const { return params_.mode; }
  Index k() const { return k_; }
  Scalar c() const { return c_; }

  Scalar delta() const {
    return params_.delta_literal ? delta_literal(k_, params_.delta_scale)
                                 : delta_default(k_, params_.delta_scale);
  }

  Scalar e(Index j) const { return e_default(j, params_.e_scale); }

  /// c_inf = c0 prod_k 1/(1 + delta_k).
  Scalar c_inf() const {
    if (params_.delta_literal) return Scalar(0);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return params_.c0 * std::exp(-params_.delta_scale * pi * pi / Scalar(6));
  }

  /// Moves to k+1 and returns the unsigned gamma_{k+1}.
  Scalar advance(Scalar B_next) {
    const Scalar d = delta();
    AnchorStep<Scalar> step;
    if (std::isinf(d) || c_ == Scalar(0)) {
      step = {Scalar(0), std::numeric_limits<Scalar>::infinity()};
    } else {
      step = anchor_schedule_next(c_, d, B_next);
    }
    c_ = step.c_next;
    ++k_;
    return step.gamma_next;
  }

  /// The gamma actually added to the anchor for this mode, to be called
  /// right after advance(). `grad_norm_sq` is ||G(z^{k+1})||^2 and only
  /// matters in the strict negative mode, where the cap uses e_{k+1}.
  Scalar signed_gamma(Scalar gamma_raw, Scalar B_next, Scalar grad_norm_sq) const {
    switch (params_.mode) {
      case AnchorMode::fixed: return Scalar(0);
      case AnchorMode::moving_pos: return gamma_raw;
      case AnchorMode::moving_neg_naive: return -gamma_raw;
      case AnchorMode::moving_neg_strict:
        return -negative_gamma_cap(gamma_raw, e(k_), B_next, grad_norm_sq);
    }
    return Scalar(0);
  }

 private:
  AnchorParams<Scalar> params_;
  Scalar c_;
  Index k_ = 0;
};

}  // namespace anchored

#endif  // ANCHORED_SCHEDULES_HPP
