#ifndef ANCHORED_ALGORITHMS_HPP
#define ANCHORED_ALGORITHMS_HPP

#include <cmath>
#include <memory>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <string>
#include <utility>

#include "anchored/problems.hpp"
#include "anchored/schedules.hpp"
#include "anchored/types.hpp"

namespace anchored {

/// Raised when an update produces NaN or Inf. Carries the index of the
/// iterate that could not be formed.
class NonfiniteError : public std::runtime_error {
 public:
  NonfiniteError(Index iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  Index iteration() const { return iteration_; }

 private:
  Index iteration_;
};

class ResolventError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Affine monotone operator H(w) = M w + b used in place of G inside the
/// proximal anchor update.
template <typename Scalar>
struct AffineOperator {
  Matrix<Scalar> M;
  Vector<Scalar> b;
};

template <typename Scalar>
struct ProximalSettings {
  Scalar t = 1;         // constant t_k
  Scalar tol = 1e-12;   // resolvent residual tolerance
  Index max_iterations = 100000;
  std::shared_ptr<const AffineOperator<Scalar>> H;  // null: H = G
};

template <typename Scalar>
struct SolverSettings {
  Algorithm algorithm = Algorithm::eagv;
  AnchorParams<Scalar> anchor;
  std::optional<Scalar> alpha0;  // EAG-V only; default 0.5 / R
  std::optional<ProximalSettings<Scalar>> proximal;
  // Keep the moving-anchor code path but apply gamma = 0.
  bool zero_gamma = false;
};

namespace detail {

// Cached (I + t H)^{-1} for a fixed affine H and constant t.
template <typename Scalar>
struct AffineResolvent {
  Scalar t;
  Matrix<Scalar> M;
  Vector<Scalar> b;
  Eigen::PartialPivLU<Matrix<Scalar>> lu;
};

}  // namespace detail

template <typename Scalar>
struct SolverState {
  JointPoint<Scalar> z;      // z^k
  JointPoint<Scalar> z_bar;  // anchor
  JointPoint<Scalar> g;      // G(z^k)
  Index k = 0;
  Scalar alpha = 0;  // alpha_k (EAG-V) or 1/R (FEG)
  Scalar gamma = 0;  // signed gamma_k that produced z_bar^k; 0 at k = 0
  AnchorSchedule<Scalar> anchor;
  SolverSettings<Scalar> settings;
  std::shared_ptr<const detail::AffineResolvent<Scalar>> resolvent;

  Algorithm algorithm() const { return settings.algorithm; }
  AnchorMode anchor_mode() const { return anchor.mode(); }
  Scalar c() const { return anchor.c(); }
  bool proximal() const { return settings.proximal.has_value(); }
};

template <typename Scalar>
struct StepOutput {
  SolverState<Scalar> next_state;
  JointPoint<Scalar> half_point;
  JointPoint<Scalar> g_half;
  JointPoint<Scalar> g_next;
  Scalar gamma_used = 0;
  Scalar resolvent_residual = 0;
};

template <typename Scalar>
Scalar default_alpha0(const SaddleProblem<Scalar>& problem) {
  return Scalar(0.5) / problem.smoothness();
}

/// z^0 = (1, ..., 1), or the barycenter of each simplex for constrained
/// problems.
template <typename Scalar>
JointPoint<Scalar> default_initial_point(const SaddleProblem<Scalar>& problem) {
  const BlockDims& d = problem.dims();
  JointPoint<Scalar> z = JointPoint<Scalar>::Ones(d.total());
  if (problem.constraint() == Constraint::product_of_simplices) {
    z.head(d.n).setConstant(Scalar(1) / Scalar(d.n));
    z.tail(d.m).setConstant(Scalar(1) / Scalar(d.m));
  }
  return z;
}

template <typename Scalar>
SolverState<Scalar> init_state(const SaddleProblem<Scalar>& problem,
                               const SolverSettings<Scalar>& settings,
                               std::optional<JointPoint<std::type_identity_t<Scalar>>> z0 = std::nullopt) {
  const Scalar R = problem.smoothness();
  if (!(R > Scalar(0))) throw std::invalid_argument("init_state: problem has R = 0");
  SolverState<Scalar> s;
  s.settings = settings;
  s.z = z0 ? std::move(*z0) : default_initial_point(problem);
  if (s.z.size() != problem.dims().total()) {
    throw std::invalid_argument("init_state: z0 has dimension " + std::to_string(s.z.size()) +
                                ", problem needs " + std::to_string(problem.dims().total()));
  }
  if (problem.constraint() == Constraint::product_of_simplices) {
    project_blocks(s.z, problem.dims());
  }
  s.z_bar = s.z;
  s.g = problem.apply(s.z);
  s.anchor = AnchorSchedule<Scalar>(settings.anchor);

  if (settings.algorithm == Algorithm::eagv) {
    s.alpha = settings.alpha0.value_or(default_alpha0(problem));
    if (!(s.alpha > Scalar(0)) || !(s.alpha * R < Scalar(1))) {
      throw std::invalid_argument("init_state: alpha0 must lie in (0, 1/R)");
    }
  } else {
    // Validates rho > -1/(2R).
    s.alpha = feg_schedule_at(0, R, problem.comonotonicity()).alpha;
  }

  if (settings.proximal) {
    const auto& prox = *settings.proximal;
    if (!(prox.t >= Scalar(0))) throw std::invalid_argument("init_state: t_k must be >= 0");
    if (!(prox.tol > Scalar(0))) throw std::invalid_argument("init_state: tolerance must be > 0");
    const Index d = problem.dims().total();
    const bool affine_h = prox.H || problem.is_affine();
    if (affine_h) {
      auto res = std::make_shared<detail::AffineResolvent<Scalar>>();
      res->t = prox.t;
      res->M = prox.H ? prox.H->M : problem.matrix();
      res->b = prox.H ? prox.H->b : problem.offset();
      if (res->M.rows() != d || res->M.cols() != d || res->b.size() != d) {
        throw std::invalid_argument("init_state: proximal H has wrong dimension");
      }
      const Matrix<Scalar> system = Matrix<Scalar>::Identity(d, d) + prox.t * res->M;
      res->lu.compute(system);
      if (!(std::abs(res->lu.determinant()) > Scalar(0))) {
        throw ResolventError("resolvent: I + t H is singular");
      }
      s.resolvent = std::move(res);
    }
  }
  return s;
}

namespace detail {

template <typename Scalar>
Vector<Scalar> apply_h(const std::optional<ProximalSettings<Scalar>>& prox,
                       const SaddleProblem<Scalar>& problem, const Vector<Scalar>& w) {
  if (prox && prox->H) return prox->H->M * w + prox->H->b;
  return problem.apply(w);
}

template <typename Scalar>
struct ResolventSolution {
  JointPoint<Scalar> point;
  Scalar residual;
};

// Solves w + t H(w) = rhs for a black-box monotone H by extragradient on
// F(w) = w + t H(w) - rhs, which is 1-strongly monotone and (1 + t R)-Lipschitz.
template <typename Scalar>
ResolventSolution<Scalar> iterative_resolvent(const SaddleProblem<Scalar>& problem,
                                              const ProximalSettings<Scalar>& prox,
                                              const Vector<Scalar>& rhs,
                                              const Vector<Scalar>& start) {
  const Scalar t = prox.t;
  const Scalar step = Scalar(0.5) / (Scalar(1) + t * problem.smoothness());
  auto residual_of = [&](const Vector<Scalar>& w) -> Vector<Scalar> {
    return w + t * problem.apply(w) - rhs;
  };
  Vector<Scalar> w = start;
  Vector<Scalar> F = residual_of(w);
  for (Index it = 0; it < prox.max_iterations; ++it) {
    const Scalar res = F.norm();
    if (res <= prox.tol) return {w, res};
    const Vector<Scalar> half = w - step * F;
    w -= step * residual_of(half);
    F = residual_of(w);
  }
  const Scalar res = F.norm();
  if (res <= prox.tol) return {w, res};
  throw ResolventError("resolvent: residual " + std::to_string(double(res)) +
                       " above tolerance after " + std::to_string(prox.max_iterations) +
                       " iterations");
}

template <typename Scalar>
ResolventSolution<Scalar> affine_resolvent(const AffineResolvent<Scalar>& res,
                                           const Vector<Scalar>& rhs, Scalar tol) {
  // (I + t M) w = rhs - t b, plus a round of refinement.
  const Vector<Scalar> target = rhs - res.t * res.b;
  Vector<Scalar> w = res.lu.solve(target);
  auto residual_of = [&](const Vector<Scalar>& v) -> Vector<Scalar> {
    return v + res.t * (res.M * v) - target;
  };
  Vector<Scalar> r = residual_of(w);
  for (int pass = 0; pass < 2 && r.norm() > tol; ++pass) {
    w -= res.lu.solve(r);
    r = residual_of(w);
  }
  const Scalar residual = r.norm();
  if (!(residual <= tol)) {
    throw ResolventError("resolvent: affine solve residual " + std::to_string(double(residual)) +
                         " above tolerance");
  }
  return {std::move(w), residual};
}

}  // namespace detail

template <typename Scalar>
struct ProximalAnchor {
  JointPoint<Scalar> point;
  Scalar residual;  // ||w + t H(w) - rhs||
};

/// z_bar^{k+1} = (I + t H)^{-1} (z_bar^k + gamma G(z^{k+1}) + t H(z_bar^k)),
/// with H = G unless an affine H is supplied in `prox`.
template <typename Scalar>
ProximalAnchor<Scalar> proximal_anchor_update(const JointPoint<Scalar>& z_bar,
                                              const JointPoint<Scalar>& g_next, Scalar gamma,
                                              const SaddleProblem<Scalar>& problem,
                                              const ProximalSettings<Scalar>& prox) {
  if (!(prox.t >= Scalar(0))) throw std::invalid_argument("proximal_anchor_update: t_k < 0");
  const std::optional<ProximalSettings<Scalar>> wrapped = prox;
  const JointPoint<Scalar> rhs =
      z_bar + gamma * g_next + prox.t * detail::apply_h(wrapped, problem, z_bar);
  if (prox.t == Scalar(0)) return {rhs, Scalar(0)};
  if (prox.H || problem.is_affine()) {
    detail::AffineResolvent<Scalar> res;
    res.t = prox.t;
    res.M = prox.H ? prox.H->M : problem.matrix();
    res.b = prox.H ? prox.H->b : problem.offset();
    const Index d = res.M.rows();
    res.lu.compute(Matrix<Scalar>::Identity(d, d) + prox.t * res.M);
    if (!(std::abs(res.lu.determinant()) > Scalar(0))) {
      throw ResolventError("resolvent: I + t H is singular");
    }
    auto sol = detail::affine_resolvent(res, rhs, prox.tol);
    return {std::move(sol.point), sol.residual};
  }
  auto sol = detail::iterative_resolvent(problem, prox, rhs, z_bar);
  return {std::move(sol.point), sol.residual};
}

namespace detail {

struct NoProjection {
  template <typename Vec>
  void operator()(Vec&) const {}
};

struct SimplexProjection {
  BlockDims dims;
  template <typename Vec>
  void operator()(Vec& z) const {
    project_blocks(z, dims);
  }
};

template <typename Scalar>
bool all_finite(const Vector<Scalar>& v) {
  return v.allFinite();
}

// One extragradient step with an anchored update; `project` is applied to
// the half point, the new iterate and the new anchor before each is used.
template <typename Scalar, typename Projector>
StepOutput<Scalar> anchored_step(const SolverState<Scalar>& state,
                                 const SaddleProblem<Scalar>& problem,
                                 const Projector& project) {
  const Index k = state.k;
  const Scalar kk = Scalar(k);
  const Scalar R = problem.smoothness();
  const JointPoint<Scalar>& z = state.z;
  const JointPoint<Scalar>& g = state.g;

  StepOutput<Scalar> out;
  JointPoint<Scalar> next;
  Scalar B_next = 0;
  if (state.algorithm() == Algorithm::eagv) {
    const Scalar beta = Scalar(1) / (kk + Scalar(2));
    const JointPoint<Scalar> base = z + beta * (state.z_bar - z);
    out.half_point = base - state.alpha * g;
    project(out.half_point);
    out.g_half = problem.apply(out.half_point);
    next = base - state.alpha * out.g_half;
    B_next = kk + Scalar(2);
  } else {
    const Scalar rho = problem.comonotonicity();
    const auto coef = feg_schedule_at(k, R, rho);
    const Scalar beta = coef.beta;
    const JointPoint<Scalar> base = z + beta * (state.z_bar - z);
    out.half_point = base - (Scalar(1) - beta) * (coef.alpha + Scalar(2) * rho) * g;
    project(out.half_point);
    out.g_half = problem.apply(out.half_point);
    next = base - coef.alpha * out.g_half - (Scalar(1) - beta) * Scalar(2) * rho * g;
    B_next = kk + Scalar(1);
  }
  project(next);
  if (!all_finite(next)) throw NonfiniteError(k + 1, "iterate is not finite");
  out.g_next = problem.apply(next);
  if (!all_finite(out.g_next)) throw NonfiniteError(k + 1, "operator value is not finite");

  SolverState<Scalar> ns = state;
  const Scalar gamma_raw = ns.anchor.advance(B_next);
  Scalar gamma = ns.anchor.signed_gamma(gamma_raw, B_next, out.g_next.squaredNorm());
  if (state.settings.zero_gamma) gamma = Scalar(0);
  out.gamma_used = gamma;

  JointPoint<Scalar> z_bar_next;
  if (state.settings.proximal && state.settings.proximal->t > Scalar(0)) {
    const auto& prox = *state.settings.proximal;
    const JointPoint<Scalar> rhs =
        state.z_bar + gamma * out.g_next + prox.t * apply_h(state.settings.proximal, problem,
                                                            state.z_bar);
    ResolventSolution<Scalar> sol =
        state.resolvent ? affine_resolvent(*state.resolvent, rhs, prox.tol)
                        : iterative_resolvent(problem, prox, rhs, state.z_bar);
    z_bar_next = std::move(sol.point);
    out.resolvent_residual = sol.residual;
  } else {
    z_bar_next = state.z_bar + gamma * out.g_next;
  }
  project(z_bar_next);
  if (!all_finite(z_bar_next)) throw NonfiniteError(k + 1, "anchor is not finite");

  if (state.algorithm() == Algorithm::eagv) ns.alpha = eagv_alpha_next(state.alpha, k, R);
  ns.z = std::move(next);
  ns.z_bar = std::move(z_bar_next);
  ns.g = out.g_next;
  ns.k = k + 1;
  ns.gamma = gamma;
  out.next_state = std::move(ns);
  return out;
}

template <typename Scalar>
void require_unconstrained(const SaddleProblem<Scalar>& problem, const char* who) {
  if (problem.constraint() != Constraint::none) {
    throw std::invalid_argument(std::string(who) +
                                ": problem is constrained, use projected_step");
  }
}

}  // namespace detail

/// EAG-V with fixed or moving anchor:
///   z^{k+1/2} = z^k + (z_bar^k - z^k)/(k+2) - alpha_k G(z^k)
///   z^{k+1}   = z^k + (z_bar^k - z^k)/(k+2) - alpha_k G(z^{k+1/2})
///   z_bar^{k+1} = z_bar^k + gamma_{k+1} G(z^{k+1})   (sign/cap per mode)
template <typename Scalar>
StepOutput<Scalar> eagv_step(const SolverState<Scalar>& state,
                             const SaddleProblem<Scalar>& problem) {
  if (state.algorithm() != Algorithm::eagv) throw std::invalid_argument("eagv_step: FEG state");
  detail::require_unconstrained(problem, "eagv_step");
  return detail::anchored_step(state, problem, detail::NoProjection{});
}

/// FEG with fixed or moving anchor (alpha = 1/R, beta_k = 1/(k+1)):
///   z^{k+1/2} = z^k + beta_k (z_bar^k - z^k) - (1 - beta_k)(alpha + 2 rho) G(z^k)
///   z^{k+1}   = z^k + beta_k (z_bar^k - z^k) - alpha G(z^{k+1/2}) - (1 - beta_k) 2 rho G(z^k)
template <typename Scalar>
StepOutput<Scalar> feg_step(const SolverState<Scalar>& state,
                            const SaddleProblem<Scalar>& problem) {
  if (state.algorithm() != Algorithm::feg) throw std::invalid_argument("feg_step: EAG-V state");
  detail::require_unconstrained(problem, "feg_step");
  return detail::anchored_step(state, problem, detail::NoProjection{});
}

/// Same update as eagv_step / feg_step (chosen by the state's tag), with
/// z^{k+1/2}, z^{k+1} and z_bar^{k+1} projected block-wise onto the simplices
/// before use.
template <typename Scalar>
StepOutput<Scalar> projected_step(const SolverState<Scalar>& state,
                                  const SaddleProblem<Scalar>& problem) {
  if (problem.constraint() != Constraint::product_of_simplices) {
    throw std::invalid_argument("projected_step: problem has no simplex constraint");
  }
  return detail::anchored_step(state, problem, detail::SimplexProjection{problem.dims()});
}

/// Dispatches on the algorithm tag and the problem's constraint.
template <typename Scalar>
StepOutput<Scalar> step(const SolverState<Scalar>& state, const SaddleProblem<Scalar>& problem) {
  if (problem.constraint() == Constraint::product_of_simplices) {
    return projected_step(state, problem);
  }
  return state.algorithm() == Algorithm::eagv ? eagv_step(state, problem)
                                               : feg_step(state, problem);
}

}  // namespace anchored

#endif  // ANCHORED_ALGORITHMS_HPP
