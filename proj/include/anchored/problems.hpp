#ifndef ANCHORED_PROBLEMS_HPP
#define ANCHORED_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anchored/rng.hpp"
#include "anchored/types.hpp"

namespace anchored {

enum class OperatorKind { affine_explicit, black_box };

enum class Constraint { none, product_of_simplices };

/// Data behind the quadratic two-player game
///   min_{x in simplex} max_{y in simplex} 1/2 <Qx, x> + <Kx, y>.
template <typename Scalar>
struct GameInstance {
  Matrix<Scalar> Q;  // n x n, Q = A^T A
  Matrix<Scalar> K;  // m x n, entries in [-1, 1]
  Matrix<Scalar> A;  // k x n, standard normal
  std::uint64_t seed = 0;
};

/// Largest singular value of M by power iteration on M^T M.
///
/// The start vector is a fixed pseudo-random draw so the result is
/// reproducible. Iteration stops once the Rayleigh quotient has changed by
/// less than `rel_tol` (relative) for several consecutive sweeps.
template <typename Scalar>
Scalar spectral_norm(const Matrix<Scalar>& M, Scalar rel_tol = Scalar(1e-14),
                     Index max_iterations = 200000) {
  if (M.rows() == 0 || M.cols() == 0) {
    throw std::invalid_argument("spectral_norm: zero-dimensional matrix");
  }
  Rng rng(0x5eed5eedULL);
  Vector<Scalar> v(M.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = Scalar(1) + Scalar(rng.uniform01());
  v.normalize();

  Scalar lambda = 0;
  int quiet_sweeps = 0;
  for (Index it = 0; it < max_iterations; ++it) {
    Vector<Scalar> w = M.transpose() * (M * v);
    const Scalar next = v.dot(w);
    const Scalar norm_w = w.norm();
    if (norm_w == Scalar(0)) return Scalar(0);
    v = w / norm_w;
    if (std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      if (++quiet_sweeps >= 3) {
        lambda = next;
        break;
      }
    } else {
      quiet_sweeps = 0;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, Scalar(0)));
}

/// A smooth structured minimax problem, seen through its saddle operator
/// G(z) = (grad_x L, -grad_y L).
///
/// Affine-explicit problems carry G(z) = M z + b and have their smoothness
/// constant computed from M. Black-box problems carry a callable and a
/// user-supplied R. Values are immutable once built.
template <typename Scalar>
class SaddleProblem {
 public:
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;
  using OperatorFn = std::function<Vec(const Vec&)>;
  using ValueFn = std::function<Scalar(const Vec&)>;

  /// `smoothness`, when given, must agree with the spectral norm of M to
  /// relative 1e-8; otherwise it is computed.
  static SaddleProblem affine(std::string name, BlockDims dims, Mat M, Vec b, Scalar rho,
                              ValueFn value = {}, std::optional<Vec> saddle = std::nullopt,
                              Constraint constraint = Constraint::none,
                              std::optional<Scalar> smoothness = std::nullopt) {
    if (M.rows() != dims.total() || M.cols() != dims.total() || b.size() != dims.total()) {
      throw std::invalid_argument("SaddleProblem: operator data does not match dimensions");
    }
    SaddleProblem p;
    p.name_ = std::move(name);
    p.dims_ = dims;
    p.kind_ = OperatorKind::affine_explicit;
    const Scalar computed = dims.total() > 0 ? spectral_norm<Scalar>(M) : Scalar(0);
    if (smoothness) {
      const Scalar scale = std::max(std::abs(*smoothness), Scalar(1));
      if (std::abs(*smoothness - computed) > Scalar(1e-8) * scale) {
        throw std::invalid_argument("SaddleProblem: stated R disagrees with spectral norm of M");
      }
      p.R_ = *smoothness;
    } else {
      p.R_ = computed;
    }
    p.M_ = std::move(M);
    p.b_ = std::move(b);
    p.rho_ = rho;
    p.value_ = std::move(value);
    p.constraint_ = constraint;
    p.saddle_ = std::move(saddle);
    p.validate();
    if (p.saddle_) {
      const Scalar residual = (p.M_ * *p.saddle_ + p.b_).norm();
      if (residual > Scalar(1e-10) * std::max(Scalar(1), p.b_.norm())) {
        throw std::invalid_argument("SaddleProblem: stated saddle point is not a zero of G");
      }
    }
    return p;
  }

  static SaddleProblem black_box(std::string name, BlockDims dims, OperatorFn op, Scalar R,
                                 Scalar rho, ValueFn value = {},
                                 std::optional<Vec> saddle = std::nullopt,
                                 Constraint constraint = Constraint::none) {
    if (!op) throw std::invalid_argument("SaddleProblem: empty operator");
    SaddleProblem p;
    p.name_ = std::move(name);
    p.dims_ = dims;
    p.kind_ = OperatorKind::black_box;
    p.op_ = std::move(op);
    p.R_ = R;
    p.rho_ = rho;
    p.value_ = std::move(value);
    p.saddle_ = std::move(saddle);
    p.constraint_ = constraint;
    p.validate();
    return p;
  }

  const std::string& name() const { return name_; }
  const BlockDims& dims() const { return dims_; }
  OperatorKind kind() const { return kind_; }
  bool is_affine() const { return kind_ == OperatorKind::affine_explicit; }
  const Mat& matrix() const { return M_; }
  const Vec& offset() const { return b_; }
  Scalar smoothness() const { return R_; }
  Scalar comonotonicity() const { return rho_; }
  const std::optional<Vec>& saddle_point() const { return saddle_; }
  Constraint constraint() const { return constraint_; }
  bool has_value() const { return static_cast<bool>(value_); }
  const std::shared_ptr<const GameInstance<Scalar>>& game() const { return game_; }

  Vec apply(const Vec& z) const {
    if (z.size() != dims_.total()) {
      throw std::invalid_argument("eval_operator: dimension mismatch (got " +
                                  std::to_string(z.size()) + ", expected " +
                                  std::to_string(dims_.total()) + ")");
    }
    if (is_affine()) return M_ * z + b_;
    return op_(z);
  }

  Scalar value(const Vec& z) const {
    if (!value_) throw std::logic_error("problem '" + name_ + "' has no scalar value L(z)");
    if (z.size() != dims_.total()) throw std::invalid_argument("value: dimension mismatch");
    return value_(z);
  }

  SaddleProblem with_game(std::shared_ptr<const GameInstance<Scalar>> game) const {
    SaddleProblem p = *this;
    p.game_ = std::move(game);
    return p;
  }

 private:
  SaddleProblem() = default;

  void validate() const {
    if (R_ < Scalar(0) || !std::isfinite(static_cast<double>(R_))) {
      throw std::invalid_argument("SaddleProblem: R must be finite and nonnegative");
    }
    if (R_ > Scalar(0) && !(rho_ > Scalar(-1) / (Scalar(2) * R_))) {
      throw std::invalid_argument("SaddleProblem: rho must exceed -1/(2R)");
    }
    if (saddle_ && saddle_->size() != dims_.total()) {
      throw std::invalid_argument("SaddleProblem: saddle point has wrong dimension");
    }
  }

  std::string name_;
  BlockDims dims_;
  OperatorKind kind_ = OperatorKind::affine_explicit;
  Mat M_;
  Vec b_;
  OperatorFn op_;
  ValueFn value_;
  Scalar R_ = 0;
  Scalar rho_ = 0;
  std::optional<Vec> saddle_;
  Constraint constraint_ = Constraint::none;
  std::shared_ptr<const GameInstance<Scalar>> game_;
};

template <typename Scalar>
JointPoint<Scalar> eval_operator(const SaddleProblem<Scalar>& problem,
                                 const JointPoint<Scalar>& z) {
  return problem.apply(z);
}

/// Central differences of L: (grad_x L, -grad_y L), error O(h^2).
template <typename Scalar>
JointPoint<Scalar> finite_difference_operator(const SaddleProblem<Scalar>& problem,
                                              const JointPoint<Scalar>& z, Scalar h) {
  if (!(h > Scalar(0))) throw std::invalid_argument("finite_difference_operator: h must be > 0");
  if (!problem.has_value()) {
    throw std::logic_error("finite_difference_operator: problem '" + problem.name() +
                           "' exposes no scalar value");
  }
  const BlockDims& d = problem.dims();
  if (z.size() != d.total()) throw std::invalid_argument("eval_operator: dimension mismatch");
  JointPoint<Scalar> g(z.size());
  JointPoint<Scalar> probe = z;
  for (Index i = 0; i < z.size(); ++i) {
    const Scalar zi = z[i];
    probe[i] = zi + h;
    const Scalar up = problem.value(probe);
    probe[i] = zi - h;
    const Scalar down = problem.value(probe);
    probe[i] = zi;
    const Scalar partial = (up - down) / (Scalar(2) * h);
    g[i] = i < d.n ? partial : -partial;
  }
  return g;
}

template <typename Scalar>
struct LipschitzEstimate {
  Scalar value = 0;
  // True for sampled estimates of black-box operators: the true constant
  // may be larger.
  bool lower_estimate = false;
};

struct SamplingBudget {
  Index num_pairs = 1000;
  std::uint64_t seed = 1;
  double radius = 10.0;
};

namespace detail {

// Uniform draw from the Euclidean ball of the given radius around center.
template <typename Scalar>
Vector<Scalar> sample_ball(Rng& rng, const Vector<Scalar>& center, double radius) {
  const Index d = center.size();
  Vector<Scalar> dir(d);
  for (Index i = 0; i < d; ++i) dir[i] = Scalar(rng.normal());
  const Scalar norm = dir.norm();
  if (norm == Scalar(0)) return center;
  const double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  return center + (Scalar(r) / norm) * dir;
}

template <typename Scalar>
Vector<Scalar> sampling_center(const SaddleProblem<Scalar>& problem) {
  if (problem.saddle_point()) return *problem.saddle_point();
  return Vector<Scalar>::Zero(problem.dims().total());
}

}  // namespace detail

template <typename Scalar>
LipschitzEstimate<Scalar> estimate_lipschitz(const SaddleProblem<Scalar>& problem,
                                             std::optional<SamplingBudget> budget = {}) {
  if (problem.dims().total() == 0) {
    throw std::invalid_argument("estimate_lipschitz: zero-dimensional problem");
  }
  if (problem.is_affine()) return {spectral_norm<Scalar>(problem.matrix()), false};
  if (!budget) {
    throw std::invalid_argument("estimate_lipschitz: black-box problems need a sampling budget");
  }
  Rng rng(budget->seed);
  const auto center = detail::sampling_center(problem);
  Scalar best = 0;
  for (Index i = 0; i < budget->num_pairs; ++i) {
    const auto z1 = detail::sample_ball<Scalar>(rng, center, budget->radius);
    const auto z2 = detail::sample_ball<Scalar>(rng, center, budget->radius);
    const Scalar dz = (z1 - z2).norm();
    if (dz == Scalar(0)) continue;
    best = std::max(best, (problem.apply(z1) - problem.apply(z2)).norm() / dz);
  }
  return {best, true};
}

template <typename Scalar>
struct ComonotonicityReport {
  bool holds = true;
  Scalar worst_margin = std::numeric_limits<Scalar>::infinity();
  std::pair<JointPoint<Scalar>, JointPoint<Scalar>> witness;
};

/// Samples pairs in a ball around the saddle (origin when unknown) and tests
/// <G(z1) - G(z2), z1 - z2> >= rho ||G(z1) - G(z2)||^2.
template <typename Scalar>
ComonotonicityReport<Scalar> check_comonotonicity(const SaddleProblem<Scalar>& problem,
                                                  Scalar rho, Index num_samples,
                                                  std::uint64_t seed, double radius = 10.0) {
  if (num_samples < 1) throw std::invalid_argument("check_comonotonicity: num_samples < 1");
  Rng rng(seed);
  const auto center = detail::sampling_center(problem);
  ComonotonicityReport<Scalar> report;
  for (Index i = 0; i < num_samples; ++i) {
    auto z1 = detail::sample_ball<Scalar>(rng, center, radius);
    auto z2 = detail::sample_ball<Scalar>(rng, center, radius);
    const JointPoint<Scalar> dg = problem.apply(z1) - problem.apply(z2);
    const Scalar margin = dg.dot(z1 - z2) - rho * dg.squaredNorm();
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.witness = {std::move(z1), std::move(z2)};
    }
  }
  report.holds = report.worst_margin >= Scalar(-1e-12);
  return report;
}

/// Sampled check of the R and rho a black-box problem claims. Returns one
/// message per violated assumption; empty when nothing was contradicted.
template <typename Scalar>
std::vector<std::string> verify_assumptions(const SaddleProblem<Scalar>& problem,
                                            SamplingBudget budget = {}) {
  std::vector<std::string> warnings;
  const auto lip = estimate_lipschitz(problem, budget);
  if (lip.value > problem.smoothness() * (Scalar(1) + Scalar(1e-8))) {
    warnings.push_back("sampled Lipschitz ratio " + std::to_string(double(lip.value)) +
                       " exceeds stated R = " + std::to_string(double(problem.smoothness())));
  }
  const auto como = check_comonotonicity(problem, problem.comonotonicity(), budget.num_pairs,
                                         budget.seed + 1, budget.radius);
  if (!como.holds) {
    warnings.push_back("stated rho = " + std::to_string(double(problem.comonotonicity())) +
                       " violated by a sampled pair (margin " +
                       std::to_string(double(como.worst_margin)) + ")");
  }
  return warnings;
}

/// Euclidean projection onto the unit simplex, sort-based.
template <typename Derived>
Vector<typename Derived::Scalar> project_simplex(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index d = v.size();
  if (d < 1) throw std::invalid_argument("project_simplex: empty vector");
  std::vector<Scalar> sorted(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) sorted[i] = v[i];
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  Scalar running = 0;
  Scalar theta = 0;
  for (Index j = 0; j < d; ++j) {
    running += sorted[j];
    const Scalar candidate = (running - Scalar(1)) / Scalar(j + 1);
    if (sorted[j] - candidate > Scalar(0)) theta = candidate;
  }
  Vector<Scalar> w = (v.array() - theta).cwiseMax(Scalar(0)).matrix();
  // Drift against the exact sum is a few ulps; fold it into the largest entry.
  Index top = 0;
  w.maxCoeff(&top);
  w[top] += Scalar(1) - w.sum();
  return w;
}

/// Projects each block of z onto its simplex in place.
template <typename Scalar>
void project_blocks(JointPoint<Scalar>& z, const BlockDims& dims) {
  if (dims.n > 0) z.head(dims.n) = project_simplex(z.head(dims.n));
  if (dims.m > 0) z.tail(dims.m) = project_simplex(z.tail(dims.m));
}

/// f(x, y) = eps x^2 / 2 + x y - eps y^2 / 2 on R x R.
template <typename Scalar = double>
SaddleProblem<Scalar> make_almost_bilinear(Scalar eps) {
  if (!(eps > Scalar(0))) throw std::invalid_argument("make_almost_bilinear: eps must be > 0");
  Matrix<Scalar> M(2, 2);
  M << eps, Scalar(1), Scalar(-1), eps;
  auto value = [eps](const Vector<Scalar>& z) {
    return eps * z[0] * z[0] / Scalar(2) + z[0] * z[1] - eps * z[1] * z[1] / Scalar(2);
  };
  return SaddleProblem<Scalar>::affine("almost_bilinear", {1, 1}, std::move(M),
                                       Vector<Scalar>::Zero(2), Scalar(0), value,
                                       Vector<Scalar>::Zero(2), Constraint::none,
                                       std::sqrt(Scalar(1) + eps * eps));
}

/// L(x, y) = (rho R^2 / 2) x^2 + R sqrt(1 - rho^2 R^2) x y - (rho R^2 / 2) y^2,
/// which is R-smooth and exactly rho-comonotone.
template <typename Scalar = double>
SaddleProblem<Scalar> make_comonotone_quadratic(Scalar R, Scalar rho) {
  if (!(R > Scalar(0))) throw std::invalid_argument("make_comonotone_quadratic: R must be > 0");
  if (std::abs(rho) * R > Scalar(1)) {
    throw std::invalid_argument("make_comonotone_quadratic: need |rho| R <= 1");
  }
  if (!(rho > Scalar(-1) / (Scalar(2) * R))) {
    throw std::invalid_argument("make_comonotone_quadratic: need rho > -1/(2R)");
  }
  const Scalar diag = rho * R * R;
  const Scalar cross = R * std::sqrt(Scalar(1) - rho * rho * R * R);
  Matrix<Scalar> M(2, 2);
  M << diag, cross, -cross, diag;
  auto value = [diag, cross](const Vector<Scalar>& z) {
    return diag / Scalar(2) * z[0] * z[0] + cross * z[0] * z[1] - diag / Scalar(2) * z[1] * z[1];
  };
  return SaddleProblem<Scalar>::affine("comonotone", {1, 1}, std::move(M),
                                       Vector<Scalar>::Zero(2), rho, value,
                                       Vector<Scalar>::Zero(2), Constraint::none, R);
}

/// Random instance of min_{x in simplex^n} max_{y in simplex^m} 1/2 <Qx,x> + <Kx,y>
/// with Q = A^T A, A (k x n) standard normal, K (m x n) uniform on [-1, 1].
/// A is drawn first (row-major), then K (row-major), from one generator.
template <typename Scalar = double>
SaddleProblem<Scalar> make_nonlinear_game(Index m, Index k, Index n, std::uint64_t seed) {
  if (m < 1 || k < 1 || n < 1) throw std::invalid_argument("make_nonlinear_game: m, k, n >= 1");
  Rng rng(seed);
  auto game = std::make_shared<GameInstance<Scalar>>();
  game->seed = seed;
  game->A.resize(k, n);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < n; ++j) game->A(i, j) = Scalar(rng.normal());
  game->K.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) game->K(i, j) = Scalar(rng.uniform(-1.0, 1.0));
  game->Q = game->A.transpose() * game->A;

  Matrix<Scalar> M = Matrix<Scalar>::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = game->Q;
  M.topRightCorner(n, m) = game->K.transpose();
  M.bottomLeftCorner(m, n) = -game->K;

  std::shared_ptr<const GameInstance<Scalar>> shared = game;
  auto value = [shared, n, m](const Vector<Scalar>& z) {
    const auto x = z.head(n);
    const auto y = z.tail(m);
    return Scalar(0.5) * x.dot(shared->Q * x) + y.dot(shared->K * x);
  };
  auto problem = SaddleProblem<Scalar>::affine("game", {n, m}, std::move(M),
                                               Vector<Scalar>::Zero(n + m), Scalar(0), value,
                                               std::nullopt, Constraint::product_of_simplices);
  return problem.with_game(std::move(shared));
}

}  // namespace anchored

#endif  // ANCHORED_PROBLEMS_HPP
