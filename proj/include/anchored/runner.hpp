#ifndef ANCHORED_RUNNER_HPP
#define ANCHORED_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "anchored/algorithms.hpp"
#include "anchored/diagnostics.hpp"
#include "anchored/trajectory.hpp"

namespace anchored {

template <typename Scalar>
struct RunConfig {
  SolverSettings<Scalar> settings;
  Index iters = 2000;
  std::optional<JointPoint<Scalar>> z0;
  // The runner stops with an error once ||z^k|| exceeds this.
  Scalar divergence_limit = Scalar(1e12);
  bool record_coordinates = true;  // honored for 1 x 1 problems only
};

template <typename Scalar>
struct RunResult {
  Trajectory records;
  std::vector<CoordinateRecord> coordinates;
  std::optional<SolverState<Scalar>> final_state;
  bool complete = false;
  std::string error;  // set when the run stopped early
  JointPoint<Scalar> z0;
};

template <typename Scalar>
TrajectoryRecord make_record(const SolverState<Scalar>& state,
                             const SaddleProblem<Scalar>& problem) {
  TrajectoryRecord rec;
  rec.k = state.k;
  rec.grad_norm_sq = static_cast<double>(state.g.squaredNorm());
  if (const auto& star = problem.saddle_point()) {
    rec.dist_to_saddle_sq = static_cast<double>((state.z - *star).squaredNorm());
    rec.anchor_dist_sq = static_cast<double>((state.z_bar - *star).squaredNorm());
    rec.lyapunov = static_cast<double>(lyapunov(state, problem));
  }
  rec.alpha_k = static_cast<double>(state.alpha);
  rec.c_k = static_cast<double>(state.c());
  rec.gamma_k = static_cast<double>(state.gamma);
  return rec;
}

/// Runs `iters` steps and records one row per iterate, k = 0..iters.
/// Deterministic for a fixed config. Errors stop the run and are reported
/// in the result alongside the rows gathered so far.
template <typename Scalar>
RunResult<Scalar> run(const SaddleProblem<Scalar>& problem, const RunConfig<Scalar>& config) {
  if (config.iters < 0) throw std::invalid_argument("run: iters must be >= 0");
  RunResult<Scalar> result;
  SolverState<Scalar> state = init_state(problem, config.settings, config.z0);
  result.z0 = state.z;
  const bool coords = config.record_coordinates && problem.dims().n == 1 && problem.dims().m == 1;
  result.records.reserve(static_cast<std::size_t>(config.iters) + 1);

  auto record = [&](const SolverState<Scalar>& s) {
    result.records.push_back(make_record(s, problem));
    if (coords) {
      result.coordinates.push_back({s.k, double(s.z[0]), double(s.z[1]), double(s.z_bar[0]),
                                    double(s.z_bar[1])});
    }
  };

  record(state);
  try {
    for (Index k = 0; k < config.iters; ++k) {
      StepOutput<Scalar> out = step(state, problem);
      state = std::move(out.next_state);
      record(state);
      if (!(state.z.norm() <= config.divergence_limit)) {
        throw NonfiniteError(state.k, "diverged: ||z|| exceeds " +
                                          std::to_string(double(config.divergence_limit)));
      }
    }
    result.complete = true;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace anchored

#endif  // ANCHORED_RUNNER_HPP
