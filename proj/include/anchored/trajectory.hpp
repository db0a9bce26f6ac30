#ifndef ANCHORED_TRAJECTORY_HPP
#define ANCHORED_TRAJECTORY_HPP

#include <optional>
#include <string>
#include <vector>

#include "anchored/types.hpp"

namespace anchored {

/// One row of per-iteration metrics. Optional fields are absent when the
/// quantity is undefined (no known saddle point, bound hypotheses unmet).
struct TrajectoryRecord {
  Index k = 0;
  double grad_norm_sq = 0;
  std::optional<double> dist_to_saddle_sq;
  std::optional<double> anchor_dist_sq;
  std::optional<double> lyapunov;
  double alpha_k = 0;
  double c_k = 0;
  double gamma_k = 0;
  std::optional<double> bound;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Iterate and anchor coordinates, recorded for 1 x 1 problems only.
struct CoordinateRecord {
  Index k = 0;
  double x = 0;
  double y = 0;
  double x_bar = 0;
  double y_bar = 0;

  friend bool operator==(const CoordinateRecord&, const CoordinateRecord&) = default;
};

using Trajectory = std::vector<TrajectoryRecord>;

}  // namespace anchored

#endif  // ANCHORED_TRAJECTORY_HPP
