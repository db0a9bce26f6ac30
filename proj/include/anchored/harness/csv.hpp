#ifndef ANCHORED_HARNESS_CSV_HPP
#define ANCHORED_HARNESS_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "anchored/trajectory.hpp"

namespace anchored::harness {

inline constexpr const char* kTrajectoryHeader =
    "k,grad_norm_sq,dist_to_saddle_sq,anchor_dist_sq,lyapunov,alpha_k,c_k,gamma_k,bound";
inline constexpr const char* kCoordinateHeader = "k,x,y,xbar,ybar";

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& rows);
/// Lines starting with `#` (run annotations) are skipped.
Trajectory parse_trajectory_csv(std::istream& is);

void write_coordinates_csv(std::ostream& os, const std::vector<CoordinateRecord>& rows);
std::vector<CoordinateRecord> parse_coordinates_csv(std::istream& is);

}  // namespace anchored::harness

#endif  // ANCHORED_HARNESS_CSV_HPP
