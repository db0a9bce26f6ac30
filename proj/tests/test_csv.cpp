#include "doctest.h"

#include <limits>
#include <sstream>

#include "anchored/harness/csv.hpp"
#include "anchored/rng.hpp"

using namespace anchored;
using namespace anchored::harness;

TEST_CASE("header and empty fields") {
  Trajectory t(1);
  t[0].k = 0;
  t[0].grad_norm_sq = 2.0002;
  t[0].alpha_k = 0.5;
  t[0].c_k = 1;
  std::ostringstream os;
  write_trajectory_csv(os, t);
  CHECK(os.str() ==
        "k,grad_norm_sq,dist_to_saddle_sq,anchor_dist_sq,lyapunov,alpha_k,c_k,gamma_k,bound\n"
        "0,2.0002,,,,0.5,1,0,\n");
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(-0.0) == "-0");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("round-trip property over random trajectories") {
  Rng rng(2024);
  auto maybe = [&](double v) -> std::optional<double> {
    if (rng.uniform01() < 0.3) return std::nullopt;
    return v;
  };
  auto draw = [&] {
    // Wide dynamic range, both signs, occasional specials.
    const double u = rng.uniform01();
    if (u < 0.02) return std::numeric_limits<double>::infinity();
    if (u < 0.04) return std::numeric_limits<double>::denorm_min();
    if (u < 0.06) return 0.0;
    return (rng.uniform01() < 0.5 ? -1 : 1) * std::exp(rng.uniform(-700, 700));
  };
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory t;
    const int n = static_cast<int>(rng.uniform01() * 200);
    for (int k = 0; k < n; ++k) {
      TrajectoryRecord r;
      r.k = k;
      r.grad_norm_sq = std::abs(draw());
      r.dist_to_saddle_sq = maybe(std::abs(draw()));
      r.anchor_dist_sq = maybe(std::abs(draw()));
      r.lyapunov = maybe(draw());
      r.alpha_k = draw();
      r.c_k = draw();
      r.gamma_k = draw();
      r.bound = maybe(draw());
      t.push_back(r);
    }
    std::stringstream ss;
    write_trajectory_csv(ss, t);
    REQUIRE(parse_trajectory_csv(ss) == t);
  }
}

TEST_CASE("coordinates round-trip") {
  std::vector<CoordinateRecord> rows = {{0, 1, 1, 1, 1}, {1, 0.25007, 1.24, -3e-17, 1}};
  std::stringstream ss;
  write_coordinates_csv(ss, rows);
  CHECK(ss.str().rfind("k,x,y,xbar,ybar\n", 0) == 0);
  CHECK(parse_coordinates_csv(ss) == rows);
}

TEST_CASE("parser rejects malformed input and skips annotations") {
  std::istringstream no_header("0,1,,,,1,1,0,\n");
  CHECK_THROWS(parse_trajectory_csv(no_header));
  std::istringstream short_row(std::string(kTrajectoryHeader) + "\n0,1,2\n");
  CHECK_THROWS(parse_trajectory_csv(short_row));
  std::istringstream bad_num(std::string(kTrajectoryHeader) + "\n0,x,,,,1,1,0,\n");
  CHECK_THROWS(parse_trajectory_csv(bad_num));
  std::istringstream annotated(std::string(kTrajectoryHeader) +
                               "\n0,1,,,,1,1,0,\n# incomplete: diverged\n");
  CHECK(parse_trajectory_csv(annotated).size() == 1);
}
