#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "anchored/harness/csv.hpp"
#include "anchored/harness/experiment.hpp"
#include "anchored/harness/presets.hpp"

using namespace anchored;
using namespace anchored::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "anchored_experiment_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("fixed-anchor EAG-V experiment") {
  auto c = parse_config("problem = almost_bilinear\nalgorithm = eagv\nanchor_mode = fixed\n");
  c.output_path = scratch("fixed.csv").string();
  const auto r = run_experiment(c);
  CHECK(r.summary.complete);
  CHECK(r.summary.exit_code == 0);
  REQUIRE(r.summary.lyapunov);
  CHECK(r.summary.lyapunov->ok);
  REQUIRE(r.summary.rate);
  CHECK(r.summary.rate->k_min == 100);
  CHECK(r.summary.rate->k_max == 2000);
  CHECK(r.summary.rate->slope <= -1.9);
  CHECK(r.summary.warnings.empty());

  std::ifstream in(c.output_path);
  const auto rows = parse_trajectory_csv(in);
  CHECK(rows.size() == 2001);
  CHECK(rows == r.run.records);
  for (const auto& row : rows) {
    REQUIRE(row.bound);
    REQUIRE(row.grad_norm_sq <= *row.bound);
  }
  CHECK(fs::exists(coords_path_for(c.output_path)));
  std::ifstream cin(coords_path_for(c.output_path));
  CHECK(parse_coordinates_csv(cin).size() == 2001);

  // Byte-identical on a second run.
  const std::string first = slurp(c.output_path);
  run_experiment(c);
  CHECK(slurp(c.output_path) == first);
}

TEST_CASE("hypothesis warnings with the default constants") {
  for (const char* src : {"problem = almost_bilinear\nalgorithm = eagv\n",
                          "problem = comonotone\nalgorithm = feg\n"}) {
    const auto r = execute(parse_config(src));
    CHECK(r.summary.exit_code == 0);
    REQUIRE(r.summary.warnings.size() == 1);
    for (const auto& row : r.run.records) CHECK_FALSE(row.bound);
  }
}

TEST_CASE("rate window follows the iteration count") {
  auto c = parse_config("problem = almost_bilinear\nalgorithm = feg\niters = 4000\n");
  const auto r = execute(c);
  REQUIRE(r.summary.rate);
  CHECK(r.summary.rate->k_min == 200);
  c.iters = 50;
  const auto s = execute(c);
  CHECK_FALSE(s.summary.rate);
  CHECK_FALSE(s.summary.rate_note.empty());
}

TEST_CASE("a failed run flushes an annotated partial CSV") {
  // Literal delta: gamma overflows, the anchor blows up.
  auto c = parse_config(
      "problem = almost_bilinear\nalgorithm = eagv\ndelta_literal = true\niters = 100\n");
  c.output_path = scratch("partial.csv").string();
  const auto r = run_experiment(c);
  CHECK_FALSE(r.summary.complete);
  CHECK(r.summary.exit_code != 0);
  const std::string text = slurp(c.output_path);
  CHECK(text.find("# incomplete:") != std::string::npos);
  std::istringstream in(text);
  CHECK(parse_trajectory_csv(in).size() == r.run.records.size());
}

TEST_CASE("suite runs keep input order") {
  auto configs = preset("comonotone_feg_modes", {{"iters", "300"}, {"output_path", scratch("suite.csv").string()}});
  const auto results = run_suite(configs);
  REQUIRE(results.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(results[i].summary.label == configs[i].label);
    CHECK(results[i].run.records == execute(configs[i]).run.records);
  }
  configs[1].output_path = configs[0].output_path;
  CHECK_THROWS_AS(run_suite(configs), ConfigError);
}

TEST_CASE("summary text") {
  auto c = parse_config("problem = almost_bilinear\nalgorithm = eagv\nanchor_mode = fixed\n");
  const auto r = execute(c);
  std::ostringstream plain, color;
  print_summary(plain, r.summary, false);
  print_summary(color, r.summary, true);
  CHECK(plain.str().find("lyapunov: ok") != std::string::npos);
  CHECK(plain.str().find("\033[") == std::string::npos);
  CHECK(color.str().find("\033[32m") != std::string::npos);

  auto g = parse_config("problem = game\nalgorithm = feg\nm = 3\nk = 4\nn = 5\niters = 200\n");
  std::ostringstream gs;
  print_summary(gs, execute(g).summary, false);
  CHECK(gs.str().find("saddle point unknown") != std::string::npos);
}

TEST_CASE("coords sidecar path") {
  CHECK(coords_path_for("out/run.csv") == "out/run.coords.csv");
  CHECK(coords_path_for("run") == "run.coords.csv");
}
