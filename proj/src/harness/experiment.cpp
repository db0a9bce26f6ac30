#include "anchored/harness/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "anchored/harness/csv.hpp"

namespace anchored::harness {

SaddleProblem<double> build_problem(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::almost_bilinear: return make_almost_bilinear<double>(spec.eps);
    case ProblemKind::comonotone: return make_comonotone_quadratic<double>(spec.R, spec.rho);
    case ProblemKind::game: return make_nonlinear_game<double>(spec.m, spec.k, spec.n, spec.seed);
  }
  throw std::logic_error("build_problem: unknown kind");
}

RunConfig<double> build_run_config(const ExperimentConfig& config,
                                   const SaddleProblem<double>& problem) {
  RunConfig<double> rc;
  rc.settings.algorithm = config.algorithm;
  rc.settings.anchor.mode = config.anchor_mode;
  rc.settings.anchor.c0 = config.c0;
  rc.settings.anchor.delta_scale = config.delta_scale;
  rc.settings.anchor.delta_literal = config.delta_literal;
  rc.settings.anchor.e_scale = config.e_scale;
  rc.settings.alpha0 = config.alpha0;
  if (config.proximal) {
    ProximalSettings<double> p;
    p.t = config.proximal->t;
    p.tol = config.proximal->tol;
    rc.settings.proximal = p;
  }
  rc.iters = config.iters;
  if (config.z0) {
    if (static_cast<Index>(config.z0->size()) != problem.dims().total()) {
      throw ConfigError("z0", "wrong dimension for this problem");
    }
    rc.z0 = Eigen::Map<const Vector<double>>(config.z0->data(),
                                             static_cast<Index>(config.z0->size()));
  }
  rc.record_coordinates = config.coords;
  return rc;
}

namespace {

std::optional<BoundConstants> bound_constants(const ExperimentConfig& config,
                                              const SaddleProblem<double>& problem,
                                              const RunResult<double>& run) {
  const auto& star = problem.saddle_point();
  if (!star) return std::nullopt;
  BoundConstants c;
  c.R = problem.smoothness();
  c.rho = problem.comonotonicity();
  c.c0 = config.c0;
  c.c_inf = AnchorSchedule<double>(AnchorParams<double>{config.anchor_mode, config.c0,
                                                        config.delta_scale, config.delta_literal,
                                                        config.e_scale})
                .c_inf();
  c.dist0_sq = (run.z0 - *star).squaredNorm();
  if (config.algorithm == Algorithm::eagv) {
    c.alpha0 = config.alpha0.value_or(default_alpha0(problem));
    c.alpha_inf = eagv_alpha_limit(c.alpha0, c.R).value;
  }
  return c;
}

std::string rate_window_note(Index iters) { return "window needs iters > 100 (got " + std::to_string(iters) + ")"; }

}  // namespace

ExperimentResult execute(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = config;
  ExperimentSummary& s = result.summary;
  s.label = config.label;

  const SaddleProblem<double> problem = build_problem(config.problem);
  const RunConfig<double> rc = build_run_config(config, problem);
  result.run = run(problem, rc);
  const auto& records = result.run.records;

  s.complete = result.run.complete;
  s.error = result.run.error;
  s.iterations = records.empty() ? 0 : records.back().k;
  s.final_grad_norm_sq = records.empty() ? 0.0 : records.back().grad_norm_sq;

  result.bound_constants = bound_constants(config, problem, result.run);
  if (result.bound_constants) {
    if (const auto kind = bound_kind_for(config.algorithm, config.anchor_mode)) {
      if (!config.proximal) {
        if (auto w = attach_bounds(result.run.records, *kind, *result.bound_constants)) {
          s.warnings.push_back(*w);
        }
      }
    }
    s.lyapunov = check_lyapunov_monotone(records, config.anchor_mode, config.e_scale);
  }

  const Index k_max = s.iterations;
  const Index k_min = std::max<Index>(100, config.iters / 20);
  if (k_min < k_max) {
    try {
      s.rate = rate_slope(records, k_min, k_max);
    } catch (const ExactConvergence& e) {
      s.rate_note = e.what();
    } catch (const std::invalid_argument& e) {
      s.rate_note = e.what();
    }
  } else {
    s.rate_note = rate_window_note(k_max);
  }
  s.exit_code = s.complete ? 0 : 1;
  return result;
}

std::string coords_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  return (p.parent_path() / (p.stem().string() + ".coords.csv")).string();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result = execute(config);
  ExperimentSummary& s = result.summary;

  auto open = [](const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    return os;
  };

  {
    std::ofstream os = open(config.output_path);
    write_trajectory_csv(os, result.run.records);
    if (!s.complete) os << "# incomplete: " << s.error << '\n';
    os.flush();
    if (!os) throw std::runtime_error("write to '" + config.output_path + "' failed");
  }
  s.csv_path = config.output_path;
  if (!result.run.coordinates.empty()) {
    const std::string path = coords_path_for(config.output_path);
    std::ofstream os = open(path);
    write_coordinates_csv(os, result.run.coordinates);
    os.flush();
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
    s.coords_path = path;
  }
  return result;
}

std::vector<ExperimentResult> run_suite(const std::vector<ExperimentConfig>& configs) {
  std::set<std::string> paths;
  for (const auto& c : configs) {
    if (!paths.insert(c.output_path).second) {
      throw ConfigError("output_path", "'" + c.output_path + "' used by more than one run");
    }
  }
  std::vector<std::future<ExperimentResult>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) {
    jobs.push_back(std::async(std::launch::async, [&c] { return run_experiment(c); }));
  }
  std::vector<ExperimentResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

void print_summary(std::ostream& os, const ExperimentSummary& s, bool color) {
  auto paint = [color](const std::string& text, bool good) {
    if (!color) return text;
    return std::string(good ? "\033[32m" : "\033[31m") + text + "\033[0m";
  };
  std::ostringstream out;
  out << std::setprecision(6);
  out << "[" << s.label << "] "
      << paint(s.complete ? "complete" : "incomplete", s.complete) << " (" << s.iterations
      << " iterations)\n";
  if (!s.complete) out << "  error: " << s.error << '\n';
  out << "  final ||G||^2: " << s.final_grad_norm_sq << '\n';
  if (s.rate) {
    out << "  rate slope on [" << s.rate->k_min << ", " << s.rate->k_max
        << "]: " << s.rate->slope << " (r^2 " << s.rate->r_squared << ")\n";
  } else {
    out << "  rate slope: n/a (" << s.rate_note << ")\n";
  }
  if (!s.lyapunov) {
    out << "  lyapunov: n/a (saddle point unknown)\n";
  } else if (!s.lyapunov->applicable) {
    out << "  lyapunov: not applicable for this anchor mode\n";
  } else if (s.lyapunov->ok) {
    out << "  lyapunov: " << paint("ok", true) << '\n';
  } else {
    out << "  lyapunov: " << paint("violated", false) << " first at k = "
        << *s.lyapunov->first_violation << ", max increase " << s.lyapunov->max_increase
        << '\n';
  }
  for (const auto& w : s.warnings) out << "  warning: " << w << '\n';
  if (!s.csv_path.empty()) out << "  csv: " << s.csv_path << '\n';
  if (!s.coords_path.empty()) out << "  coords: " << s.coords_path << '\n';
  out << "  exit: " << s.exit_code << '\n';
  os << out.str();
}

}  // namespace anchored::harness
