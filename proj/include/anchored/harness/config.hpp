#ifndef ANCHORED_HARNESS_CONFIG_HPP
#define ANCHORED_HARNESS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anchored/types.hpp"

namespace anchored::harness {

/// A configuration problem tied to one key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : "'" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ProblemKind { almost_bilinear, comonotone, game };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::almost_bilinear;
  double eps = 0.01;
  double R = 1.0;
  double rho = -1.0 / 3.0;
  Index m = 50;
  Index k = 100;
  Index n = 250;
  std::uint64_t seed = 1;
};

struct ProximalOptions {
  double t = 1.0;
  double tol = 1e-12;
};

struct ExperimentConfig {
  std::string label = "run";
  ProblemSpec problem;
  Algorithm algorithm = Algorithm::eagv;
  AnchorMode anchor_mode = AnchorMode::moving_pos;
  std::optional<ProximalOptions> proximal;
  Index iters = 2000;
  std::optional<std::vector<double>> z0;
  std::optional<double> alpha0;  // default 0.5 / R, EAG-V only
  double c0 = 1.6449340668482264;  // pi^2 / 6
  double delta_scale = 1.0;
  bool delta_literal = false;
  double e_scale = 1.0;
  std::string output_path = "trajectory.csv";
  bool coords = true;  // 2-D sidecar for 1 x 1 problems
};

/// Ordered (key, value) pairs of a flat `key = value` document.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits a document into pairs. `#` starts a comment; blank lines are
/// skipped; repeated keys are an error.
KeyValues parse_key_values(std::string_view source);

/// Replaces or appends each override.
KeyValues merge(KeyValues base, const KeyValues& overrides);

/// Parses "key=value" as given on the command line.
std::pair<std::string, std::string> parse_override(std::string_view text);

/// Builds a validated config. `problem` and `algorithm` are required;
/// everything else has a default. Unknown keys are rejected.
ExperimentConfig config_from_key_values(const KeyValues& values);

ExperimentConfig parse_config(std::string_view source);

/// Canonical key-value rendering; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

const std::vector<std::string>& known_keys();

std::string_view to_string(ProblemKind kind);

}  // namespace anchored::harness

#endif  // ANCHORED_HARNESS_CONFIG_HPP
