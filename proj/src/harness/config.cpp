#include "anchored/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "anchored/harness/csv.hpp"

namespace anchored::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view text) {
  text = trim(text);
  double v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(key, "expected a real number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

long long to_integer(const std::string& key, std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool to_bool(const std::string& key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<double> to_vector(const std::string& key, std::string_view text) {
  std::vector<double> out;
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  if (out.empty()) throw ConfigError(key, "expected at least one number");
  return out;
}

double positive(const std::string& key, double v) {
  if (!(v > 0)) throw ConfigError(key, "must be > 0");
  return v;
}

ProblemKind to_problem(const std::string& key, std::string_view text) {
  text = trim(text);
  if (text == "almost_bilinear") return ProblemKind::almost_bilinear;
  if (text == "comonotone") return ProblemKind::comonotone;
  if (text == "game") return ProblemKind::game;
  throw ConfigError(key, "unknown problem '" + std::string(text) +
                             "' (almost_bilinear, comonotone, game)");
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::almost_bilinear: return "almost_bilinear";
    case ProblemKind::comonotone: return "comonotone";
    case ProblemKind::game: return "game";
  }
  return "?";
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "problem", "eps",      "R",           "rho",      "m",         "k",
      "n",       "seed",     "algorithm",   "anchor_mode", "proximal", "prox_t",
      "prox_tol", "iters",   "z0",          "alpha0",   "c0",        "delta_scale",
      "delta_literal", "e_scale", "output_path", "label", "coords"};
  return keys;
}

KeyValues parse_key_values(std::string_view source) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!source.empty()) {
    ++line_no;
    const auto nl = source.find('\n');
    std::string_view line = source.substr(0, nl);
    source = nl == std::string_view::npos ? std::string_view{} : source.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    for (const auto& [k, v] : out) {
      if (k == key) throw ConfigError(key, "given more than once");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues merge(KeyValues base, const KeyValues& overrides) {
  for (const auto& [key, value] : overrides) {
    auto it = std::find_if(base.begin(), base.end(), [&](const auto& kv) { return kv.first == key; });
    if (it != base.end()) {
      it->second = value;
    } else {
      base.emplace_back(key, value);
    }
  }
  return base;
}

std::pair<std::string, std::string> parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("", "override '" + std::string(text) + "' is not key=value");
  }
  std::string key(trim(text.substr(0, eq)));
  if (key.empty()) throw ConfigError("", "override '" + std::string(text) + "' has an empty key");
  return {key, std::string(trim(text.substr(eq + 1)))};
}

ExperimentConfig config_from_key_values(const KeyValues& values) {
  const auto& keys = known_keys();
  std::map<std::string, std::string> kv;
  for (const auto& [key, value] : values) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(key, "unknown key");
    }
    if (!kv.emplace(key, value).second) throw ConfigError(key, "given more than once");
  }
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  ExperimentConfig c;
  const auto* problem = get("problem");
  if (!problem) throw ConfigError("problem", "required key missing");
  c.problem.kind = to_problem("problem", *problem);
  const auto* algorithm = get("algorithm");
  if (!algorithm) throw ConfigError("algorithm", "required key missing");
  try {
    c.algorithm = parse_algorithm(trim(*algorithm));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("algorithm", e.what());
  }

  // Problem parameters only make sense for their own problem.
  auto reject_foreign = [&](const char* key, bool allowed) {
    if (get(key) && !allowed) {
      throw ConfigError(key, "not a parameter of problem '" +
                                 std::string(to_string(c.problem.kind)) + "'");
    }
  };
  const bool ab = c.problem.kind == ProblemKind::almost_bilinear;
  const bool cq = c.problem.kind == ProblemKind::comonotone;
  const bool gm = c.problem.kind == ProblemKind::game;
  reject_foreign("eps", ab);
  reject_foreign("R", cq);
  reject_foreign("rho", cq);
  for (const char* key : {"m", "k", "n", "seed"}) reject_foreign(key, gm);

  if (const auto* v = get("eps")) c.problem.eps = positive("eps", to_double("eps", *v));
  if (const auto* v = get("R")) c.problem.R = positive("R", to_double("R", *v));
  if (const auto* v = get("rho")) c.problem.rho = to_double("rho", *v);
  if (cq) {
    if (!(c.problem.rho > -1.0 / (2.0 * c.problem.R))) throw ConfigError("rho", "need rho > -1/(2R)");
    if (std::abs(c.problem.rho) * c.problem.R > 1.0) throw ConfigError("rho", "need |rho| R <= 1");
  }
  for (const char* key : {"m", "k", "n"}) {
    if (const auto* v = get(key)) {
      const long long x = to_integer(key, *v);
      if (x < 1) throw ConfigError(key, "must be >= 1");
      (key[0] == 'm' ? c.problem.m : key[0] == 'k' ? c.problem.k : c.problem.n) = x;
    }
  }
  if (const auto* v = get("seed")) {
    const long long s = to_integer("seed", *v);
    if (s < 0) throw ConfigError("seed", "must be >= 0");
    c.problem.seed = static_cast<std::uint64_t>(s);
  }

  if (const auto* v = get("anchor_mode")) {
    try {
      c.anchor_mode = parse_anchor_mode(trim(*v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("anchor_mode", e.what());
    }
  }
  const bool prox = get("proximal") ? to_bool("proximal", *get("proximal")) : false;
  if (!prox && (get("prox_t") || get("prox_tol"))) {
    throw ConfigError(get("prox_t") ? "prox_t" : "prox_tol", "requires proximal = true");
  }
  if (prox) {
    ProximalOptions p;
    if (const auto* v = get("prox_t")) {
      p.t = to_double("prox_t", *v);
      if (p.t < 0) throw ConfigError("prox_t", "must be >= 0");
    }
    if (const auto* v = get("prox_tol")) p.tol = positive("prox_tol", to_double("prox_tol", *v));
    c.proximal = p;
  }
  if (const auto* v = get("iters")) {
    const long long it = to_integer("iters", *v);
    if (it < 0) throw ConfigError("iters", "must be >= 0");
    c.iters = it;
  }
  if (const auto* v = get("z0")) c.z0 = to_vector("z0", *v);
  if (const auto* v = get("alpha0")) {
    if (c.algorithm != Algorithm::eagv) throw ConfigError("alpha0", "only used by eagv");
    c.alpha0 = positive("alpha0", to_double("alpha0", *v));
  }
  if (const auto* v = get("c0")) c.c0 = positive("c0", to_double("c0", *v));
  if (const auto* v = get("delta_scale")) {
    c.delta_scale = positive("delta_scale", to_double("delta_scale", *v));
  }
  if (const auto* v = get("delta_literal")) c.delta_literal = to_bool("delta_literal", *v);
  if (const auto* v = get("e_scale")) c.e_scale = positive("e_scale", to_double("e_scale", *v));
  if (const auto* v = get("output_path")) {
    if (v->empty()) throw ConfigError("output_path", "must not be empty");
    c.output_path = *v;
  }
  if (const auto* v = get("label")) {
    if (v->empty()) throw ConfigError("label", "must not be empty");
    c.label = *v;
  }
  if (const auto* v = get("coords")) c.coords = to_bool("coords", *v);

  // Dimension checks that need the whole config.
  const Index dim = gm ? c.problem.n + c.problem.m : 2;
  if (c.z0 && static_cast<Index>(c.z0->size()) != dim) {
    throw ConfigError("z0", "expected " + std::to_string(dim) + " entries, got " +
                                std::to_string(c.z0->size()));
  }
  if (c.alpha0) {
    const double R = ab ? std::sqrt(1.0 + c.problem.eps * c.problem.eps) : cq ? c.problem.R : 0.0;
    if (R > 0 && !(*c.alpha0 * R < 1.0)) throw ConfigError("alpha0", "need alpha0 < 1/R");
  }
  return c;
}

ExperimentConfig parse_config(std::string_view source) {
  return config_from_key_values(parse_key_values(source));
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "label = " << c.label << '\n';
  os << "problem = " << to_string(c.problem.kind) << '\n';
  switch (c.problem.kind) {
    case ProblemKind::almost_bilinear:
      os << "eps = " << format_double(c.problem.eps) << '\n';
      break;
    case ProblemKind::comonotone:
      os << "R = " << format_double(c.problem.R) << '\n';
      os << "rho = " << format_double(c.problem.rho) << '\n';
      break;
    case ProblemKind::game:
      os << "m = " << c.problem.m << "\nk = " << c.problem.k << "\nn = " << c.problem.n
         << "\nseed = " << c.problem.seed << '\n';
      break;
  }
  os << "algorithm = " << to_string(c.algorithm) << '\n';
  os << "anchor_mode = " << to_string(c.anchor_mode) << '\n';
  os << "proximal = " << (c.proximal ? "true" : "false") << '\n';
  if (c.proximal) {
    os << "prox_t = " << format_double(c.proximal->t) << '\n';
    os << "prox_tol = " << format_double(c.proximal->tol) << '\n';
  }
  os << "iters = " << c.iters << '\n';
  if (c.z0) {
    os << "z0 = ";
    for (std::size_t i = 0; i < c.z0->size(); ++i) os << (i ? ", " : "") << format_double((*c.z0)[i]);
    os << '\n';
  }
  if (c.alpha0) os << "alpha0 = " << format_double(*c.alpha0) << '\n';
  os << "c0 = " << format_double(c.c0) << '\n';
  os << "delta_scale = " << format_double(c.delta_scale) << '\n';
  os << "delta_literal = " << (c.delta_literal ? "true" : "false") << '\n';
  os << "e_scale = " << format_double(c.e_scale) << '\n';
  os << "output_path = " << c.output_path << '\n';
  os << "coords = " << (c.coords ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace anchored::harness
