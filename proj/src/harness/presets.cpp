#include "anchored/harness/presets.hpp"

#include <filesystem>

namespace anchored::harness {

namespace {

const KeyValues kAlmostBilinear = {{"problem", "almost_bilinear"}, {"eps", "0.01"}};
const KeyValues kComonotone = {{"problem", "comonotone"}, {"R", "1"}, {"rho", "-0.3333333333333333"}};

KeyValues with(KeyValues base, const KeyValues& extra) { return merge(std::move(base), extra); }

PresetRun run(std::string label, const KeyValues& problem, const char* algorithm,
              const char* mode, const KeyValues& extra = {}) {
  KeyValues v = with(problem, {{"algorithm", algorithm}, {"anchor_mode", mode}, {"iters", "2000"}});
  return {std::move(label), with(std::move(v), extra)};
}

KeyValues game(int m, int k, int n) {
  return {{"problem", "game"},
          {"m", std::to_string(m)},
          {"k", std::to_string(k)},
          {"n", std::to_string(n)},
          {"seed", "20240101"}};
}

std::vector<PresetRun> game_runs(const KeyValues& problem, const char* iters) {
  const KeyValues it = {{"iters", iters}};
  return {run("fixed", problem, "feg", "fixed", it),
          run("neg_delta_0.1", problem, "feg", "moving_neg_naive",
              with(it, {{"delta_scale", "0.1"}})),
          run("neg_delta_0.01", problem, "feg", "moving_neg_naive",
              with(it, {{"delta_scale", "0.01"}}))};
}

std::vector<Preset> build() {
  const auto& ab = kAlmostBilinear;
  return {
      {"bilinear_eagv_fixed", "EAG-V, fixed anchor, almost-bilinear eps = 0.01",
       {run("fixed", ab, "eagv", "fixed")}},
      {"bilinear_eagv_moving", "EAG-V, moving anchor (+gamma), almost-bilinear",
       {run("moving_pos", ab, "eagv", "moving_pos")}},
      {"bilinear_eagv_pos", "EAG-V, +gamma anchor, almost-bilinear", {run("pos", ab, "eagv", "moving_pos")}},
      {"bilinear_eagv_neg", "EAG-V, -gamma anchor, almost-bilinear",
       {run("neg", ab, "eagv", "moving_neg_naive")}},
      {"bilinear_feg_pos", "FEG, +gamma anchor, almost-bilinear", {run("pos", ab, "feg", "moving_pos")}},
      {"bilinear_feg_neg", "FEG, -gamma anchor, almost-bilinear",
       {run("neg", ab, "feg", "moving_neg_naive")}},
      {"bilinear_eagv_modes", "EAG-V fixed / +gamma / -gamma on almost-bilinear",
       {run("fixed", ab, "eagv", "fixed"), run("pos", ab, "eagv", "moving_pos"),
        run("neg", ab, "eagv", "moving_neg_naive")}},
      {"comonotone_feg_modes", "FEG fixed / +gamma / -gamma on the comonotone quadratic (R = 1, rho = -1/3)",
       {run("fixed", kComonotone, "feg", "fixed"), run("pos", kComonotone, "feg", "moving_pos"),
        run("neg", kComonotone, "feg", "moving_neg_naive")}},
      {"game_full", "FEG on the simplex game, m = 500, k = 1000, n = 2500, 20000 iterations",
       game_runs(game(500, 1000, 2500), "20000")},
      {"game_desk", "FEG on the simplex game, m = 50, k = 100, n = 250, 2000 iterations",
       game_runs(game(50, 100, 250), "2000")},
  };
}

bool has_key(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return true;
  }
  return false;
}

std::string splice_label(const std::string& path, const std::string& label) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  return (p.parent_path() / (stem + "_" + label + ext)).string();
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

std::vector<ExperimentConfig> preset(std::string_view name, const KeyValues& overrides) {
  const Preset* found = nullptr;
  for (const auto& p : presets()) {
    if (p.name == name) found = &p;
  }
  if (!found) throw ConfigError("", "unknown preset '" + std::string(name) + "'");
  const bool multi = found->runs.size() > 1;
  if (multi && has_key(overrides, "label")) {
    throw ConfigError("label", "cannot override the label of a multi-run preset");
  }
  std::vector<ExperimentConfig> out;
  for (const auto& r : found->runs) {
    KeyValues v = r.values;
    v.emplace_back("label", r.label);
    v.emplace_back("output_path", found->name + "_" + r.label + ".csv");
    v = merge(std::move(v), overrides);
    if (multi && has_key(overrides, "output_path")) {
      for (auto& [k, val] : v) {
        if (k == "output_path") val = splice_label(val, r.label);
      }
    }
    out.push_back(config_from_key_values(v));
  }
  return out;
}

}  // namespace anchored::harness
