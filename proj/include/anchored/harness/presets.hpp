#ifndef ANCHORED_HARNESS_PRESETS_HPP
#define ANCHORED_HARNESS_PRESETS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "anchored/harness/config.hpp"

namespace anchored::harness {

struct PresetRun {
  std::string label;
  KeyValues values;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetRun> runs;
};

const std::vector<Preset>& presets();

/// Resolves a preset into one config per run. User overrides win over every
/// preset value. Each run writes `<preset>_<label>.csv` unless output_path
/// is overridden; with several runs the label is then spliced in before the
/// extension so the files stay distinct.
std::vector<ExperimentConfig> preset(std::string_view name, const KeyValues& overrides = {});

}  // namespace anchored::harness

#endif  // ANCHORED_HARNESS_PRESETS_HPP
