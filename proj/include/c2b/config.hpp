#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "c2b/model.hpp"

namespace c2b {

// Flattened view of an INI-style file: keys inside [section] become
// "section.key", keys before any section keep their bare name. Values are
// kept as text; typed accessors live with the consumers.
using ConfigMap = std::map<std::string, std::string>;

// '#' and ';' start comments; blank lines are skipped; duplicate keys and
// lines that are neither headers nor key=value raise ConfigError with the
// line number.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::string& path);

// Later sources win; used to layer CLI flags over the file.
void apply_overrides(ConfigMap& base, const ConfigMap& overrides);

// Full description of a training run. Defaults are the reference settings;
// desk-scale runs override them through the file or flags.
struct TrainConfig {
  uint64_t seed = 1;
  int code_n = 3;
  int code_t = 9;
  ModelVariant variant = ModelVariant::kPair;
  std::array<int, 3> unet_widths{64, 128, 256};
  int bottleneck = 512;
  double lambda = 0.1;
  double lr = 1e-4;
  int epochs = 200;
  int batch = 64;
  int patch = 240;
  int64_t max_steps = 0;   // 0 means epochs alone decide when to stop
  std::string frames_dir;  // training data; may also arrive via --frames

  void validate() const;
  ModelConfig model_config() const;
};

// Applies recognized keys over the defaults. Unknown keys raise ConfigError
// naming the key, so typos cannot silently fall back to defaults.
TrainConfig make_train_config(const ConfigMap& values);

// Fetches a key that has no default; absence raises ConfigError naming it.
std::string require_key(const ConfigMap& values, const std::string& key);

}  // namespace c2b
