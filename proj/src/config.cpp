#include "c2b/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace c2b {

namespace {

std::string trim(const std::string& s) {
  size_t lo = 0;
  size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

// Key names are case-insensitive (code.N and code.n are the same key);
// values keep their case.
std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text,
                            const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + text + "'");
}

long long parse_ll(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    bad_value(key, text, "an integer");
  }
  if (used != t.size()) bad_value(key, text, "an integer");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  return static_cast<int>(parse_ll(key, text));
}

uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(t, &used);
  } catch (const std::exception&) {
    bad_value(key, text, "an unsigned integer");
  }
  if (used != t.size() || t.find('-') != std::string::npos) {
    bad_value(key, text, "an unsigned integer");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    bad_value(key, text, "a number");
  }
  if (used != t.size()) bad_value(key, text, "a number");
  return v;
}

std::array<int, 3> parse_widths(const std::string& key, const std::string& text) {
  std::array<int, 3> out{};
  std::stringstream ss(text);
  std::string piece;
  int i = 0;
  while (std::getline(ss, piece, ',')) {
    if (i >= 3) bad_value(key, text, "three comma-separated integers");
    out[i++] = parse_int(key, piece);
  }
  if (i != 3) bad_value(key, text, "three comma-separated integers");
  return out;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.resize(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section '" +
                          line + "'");
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string bare = lower(trim(line.substr(0, eq)));
    if (bare.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    const std::string key = section.empty() ? bare : section + "." + bare;
    const std::string value = trim(line.substr(eq + 1));
    if (!out.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
  }
  return out;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_overrides(ConfigMap& base, const ConfigMap& overrides) {
  for (const auto& [key, value] : overrides) base[key] = value;
}

std::string require_key(const ConfigMap& values, const std::string& key) {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

TrainConfig make_train_config(const ConfigMap& values) {
  TrainConfig cfg;
  ConfigMap rest = values;
  const auto take = [&rest](const std::string& key) {
    std::string out;
    const auto it = rest.find(key);
    if (it != rest.end()) {
      out = it->second;
      rest.erase(it);
    }
    return out;
  };

  if (const std::string v = take("seed"); !v.empty()) cfg.seed = parse_u64("seed", v);
  if (const std::string v = take("code.n"); !v.empty()) cfg.code_n = parse_int("code.n", v);
  if (const std::string v = take("code.t"); !v.empty()) cfg.code_t = parse_int("code.t", v);
  if (const std::string v = take("model.variant"); !v.empty()) cfg.variant = parse_variant(v);
  if (const std::string v = take("model.widths"); !v.empty()) {
    cfg.unet_widths = parse_widths("model.widths", v);
  }
  if (const std::string v = take("model.bottleneck"); !v.empty()) {
    cfg.bottleneck = parse_int("model.bottleneck", v);
  }
  if (const std::string v = take("train.lr"); !v.empty()) cfg.lr = parse_real("train.lr", v);
  if (const std::string v = take("train.lambda"); !v.empty()) {
    cfg.lambda = parse_real("train.lambda", v);
  }
  if (const std::string v = take("train.epochs"); !v.empty()) {
    cfg.epochs = parse_int("train.epochs", v);
  }
  if (const std::string v = take("train.batch"); !v.empty()) {
    cfg.batch = parse_int("train.batch", v);
  }
  if (const std::string v = take("train.max_steps"); !v.empty()) {
    cfg.max_steps = parse_ll("train.max_steps", v);
  }
  if (const std::string v = take("data.patch"); !v.empty()) {
    cfg.patch = parse_int("data.patch", v);
  }
  cfg.frames_dir = take("data.frames");

  if (!rest.empty()) {
    throw ConfigError("unknown config key '" + rest.begin()->first + "'");
  }
  cfg.validate();
  return cfg;
}

void TrainConfig::validate() const {
  if (code_n < 1) throw ConfigError("code.n must be >= 1");
  if (code_t < 1) throw ConfigError("code.t must be >= 1");
  if (code_t != code_n * code_n) {
    throw ConfigError("code.t must equal code.n^2 (pixel shuffle and tile recovery need it)");
  }
  if (lambda < 0.0) throw ConfigError("train.lambda must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (max_steps < 0) throw ConfigError("train.max_steps must be >= 0");
  const int unit = code_n * 8;
  if (patch < unit || patch % unit != 0) {
    throw ConfigError("data.patch must be a positive multiple of code.n * 8 = " +
                      std::to_string(unit) + ", got " + std::to_string(patch));
  }
  model_config().validate();
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.variant = variant;
  m.frames = code_t;
  m.tile = code_n;
  m.unet_widths = unet_widths;
  m.bottleneck = bottleneck;
  return m;
}

}  // namespace c2b
