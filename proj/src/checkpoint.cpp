#include "c2b/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "c2b/errors.hpp"

namespace c2b {

namespace {

constexpr char kMagic[4] = {'C', '2', 'B', 'V'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Reader {
  const std::string& data;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > data.size()) throw IoError("truncated checkpoint");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
  bool done() const { return pos == data.size(); }
};

void put_tensor(std::string& out, const std::string& name, const Tensor& t) {
  put_str(out, name);
  put_u32(out, 4);
  put_u64(out, static_cast<uint64_t>(t.b));
  put_u64(out, static_cast<uint64_t>(t.c));
  put_u64(out, static_cast<uint64_t>(t.h));
  put_u64(out, static_cast<uint64_t>(t.w));
  for (float v : t.data) put_f32(out, v);
}

std::pair<std::string, Tensor> read_tensor(Reader& r) {
  std::string name = r.str();
  const uint32_t rank = r.u32();
  if (rank != 4) throw IoError("checkpoint array '" + name + "' has rank " + std::to_string(rank));
  int dims[4];
  for (int& d : dims) {
    const uint64_t v = r.u64();
    if (v == 0 || v > (1u << 30)) {
      throw IoError("checkpoint array '" + name + "' has an implausible dimension");
    }
    d = static_cast<int>(v);
  }
  Tensor t(dims[0], dims[1], dims[2], dims[3]);
  for (float& v : t.data) v = r.f32();
  return {std::move(name), std::move(t)};
}

int hyper_int(const std::map<std::string, std::string>& hyper, const std::string& key) {
  const auto it = hyper.find(key);
  if (it == hyper.end()) throw IoError("checkpoint is missing hyperparameter '" + key + "'");
  try {
    size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing text");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw IoError("checkpoint hyperparameter '" + key + "' is not an integer");
  }
}

int64_t hyper_i64(const std::map<std::string, std::string>& hyper, const std::string& key) {
  const auto it = hyper.find(key);
  if (it == hyper.end()) throw IoError("checkpoint is missing hyperparameter '" + key + "'");
  try {
    return static_cast<int64_t>(std::stoll(it->second));
  } catch (const std::exception&) {
    throw IoError("checkpoint hyperparameter '" + key + "' is not an integer");
  }
}

double hyper_real(const std::map<std::string, std::string>& hyper, const std::string& key) {
  const auto it = hyper.find(key);
  if (it == hyper.end()) throw IoError("checkpoint is missing hyperparameter '" + key + "'");
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == nullptr || *end != '\0') {
    throw IoError("checkpoint hyperparameter '" + key + "' is not a number");
  }
  return v;
}

std::string hyper_str(const std::map<std::string, std::string>& hyper, const std::string& key) {
  const auto it = hyper.find(key);
  if (it == hyper.end()) throw IoError("checkpoint is missing hyperparameter '" + key + "'");
  return it->second;
}

}  // namespace

Adam TrainedState::make_optimizer() const {
  Adam opt(adam, params);
  opt.set_state(adam_m, adam_v, step);
  return opt;
}

TrainedState capture_state(const FusionModel& model, const Adam& optimizer,
                           const std::string& code_text) {
  TrainedState state;
  state.model = model.config();
  state.params = model.params();
  state.adam_m = optimizer.first_moments();
  state.adam_v = optimizer.second_moments();
  state.step = optimizer.steps();
  state.adam = optimizer.config();
  state.code_text = code_text;
  return state;
}

void save_checkpoint(const std::string& path, const TrainedState& state) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kCheckpointVersion);

  std::vector<std::pair<std::string, std::string>> hyper;
  hyper.emplace_back("variant", variant_name(state.model.variant));
  hyper.emplace_back("frames", std::to_string(state.model.frames));
  hyper.emplace_back("tile", std::to_string(state.model.tile));
  hyper.emplace_back("widths", std::to_string(state.model.unet_widths[0]) + "," +
                                   std::to_string(state.model.unet_widths[1]) + "," +
                                   std::to_string(state.model.unet_widths[2]));
  hyper.emplace_back("bottleneck", std::to_string(state.model.bottleneck));
  hyper.emplace_back("step", std::to_string(state.step));
  hyper.emplace_back("adam.lr", real_text(state.adam.lr));
  hyper.emplace_back("adam.beta1", real_text(state.adam.beta1));
  hyper.emplace_back("adam.beta2", real_text(state.adam.beta2));
  hyper.emplace_back("adam.eps", real_text(state.adam.eps));
  hyper.emplace_back("code", state.code_text);
  put_u32(out, static_cast<uint32_t>(hyper.size()));
  for (const auto& [k, v] : hyper) {
    put_str(out, k);
    put_str(out, v);
  }

  if (state.adam_m.size() != state.params.size() || state.adam_v.size() != state.params.size()) {
    throw ValueError("checkpoint: optimizer state does not match parameter count");
  }
  put_u32(out, static_cast<uint32_t>(3 * state.params.size()));
  for (const Param& p : state.params) put_tensor(out, p.name, p.value);
  for (size_t i = 0; i < state.params.size(); ++i) {
    put_tensor(out, "adam.m:" + state.params[i].name, state.adam_m[i]);
  }
  for (size_t i = 0; i < state.params.size(); ++i) {
    put_tensor(out, "adam.v:" + state.params[i].name, state.adam_v[i]);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open checkpoint for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing checkpoint: " + path);
}

TrainedState load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  const std::string data = buf.str();

  Reader r{data};
  r.need(4);
  if (data.compare(0, 4, kMagic, 4) != 0) {
    throw IoError("not a checkpoint file (bad magic): " + path);
  }
  r.pos = 4;
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }

  std::map<std::string, std::string> hyper;
  const uint32_t hyper_count = r.u32();
  for (uint32_t i = 0; i < hyper_count; ++i) {
    std::string k = r.str();
    std::string v = r.str();
    hyper[std::move(k)] = std::move(v);
  }

  TrainedState state;
  try {
    state.model.variant = parse_variant(hyper_str(hyper, "variant"));
  } catch (const ConfigError&) {
    throw IoError("checkpoint has an unknown variant");
  }
  state.model.frames = hyper_int(hyper, "frames");
  state.model.tile = hyper_int(hyper, "tile");
  state.model.bottleneck = hyper_int(hyper, "bottleneck");
  {
    const std::string widths = hyper_str(hyper, "widths");
    std::stringstream ss(widths);
    std::string piece;
    int i = 0;
    while (std::getline(ss, piece, ',') && i < 3) {
      try {
        state.model.unet_widths[i++] = std::stoi(piece);
      } catch (const std::exception&) {
        throw IoError("checkpoint widths are malformed: " + widths);
      }
    }
    if (i != 3) throw IoError("checkpoint widths are malformed: " + widths);
  }
  state.step = hyper_i64(hyper, "step");
  state.adam.lr = static_cast<float>(hyper_real(hyper, "adam.lr"));
  state.adam.beta1 = static_cast<float>(hyper_real(hyper, "adam.beta1"));
  state.adam.beta2 = static_cast<float>(hyper_real(hyper, "adam.beta2"));
  state.adam.eps = static_cast<float>(hyper_real(hyper, "adam.eps"));
  state.code_text = hyper_str(hyper, "code");

  const uint32_t array_count = r.u32();
  if (array_count % 3 != 0) {
    throw IoError("checkpoint array count is not a multiple of three");
  }
  std::vector<std::pair<std::string, Tensor>> arrays;
  arrays.reserve(array_count);
  for (uint32_t i = 0; i < array_count; ++i) arrays.push_back(read_tensor(r));
  if (!r.done()) throw IoError("checkpoint has trailing bytes");

  const size_t n = array_count / 3;
  state.params.reserve(n);
  state.adam_m.reserve(n);
  state.adam_v.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    state.params.emplace_back(arrays[i].first, std::move(arrays[i].second));
  }
  for (size_t i = 0; i < n; ++i) {
    auto& [name, tensor] = arrays[n + i];
    if (name != "adam.m:" + state.params[i].name) {
      throw IoError("checkpoint optimizer arrays are out of order at '" + name + "'");
    }
    state.adam_m.push_back(std::move(tensor));
  }
  for (size_t i = 0; i < n; ++i) {
    auto& [name, tensor] = arrays[2 * n + i];
    if (name != "adam.v:" + state.params[i].name) {
      throw IoError("checkpoint optimizer arrays are out of order at '" + name + "'");
    }
    state.adam_v.push_back(std::move(tensor));
  }
  return state;
}

}  // namespace c2b
