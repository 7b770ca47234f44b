#include "c2b/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "c2b/errors.hpp"

namespace fs = std::filesystem;

namespace c2b {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF) throw IoError("truncated image header in " + path);
  std::string tok;
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') {
    while (c != EOF && c != '\n') c = in.get();
  }
  return tok;
}

int parse_header_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = next_token(in, path);
  int value = 0;
  for (char ch : tok) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw IoError(std::string("bad ") + what + " '" + tok + "' in " + path);
    }
    value = value * 10 + (ch - '0');
    if (value > 1 << 20) throw IoError(std::string("unreasonable ") + what + " in " + path);
  }
  if (tok.empty()) throw IoError(std::string("missing ") + what + " in " + path);
  return value;
}

std::vector<int> read_samples(std::istream& in, const std::string& path, bool binary,
                              int maxval, size_t count) {
  std::vector<int> samples(count);
  if (binary) {
    if (maxval > 255) throw IoError("16-bit binary images unsupported: " + path);
    std::vector<unsigned char> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (static_cast<size_t>(in.gcount()) != count) throw IoError("truncated pixel data in " + path);
    for (size_t i = 0; i < count; ++i) samples[i] = raw[i];
  } else {
    for (size_t i = 0; i < count; ++i) samples[i] = parse_header_int(in, path, "pixel value");
  }
  for (size_t i = 0; i < count; ++i) {
    if (samples[i] > maxval) throw IoError("pixel value exceeds maxval in " + path);
  }
  return samples;
}

}  // namespace

uint8_t quantize8(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::floor(c * 255.0 + 0.5));
}

Image read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::string magic = next_token(in, path);
  const bool gray = magic == "P5" || magic == "P2";
  const bool color = magic == "P6" || magic == "P3";
  if (!gray && !color) throw IoError("unsupported image format '" + magic + "' in " + path);
  const bool binary = magic == "P5" || magic == "P6";
  const int width = parse_header_int(in, path, "width");
  const int height = parse_header_int(in, path, "height");
  const int maxval = parse_header_int(in, path, "maxval");
  if (width <= 0 || height <= 0) throw IoError("empty image " + path);
  if (maxval <= 0 || maxval > 65535) throw IoError("bad maxval in " + path);

  Image img;
  img.height = height;
  img.width = width;
  img.values.resize(static_cast<size_t>(height) * width);
  const size_t pixels = img.values.size();
  const auto samples = read_samples(in, path, binary, maxval, color ? pixels * 3 : pixels);
  const double peak = maxval;
  if (gray) {
    for (size_t i = 0; i < pixels; ++i) img.values[i] = samples[i] / peak;
  } else {
    for (size_t i = 0; i < pixels; ++i) {
      const double r = samples[3 * i + 0];
      const double g = samples[3 * i + 1];
      const double b = samples[3 * i + 2];
      img.values[i] = (0.299 * r + 0.587 * g + 0.114 * b) / peak;
    }
  }
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  if (img.height <= 0 || img.width <= 0) throw DimensionError("cannot write empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> raw(img.values.size());
  for (size_t i = 0; i < raw.size(); ++i) raw[i] = quantize8(img.values[i]);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed for " + path);
}

std::vector<Image> load_frame_directory(const std::string& path) {
  if (!fs::is_directory(path)) throw IoError("not a directory: " + path);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm") names.push_back(entry.path().filename().string());
  }
  if (names.empty()) throw IoError("no .pgm/.ppm frames in " + path);
  std::sort(names.begin(), names.end());
  std::vector<Image> frames;
  frames.reserve(names.size());
  for (const auto& name : names) {
    frames.push_back(read_image((fs::path(path) / name).string()));
    if (frames.back().height != frames.front().height ||
        frames.back().width != frames.front().width) {
      throw DimensionError("frame " + name + " dimensions differ from first frame in " + path);
    }
  }
  return frames;
}

std::vector<std::string> write_frames(const VideoCube& video, const std::string& dir,
                                      const std::string& prefix) {
  fs::create_directories(dir);
  std::vector<std::string> paths;
  paths.reserve(static_cast<size_t>(video.length()));
  for (int t = 0; t < video.length(); ++t) {
    char num[16];
    std::snprintf(num, sizeof(num), "%03d", t);
    const std::string path = (fs::path(dir) / (prefix + num + ".pgm")).string();
    write_pgm(video.frame(t), path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace c2b
