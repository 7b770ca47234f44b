#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "c2b/image.hpp"
#include "c2b/rng.hpp"

namespace c2b::testing {

inline Image make_random_image(int h, int w, uint64_t seed) {
  Image img;
  img.height = h;
  img.width = w;
  img.values.resize(static_cast<size_t>(h) * w);
  Rng rng = Rng::split(seed, 0x1111);
  for (double& v : img.values) v = rng.next_double();
  return img;
}

inline VideoCube make_random_video(int h, int w, int t, uint64_t seed) {
  std::vector<Image> frames;
  frames.reserve(static_cast<size_t>(t));
  for (int i = 0; i < t; ++i) frames.push_back(make_random_image(h, w, seed * 1000 + i));
  return VideoCube(std::move(frames));
}

inline Image make_constant_image(int h, int w, double c) {
  Image img;
  img.height = h;
  img.width = w;
  img.values.assign(static_cast<size_t>(h) * w, c);
  return img;
}

inline VideoCube make_constant_video(int h, int w, int t, double c) {
  std::vector<Image> frames(static_cast<size_t>(t), make_constant_image(h, w, c));
  return VideoCube(std::move(frames));
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = std::abs(a.values[i] - b.values[i]);
    if (d > m) m = d;
  }
  return m;
}

inline double max_abs_diff(const VideoCube& a, const VideoCube& b) {
  double m = 0.0;
  for (int t = 0; t < a.length(); ++t) m = std::max(m, max_abs_diff(a.frame(t), b.frame(t)));
  return m;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("c2b_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string sub(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace c2b::testing
