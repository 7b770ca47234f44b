#include "c2b/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <iterator>

#include "c2b/image_io.hpp"

namespace c2b {

std::vector<VideoCube> window_clips(const std::vector<Image>& frames, int length, int stride) {
  if (length <= 0) throw ValueError("window_clips: length must be positive");
  if (stride == 0) stride = length;
  if (stride < 0) throw ValueError("window_clips: stride must be positive");
  const int n = static_cast<int>(frames.size());
  if (n < length) {
    throw DimensionError("window_clips: " + std::to_string(n) + " frames, need at least " +
                         std::to_string(length));
  }
  std::vector<VideoCube> clips;
  clips.reserve(static_cast<size_t>((n - length) / stride) + 1);
  for (int start = 0; start + length <= n; start += stride) {
    std::vector<Image> window(frames.begin() + start, frames.begin() + start + length);
    clips.emplace_back(std::move(window));
  }
  return clips;
}

std::vector<VideoCube> extract_patches(const VideoCube& clip, int size) {
  if (size <= 0) throw ValueError("extract_patches: size must be positive");
  if (size > clip.height() || size > clip.width()) {
    throw DimensionError("extract_patches: patch " + std::to_string(size) +
                         " exceeds frame " + std::to_string(clip.height()) + "x" +
                         std::to_string(clip.width()));
  }
  const int rows = clip.height() / size;
  const int cols = clip.width() / size;
  std::vector<VideoCube> patches;
  patches.reserve(static_cast<size_t>(rows) * cols);
  for (int py = 0; py < rows; ++py) {
    for (int px = 0; px < cols; ++px) {
      std::vector<Image> frames;
      frames.reserve(clip.length());
      for (int t = 0; t < clip.length(); ++t) {
        Image crop(size, size);
        for (int y = 0; y < size; ++y) {
          for (int x = 0; x < size; ++x) {
            crop.at(y, x) = clip.at(py * size + y, px * size + x, t);
          }
        }
        frames.push_back(std::move(crop));
      }
      patches.emplace_back(std::move(frames));
    }
  }
  return patches;
}

TrainExample make_example(const VideoCube& clip, const TiledCode& code, ModelVariant variant) {
  if (clip.height() != code.height() || clip.width() != code.width()) {
    throw DimensionError("make_example: clip is " + std::to_string(clip.height()) + "x" +
                         std::to_string(clip.width()) + " but the code covers " +
                         std::to_string(code.height()) + "x" + std::to_string(code.width()));
  }
  std::vector<LowResVideo> inputs;
  if (variant == ModelVariant::kPair || variant == ModelVariant::kCoded) {
    inputs.push_back(recover_lowres_coded(encode_coded(clip, code), code));
  }
  if (variant == ModelVariant::kPair || variant == ModelVariant::kBlurred) {
    inputs.push_back(pixel_shuffle_image(encode_blurred(clip), code.base().tile_size()));
  }
  return TrainExample{std::move(inputs), clip};
}

std::vector<VideoCube> load_clip_directory(const std::string& path, int length, int stride) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(path, ec)) throw IoError("not a directory: " + path);

  std::vector<std::string> subdirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) subdirs.push_back(entry.path().string());
  }
  std::sort(subdirs.begin(), subdirs.end());

  std::vector<VideoCube> clips;
  if (subdirs.empty()) {
    clips = window_clips(load_frame_directory(path), length, stride);
  } else {
    for (const std::string& dir : subdirs) {
      std::vector<VideoCube> part = window_clips(load_frame_directory(dir), length, stride);
      std::move(part.begin(), part.end(), std::back_inserter(clips));
    }
  }
  return clips;
}

DatasetSplit split_by_parity(const std::vector<VideoCube>& clips) {
  DatasetSplit out;
  for (size_t i = 0; i < clips.size(); ++i) {
    (i % 2 == 0 ? out.train : out.val).push_back(clips[i]);
  }
  return out;
}

}  // namespace c2b
