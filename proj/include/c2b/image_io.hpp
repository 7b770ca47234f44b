#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c2b/image.hpp"

namespace c2b {

// 8-bit quantization: clamp to [0,1], then round half away from zero.
uint8_t quantize8(double v);

// Reads PGM (P5/P2) as grayscale; PPM (P6/P3) is converted to luminance with
// Rec. 601 weights 0.299/0.587/0.114. Values are normalized by maxval.
Image read_image(const std::string& path);

// Binary PGM (P5), maxval 255.
void write_pgm(const Image& img, const std::string& path);

// All .pgm/.ppm files in the directory, lexicographic name order. Frames must
// share dimensions; an empty directory is an error.
std::vector<Image> load_frame_directory(const std::string& path);

// Writes frames as <prefix>NNN.pgm with zero-padded indices.
std::vector<std::string> write_frames(const VideoCube& video, const std::string& dir,
                                      const std::string& prefix = "frame_");

}  // namespace c2b
