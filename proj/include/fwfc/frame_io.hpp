#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fwfc/frame.hpp"

namespace fwfc {

// ITU-R BT.601 luma, rounded and clamped to [0,255].
std::uint8_t to_grayscale(int r, int g, int b);

// Top-left crop to the largest size divisible by `factor` in both axes.
Frame crop_to_multiple(const Frame& frame, int factor);
Mask crop_to_multiple(const Mask& mask, int factor);

struct FrameSequence {
  std::vector<Frame> frames;
  std::vector<std::string> source_names;
};

// Image files under `directory` matching `pattern` ('*' and '?' wildcards),
// sorted in ascending numeric order of the filename.
std::vector<std::filesystem::path> list_frame_files(const std::string& directory,
                                                    const std::string& pattern = "*");

// Reads an 8-bit grayscale or 24-bit color raster image; color inputs are
// converted through to_grayscale.
Frame read_frame(const std::filesystem::path& file);

// Loads every matching file; throws on an empty match set or mixed dimensions.
FrameSequence load_frame_sequence(const std::string& directory,
                                  const std::string& pattern = "*");

// Single-channel 8-bit image, foreground = 255, background = 0.
void write_mask(const Mask& mask, const std::string& path);

// Reads a mask image back, thresholding at 128.
Mask read_mask(const std::string& path);

// 8-bit grayscale image output (band dumps, synthetic fixtures).
void write_frame(const Frame& frame, const std::string& path);

}  // namespace fwfc
