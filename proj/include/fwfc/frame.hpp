#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fwfc {

// 8-bit grayscale image, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), samples(check_dims(w, h), fill) {}

  std::uint8_t& at(int row, int col) {
    return samples[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t at(int row, int col) const {
    return samples[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t size() const { return samples.size(); }

  static std::size_t check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Frame: dimensions must be positive");
    return static_cast<std::size_t>(w) * h;
  }
};

// Double-precision plane with the same layout; holds wavelet coefficients
// and per-pixel likelihood values.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), values(Frame::check_dims(w, h), fill) {}

  double& at(int row, int col) {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  double* row(int r) { return values.data() + static_cast<std::size_t>(r) * width; }
  const double* row(int r) const { return values.data() + static_cast<std::size_t>(r) * width; }
  std::size_t size() const { return values.size(); }
};

// Binary foreground map, values 0/1.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), bits(Frame::check_dims(w, h), fill) {}

  std::uint8_t& at(int row, int col) {
    return bits[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t at(int row, int col) const {
    return bits[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t size() const { return bits.size(); }

  bool operator==(const Mask& other) const {
    return width == other.width && height == other.height && bits == other.bits;
  }
};

template <typename A, typename B>
bool same_size(const A& a, const B& b) {
  return a.width == b.width && a.height == b.height;
}

}  // namespace fwfc
