#include "fwfc/morphology.hpp"

#include <stdexcept>

namespace fwfc {

namespace {

void check_se(const Mask& mask, int se_side) {
  if (se_side < 1 || se_side % 2 == 0)
    throw std::invalid_argument("morphology: structuring element side must be odd and >= 1");
  if (se_side > mask.width || se_side > mask.height)
    throw std::invalid_argument("morphology: structuring element larger than mask");
}

// separable min/max filter; out-of-bounds samples are background
template <bool Erode>
Mask square_filter(const Mask& mask, int se_side) {
  const int half = se_side / 2;
  const int w = mask.width, h = mask.height;
  Mask tmp(w, h), out(w, h);
  for (int i = 0; i < h; ++i) {
    const std::uint8_t* src = &mask.bits[static_cast<std::size_t>(i) * w];
    std::uint8_t* dst = &tmp.bits[static_cast<std::size_t>(i) * w];
    for (int j = 0; j < w; ++j) {
      std::uint8_t acc = Erode ? 1 : 0;
      for (int dj = -half; dj <= half; ++dj) {
        const int jj = j + dj;
        const std::uint8_t v = (jj >= 0 && jj < w) ? src[jj] : 0;
        if (Erode) {
          if (!v) { acc = 0; break; }
        } else {
          if (v) { acc = 1; break; }
        }
      }
      dst[j] = acc;
    }
  }
  for (int i = 0; i < h; ++i) {
    std::uint8_t* dst = &out.bits[static_cast<std::size_t>(i) * w];
    for (int j = 0; j < w; ++j) {
      std::uint8_t acc = Erode ? 1 : 0;
      for (int di = -half; di <= half; ++di) {
        const int ii = i + di;
        const std::uint8_t v = (ii >= 0 && ii < h) ? tmp.at(ii, j) : 0;
        if (Erode) {
          if (!v) { acc = 0; break; }
        } else {
          if (v) { acc = 1; break; }
        }
      }
      dst[j] = acc;
    }
  }
  return out;
}

}  // namespace

Mask erode(const Mask& mask, int se_side) {
  check_se(mask, se_side);
  return square_filter<true>(mask, se_side);
}

Mask dilate(const Mask& mask, int se_side) {
  check_se(mask, se_side);
  return square_filter<false>(mask, se_side);
}

Mask open(const Mask& mask, int se_side) { return dilate(erode(mask, se_side), se_side); }

Mask close(const Mask& mask, int se_side) { return erode(dilate(mask, se_side), se_side); }

Mask mask_or(const Mask& a, const Mask& b) {
  if (!same_size(a, b)) throw std::invalid_argument("mask_or: dimension mismatch");
  Mask out(a.width, a.height);
  for (std::size_t i = 0; i < out.size(); ++i) out.bits[i] = a.bits[i] | b.bits[i];
  return out;
}

Mask mask_and(const Mask& a, const Mask& b) {
  if (!same_size(a, b)) throw std::invalid_argument("mask_and: dimension mismatch");
  Mask out(a.width, a.height);
  for (std::size_t i = 0; i < out.size(); ++i) out.bits[i] = a.bits[i] & b.bits[i];
  return out;
}

Mask cleanup_chain(const Mask& mask, const MorphParams& params) {
  const Mask m1 = erode(close(mask, params.se1), params.se1);
  const Mask m2 = mask_or(m1, mask);
  const Mask m3 = open(close(m2, params.se2), params.se2);
  return erode(m3, params.se3);
}

}  // namespace fwfc
