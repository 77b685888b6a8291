#pragma once

#include <array>
#include <string>
#include <vector>

#include "fwfc/frame.hpp"

namespace fwfc {

// The four band types of one 2D wavelet level: A = low-frequency
// approximation ("LL"), H/V/D = horizontal/vertical/diagonal detail
// ("LH"/"HL"/"HH").
enum class Band : int { A = 0, H = 1, V = 2, D = 3 };

constexpr std::array<Band, 4> kAllBands{Band::A, Band::H, Band::V, Band::D};
constexpr std::array<Band, 3> kDetailBands{Band::H, Band::V, Band::D};

const char* band_name(Band band);
Band band_from_name(const std::string& name);

enum class Boundary { Symmetric, Periodic };

// Non-decimated pyramid: 4 planes per level, all at the source resolution.
// The A plane of level l is the filtering input of level l+1.
struct Pyramid {
  int levels = 0;
  int width = 0;
  int height = 0;
  std::vector<Plane> planes;  // index (level-1)*4 + band

  Plane& at(int level, Band band) {
    return planes[static_cast<std::size_t>(level - 1) * 4 + static_cast<int>(band)];
  }
  const Plane& at(int level, Band band) const {
    return planes[static_cast<std::size_t>(level - 1) * 4 + static_cast<int>(band)];
  }
};

Plane frame_to_plane(const Frame& frame);

// N-level a-trous Haar decomposition with mean-preserving taps
// (1/2, 1/2) / (1/2, -1/2) at offsets 0 and 2^(l-1).
Pyramid decompose(const Plane& image, int levels, Boundary boundary = Boundary::Symmetric);
Pyramid decompose(const Frame& frame, int levels, Boundary boundary = Boundary::Symmetric);

// Exact per-level inverse: a + h + v + d pointwise.
Plane reconstruct_level(const Plane& a, const Plane& h, const Plane& v, const Plane& d);

// Population standard deviation of the plane values.
double plane_std(const Plane& plane);

// Debug dump: each plane written as a min/max normalized grayscale image
// named <tag>_<band><level>.png under `directory`.
void dump_band_images(const Pyramid& pyramid, const std::string& directory,
                      const std::string& tag);

}  // namespace fwfc
