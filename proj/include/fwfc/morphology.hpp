#pragma once

#include "fwfc/frame.hpp"

namespace fwfc {

// Binary morphology with a square structuring element of odd side.
// Out-of-bounds neighborhoods count as background for erosion and contribute
// nothing to dilation.
Mask erode(const Mask& mask, int se_side);
Mask dilate(const Mask& mask, int se_side);
Mask open(const Mask& mask, int se_side);
Mask close(const Mask& mask, int se_side);

Mask mask_or(const Mask& a, const Mask& b);
Mask mask_and(const Mask& a, const Mask& b);

struct MorphParams {
  int se1 = 5;  // hole-filling close 1 + erode
  int se2 = 5;  // close + open after recombination
  int se3 = 3;  // final erosion
};

// close/erode, OR with the input, close/open, final erode.
Mask cleanup_chain(const Mask& mask, const MorphParams& params = {});

}  // namespace fwfc
