#include <doctest.h>

#include <random>

#include "fwfc/morphology.hpp"

using namespace fwfc;

namespace {

// direct window-scan definitions, independent of the separable implementation
Mask slow_erode(const Mask& m, int se) {
  const int half = se / 2;
  Mask out(m.width, m.height);
  for (int i = 0; i < m.height; ++i)
    for (int j = 0; j < m.width; ++j) {
      std::uint8_t all = 1;
      for (int di = -half; di <= half && all; ++di)
        for (int dj = -half; dj <= half && all; ++dj) {
          const int ii = i + di, jj = j + dj;
          const std::uint8_t v =
              (ii >= 0 && ii < m.height && jj >= 0 && jj < m.width) ? m.at(ii, jj) : 0;
          if (!v) all = 0;
        }
      out.at(i, j) = all;
    }
  return out;
}

Mask slow_dilate(const Mask& m, int se) {
  const int half = se / 2;
  Mask out(m.width, m.height);
  for (int i = 0; i < m.height; ++i)
    for (int j = 0; j < m.width; ++j) {
      std::uint8_t any = 0;
      for (int di = -half; di <= half && !any; ++di)
        for (int dj = -half; dj <= half && !any; ++dj) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < m.height && jj >= 0 && jj < m.width && m.at(ii, jj)) any = 1;
        }
      out.at(i, j) = any;
    }
  return out;
}

Mask slow_chain(const Mask& mask, const MorphParams& p) {
  const Mask m1 = slow_erode(slow_erode(slow_dilate(mask, p.se1), p.se1), p.se1);
  Mask m2(mask.width, mask.height);
  for (std::size_t i = 0; i < m2.size(); ++i) m2.bits[i] = m1.bits[i] | mask.bits[i];
  const Mask closed = slow_erode(slow_dilate(m2, p.se2), p.se2);
  const Mask m3 = slow_dilate(slow_erode(closed, p.se2), p.se2);
  return slow_erode(m3, p.se3);
}

Mask random_mask(int w, int h, std::mt19937& rng, int fill_mod = 3) {
  Mask m(w, h);
  for (auto& b : m.bits) b = (rng() % fill_mod) == 0 ? 1 : 0;
  return m;
}

bool subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.bits[i] && !b.bits[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("erode zeroes the border of a full mask") {
  const Mask out = erode(Mask(8, 8, 1), 3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const bool interior = i >= 1 && i <= 6 && j >= 1 && j <= 6;
      CHECK(out.at(i, j) == (interior ? 1 : 0));
    }
}

TEST_CASE("dilate grows a single pixel into a block") {
  Mask m(9, 9);
  m.at(4, 4) = 1;
  const Mask out = dilate(m, 3);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      const bool inside = i >= 3 && i <= 5 && j >= 3 && j <= 5;
      CHECK(out.at(i, j) == (inside ? 1 : 0));
    }
}

TEST_CASE("primitives match the direct window scan") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Mask m = random_mask(20, 15, rng);
    for (int se : {1, 3, 5}) {
      CHECK(erode(m, se) == slow_erode(m, se));
      CHECK(dilate(m, se) == slow_dilate(m, se));
    }
  }
}

TEST_CASE("open-close is idempotent") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Mask m = random_mask(24, 24, rng);
    const Mask oc = open(close(m, 3), 3);
    CHECK(open(close(oc, 3), 3) == oc);
  }
}

TEST_CASE("erosion and dilation are dual on interior pixels") {
  std::mt19937 rng(29);
  const int se = 3, half = se / 2;
  for (int trial = 0; trial < 10; ++trial) {
    const Mask m = random_mask(16, 16, rng);
    Mask inverted(16, 16);
    for (std::size_t i = 0; i < m.size(); ++i) inverted.bits[i] = m.bits[i] ? 0 : 1;
    const Mask eroded = erode(m, se);
    const Mask dual = dilate(inverted, se);
    for (int i = half; i < 16 - half; ++i)
      for (int j = half; j < 16 - half; ++j)
        CHECK(eroded.at(i, j) == (dual.at(i, j) ? 0 : 1));
  }
}

TEST_CASE("primitives are monotone and preserve shape") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Mask small = random_mask(18, 14, rng, 4);
    Mask big = small;
    for (auto& b : big.bits)
      if (rng() % 5 == 0) b = 1;
    REQUIRE(subset(small, big));
    for (auto op : {erode, dilate, open, close}) {
      const Mask a = op(small, 3);
      const Mask b = op(big, 3);
      CHECK(a.width == small.width);
      CHECK(a.height == small.height);
      for (auto bit : a.bits) CHECK((bit == 0 || bit == 1));
      CHECK(subset(a, b));
    }
  }
}

TEST_CASE("structuring element validation") {
  const Mask m(8, 8, 1);
  CHECK_THROWS_AS(erode(m, 2), std::invalid_argument);
  CHECK_THROWS_AS(erode(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(erode(m, 9), std::invalid_argument);
  CHECK(erode(m, 1) == m);  // identity element
}

TEST_CASE("cleanup chain on empty and full masks") {
  const Mask empty(20, 20, 0);
  CHECK(cleanup_chain(empty) == empty);

  // a full mask only loses the border carved by the boundary convention
  const Mask full(20, 20, 1);
  const Mask out = cleanup_chain(full);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const bool interior = i >= 3 && i <= 16 && j >= 3 && j <= 16;
      CHECK(out.at(i, j) == (interior ? 1 : 0));
    }
}

TEST_CASE("cleanup chain fills holes and removes speckles") {
  Mask m(20, 20);
  for (int i = 4; i <= 15; ++i)
    for (int j = 4; j <= 15; ++j) m.at(i, j) = 1;
  m.at(9, 9) = 0;   // one-pixel hole
  m.at(1, 1) = 1;   // isolated speckles
  m.at(18, 2) = 1;
  m.at(2, 17) = 1;

  const Mask out = cleanup_chain(m);
  CHECK(out == slow_chain(m, MorphParams{}));
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const bool inside = i >= 5 && i <= 14 && j >= 5 && j <= 14;
      CHECK(out.at(i, j) == (inside ? 1 : 0));
    }
  CHECK(out.at(9, 9) == 1);   // hole filled
  CHECK(out.at(1, 1) == 0);   // speckles gone
  CHECK(out.at(18, 2) == 0);
  CHECK(out.at(2, 17) == 0);
}

TEST_CASE("cleanup chain matches the direct scan on random masks") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Mask m = random_mask(24, 20, rng);
    CHECK(cleanup_chain(m) == slow_chain(m, MorphParams{}));
  }
}
