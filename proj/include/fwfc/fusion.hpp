#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "fwfc/gmm.hpp"

namespace fwfc {

// First-order autoregressive pixel correlation, rho(delta) = alpha^delta.
double correlation(double distance, double alpha_corr);

// Average correlation between the pixels of the 2^l x 2^l filter support and
// its geometric center.
double translation_weight(int level, double alpha_corr);

// Fraction of band energy attributable to signal: (sigma_dl - sigma_n) /
// sigma_dl, clamped to [0,1]; 0 for a degenerate band.
double noise_weight(double sigma_dl, double sigma_n);

struct FusionWeights {
  int levels = 0;
  double alpha_corr = 0.95;
  std::vector<double> translation;             // w_t[level-1]
  std::array<std::vector<double>, 4> noise;    // w_n[band][level-1]
  std::array<std::vector<double>, 4> combined; // w[band][level-1] = w_t * w_n

  double at(Band band, int level) const {
    return combined[static_cast<int>(band)][static_cast<std::size_t>(level - 1)];
  }
};

FusionWeights compute_fusion_weights(const BandStatsTable& stats, double sigma_n,
                                     double alpha_corr);

// Plain-text diagnostic table of w_t, w_n and w per band/level.
void write_weight_table(const FusionWeights& weights, std::ostream& out);

enum class LevelFusion { WeightedMean, Product };

// Weighted mean across levels: out = (1/N) * sum_l w[l] * plane_l.
Plane fuse_levels(std::span<const Plane> planes, std::span<const double> weights);

// Naive independence product across levels (ablation mode).
Plane fuse_levels_product(std::span<const Plane> planes);

// Likelihood-ratio decision over the three detail band types; products are
// compared as sums of logs with each factor floored at 1e-300. Ties resolve
// to background.
Mask fuse_bands(const Plane& f_h, const Plane& f_v, const Plane& f_d,
                const Plane& b_h, const Plane& b_v, const Plane& b_d);

enum class CombineMode { Or, And };

// Combines the high-frequency decision with the A-band likelihood test.
Mask decide(const Mask& hf_decision, const Plane& f_a, const Plane& b_a,
            CombineMode mode = CombineMode::Or);

}  // namespace fwfc
