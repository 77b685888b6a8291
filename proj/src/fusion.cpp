#include "fwfc/fusion.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fwfc {

namespace {
constexpr double kLogFloor = 1e-300;
}

double correlation(double distance, double alpha_corr) {
  if (!(alpha_corr > 0.0 && alpha_corr < 1.0))
    throw std::invalid_argument("correlation: alpha_corr must be in (0,1)");
  if (distance < 0.0) throw std::invalid_argument("correlation: negative distance");
  return std::pow(alpha_corr, distance);
}

double translation_weight(int level, double alpha_corr) {
  if (level < 1) throw std::invalid_argument("translation_weight: level must be >= 1");
  if (!(alpha_corr > 0.0 && alpha_corr < 1.0))
    throw std::invalid_argument("translation_weight: alpha_corr must be in (0,1)");
  const int side = 1 << level;
  const double center = (side - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const double dy = i - center;
      const double dx = j - center;
      sum += std::pow(alpha_corr, std::sqrt(dx * dx + dy * dy));
    }
  }
  return sum / (static_cast<double>(side) * side);
}

double noise_weight(double sigma_dl, double sigma_n) {
  if (sigma_dl <= 0.0) return 0.0;
  const double w = (sigma_dl - sigma_n) / sigma_dl;
  return w < 0.0 ? 0.0 : (w > 1.0 ? 1.0 : w);
}

FusionWeights compute_fusion_weights(const BandStatsTable& stats, double sigma_n,
                                     double alpha_corr) {
  FusionWeights w;
  w.levels = stats.levels;
  w.alpha_corr = alpha_corr;
  w.translation.resize(stats.levels);
  for (int l = 1; l <= stats.levels; ++l)
    w.translation[l - 1] = translation_weight(l, alpha_corr);
  for (Band band : kAllBands) {
    const int b = static_cast<int>(band);
    w.noise[b].resize(stats.levels);
    w.combined[b].resize(stats.levels);
    for (int l = 1; l <= stats.levels; ++l) {
      w.noise[b][l - 1] = noise_weight(stats.at(band, l), sigma_n);
      w.combined[b][l - 1] = w.translation[l - 1] * w.noise[b][l - 1];
    }
  }
  return w;
}

void write_weight_table(const FusionWeights& weights, std::ostream& out) {
  char line[128];
  std::snprintf(line, sizeof(line), "alpha_corr %.6f\n", weights.alpha_corr);
  out << line;
  out << "band level w_t w_n w\n";
  for (Band band : kAllBands) {
    const int b = static_cast<int>(band);
    for (int l = 1; l <= weights.levels; ++l) {
      std::snprintf(line, sizeof(line), "%s %d %.6f %.6f %.6f\n", band_name(band), l,
                    weights.translation[l - 1], weights.noise[b][l - 1],
                    weights.combined[b][l - 1]);
      out << line;
    }
  }
}

Plane fuse_levels(std::span<const Plane> planes, std::span<const double> weights) {
  if (planes.empty()) throw std::invalid_argument("fuse_levels: missing level planes");
  if (planes.size() != weights.size())
    throw std::invalid_argument("fuse_levels: weight count mismatch");
  const Plane& first = planes[0];
  for (const Plane& p : planes)
    if (!same_size(p, first)) throw std::invalid_argument("fuse_levels: dimension mismatch");
  Plane out(first.width, first.height);
  const double inv_n = 1.0 / static_cast<double>(planes.size());
  for (std::size_t l = 0; l < planes.size(); ++l) {
    const double w = weights[l] * inv_n;
    const double* src = planes[l].values.data();
    double* dst = out.values.data();
    for (std::size_t i = 0; i < out.size(); ++i) dst[i] += w * src[i];
  }
  return out;
}

Plane fuse_levels_product(std::span<const Plane> planes) {
  if (planes.empty()) throw std::invalid_argument("fuse_levels_product: missing planes");
  const Plane& first = planes[0];
  for (const Plane& p : planes)
    if (!same_size(p, first))
      throw std::invalid_argument("fuse_levels_product: dimension mismatch");
  Plane out(first.width, first.height, 1.0);
  for (const Plane& p : planes)
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= p.values[i];
  return out;
}

Mask fuse_bands(const Plane& f_h, const Plane& f_v, const Plane& f_d,
                const Plane& b_h, const Plane& b_v, const Plane& b_d) {
  if (!same_size(f_h, f_v) || !same_size(f_h, f_d) || !same_size(f_h, b_h) ||
      !same_size(f_h, b_v) || !same_size(f_h, b_d))
    throw std::invalid_argument("fuse_bands: dimension mismatch");
  Mask out(f_h.width, f_h.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double lf = std::log(std::max(f_h.values[i], kLogFloor)) +
                      std::log(std::max(f_v.values[i], kLogFloor)) +
                      std::log(std::max(f_d.values[i], kLogFloor));
    const double lb = std::log(std::max(b_h.values[i], kLogFloor)) +
                      std::log(std::max(b_v.values[i], kLogFloor)) +
                      std::log(std::max(b_d.values[i], kLogFloor));
    out.bits[i] = lf > lb ? 1 : 0;
  }
  return out;
}

Mask decide(const Mask& hf_decision, const Plane& f_a, const Plane& b_a,
            CombineMode mode) {
  if (!same_size(hf_decision, f_a) || !same_size(hf_decision, b_a))
    throw std::invalid_argument("decide: dimension mismatch");
  Mask out(hf_decision.width, hf_decision.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t ll = f_a.values[i] > b_a.values[i] ? 1 : 0;
    out.bits[i] = mode == CombineMode::Or ? (hf_decision.bits[i] | ll)
                                          : (hf_decision.bits[i] & ll);
  }
  return out;
}

}  // namespace fwfc
