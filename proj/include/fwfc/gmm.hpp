#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fwfc/swt.hpp"

namespace fwfc {

struct GaussianComponent {
  double weight = 0.0;
  double mean = 0.0;
  double var = 0.0;
};

// Adaptive-mixture settings. The variances are image-domain reference values;
// each bank scales them by its band-to-image variance ratio.
struct GmmParams {
  double learning_rate = 0.005;     // alpha
  int max_components = 5;
  double background_ratio = 0.1;    // c_f: weight mass treated as foreground
  double match_gate = 3.0;          // lambda, in standard deviations
  double prune_weight = 0.01 * 0.005;  // c_prune, default 0.01 * learning_rate
  double var_init = 15.0 * 15.0;
  double var_min = 4.0 * 4.0;
  double var_max = 5.0 * 15.0 * 15.0;
  double mean_boost = 0.05;  // alpha_boost, detail bands only

  void validate() const;
};

// Per-coefficient adaptive Gaussian mixture over one wavelet band.
// Components are kept sorted by descending weight; weights sum to 1 once a
// pixel has seen its first sample.
class GmmBank {
 public:
  GmmBank() = default;
  GmmBank(int width, int height, Band band, int level, const GmmParams& params,
          double scale_ratio);

  // One frame step. Pixels where `skip` is foreground are left untouched.
  void update(const Plane& plane, const Mask* skip = nullptr);

  // Density of the background mixture: the smallest weight-ordered prefix
  // whose cumulative weight exceeds 1 - c_f.
  void background_likelihood(const Plane& plane, Plane& out) const;
  Plane background_likelihood(const Plane& plane) const;

  int width() const { return width_; }
  int height() const { return height_; }
  Band band() const { return band_; }
  int level() const { return level_; }
  const GmmParams& params() const { return params_; }
  double scale_ratio() const { return scale_ratio_; }
  double var_init_scaled() const { return var_init_s_; }
  double var_min_scaled() const { return var_min_s_; }
  double var_max_scaled() const { return var_max_s_; }

  // Effective bounds for a component with mean m (detail bands grow with m^2).
  double effective_var_init(double mean) const;
  double effective_var_min(double mean) const;
  double effective_var_max(double mean) const;

  std::span<const GaussianComponent> components_at(int row, int col) const;
  void set_components_at(int row, int col, std::span<const GaussianComponent> comps);

  void save(std::ostream& out) const;
  static GmmBank load(std::istream& in);

 private:
  void update_pixel(std::size_t px, double x);

  int width_ = 0, height_ = 0;
  Band band_ = Band::A;
  int level_ = 0;
  GmmParams params_;
  double scale_ratio_ = 1.0;
  double var_init_s_ = 0.0, var_min_s_ = 0.0, var_max_s_ = 0.0;
  double boost_ = 0.0;
  std::vector<GaussianComponent> comps_;  // max_components slots per pixel
  std::vector<std::uint8_t> counts_;
};

GmmBank init_bank(int width, int height, Band band, int level,
                  const GmmParams& params, double scale_ratio);

// Foreground coefficient distribution: zero-mean Gaussian for detail bands,
// uniform density for A bands.
struct ForegroundModel {
  Band band = Band::H;
  int level = 1;
  double var_f = 1.0;                    // detail bands
  double uniform_density = 1.0 / 256.0;  // A bands

  double density(double x) const;
};

Plane foreground_likelihood(const ForegroundModel& model, const Plane& plane,
                            Band plane_band);

// Pooled per-band coefficient statistics over the calibration frames.
struct BandStatsTable {
  int levels = 0;
  std::array<std::vector<double>, 4> sigma;  // sigma[band][level-1]
  double sigma_image = 0.0;

  double at(Band band, int level) const {
    return sigma[static_cast<int>(band)][static_cast<std::size_t>(level - 1)];
  }
};

class BandStatsAccumulator {
 public:
  BandStatsAccumulator() = default;
  explicit BandStatsAccumulator(int levels);

  void accumulate(const Plane& frame_plane, const Pyramid& pyramid);
  BandStatsTable finalize() const;  // throws if no frames were accumulated
  int frames() const { return frames_; }
  int levels() const { return levels_; }

  void save(std::ostream& out) const;
  static BandStatsAccumulator load(std::istream& in);

 private:
  int levels_ = 0;
  int frames_ = 0;
  std::vector<double> sum_, sumsq_;  // per plane, index (level-1)*4 + band
  std::vector<long long> count_;
  double img_sum_ = 0.0, img_sumsq_ = 0.0;
  long long img_count_ = 0;
};

BandStatsTable calibrate_band_stats(const std::vector<Frame>& frames, int levels,
                                    Boundary boundary = Boundary::Symmetric);

// Robust white-noise level: median(|values|) / 0.6745 on the level-1
// diagonal band.
double estimate_noise_sigma(const Plane& plane, Band band, int level);

}  // namespace fwfc
