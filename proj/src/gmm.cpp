#include "fwfc/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "serial.hpp"

namespace fwfc {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_density(double x, double mean, double var) {
  const double d = x - mean;
  return kInvSqrt2Pi / std::sqrt(var) * std::exp(-0.5 * d * d / var);
}

}  // namespace

void GmmParams::validate() const {
  if (learning_rate <= 0.0 || learning_rate >= 1.0)
    throw std::invalid_argument("gmm: learning_rate must be in (0,1)");
  if (max_components < 1 || max_components > 255)
    throw std::invalid_argument("gmm: max_components must be in [1,255]");
  if (background_ratio <= 0.0 || background_ratio >= 1.0)
    throw std::invalid_argument("gmm: background_ratio must be in (0,1)");
  if (match_gate <= 0.0) throw std::invalid_argument("gmm: match_gate must be positive");
  if (prune_weight < 0.0 || prune_weight >= 1.0)
    throw std::invalid_argument("gmm: prune_weight must be in [0,1)");
  if (var_min <= 0.0 || var_init < var_min || var_max < var_init)
    throw std::invalid_argument("gmm: need 0 < var_min <= var_init <= var_max");
  if (mean_boost < 0.0) throw std::invalid_argument("gmm: mean_boost must be >= 0");
}

GmmBank::GmmBank(int width, int height, Band band, int level, const GmmParams& params,
                 double scale_ratio)
    : width_(width),
      height_(height),
      band_(band),
      level_(level),
      params_(params),
      scale_ratio_(scale_ratio) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("GmmBank: dimensions must be positive");
  if (!(scale_ratio > 0.0))
    throw std::invalid_argument("GmmBank: scale_ratio must be positive");
  params_.validate();
  var_init_s_ = params_.var_init * scale_ratio_;
  var_min_s_ = params_.var_min * scale_ratio_;
  var_max_s_ = params_.var_max * scale_ratio_;
  boost_ = band == Band::A ? 0.0 : params_.mean_boost;
  comps_.assign(static_cast<std::size_t>(width) * height * params_.max_components, {});
  counts_.assign(static_cast<std::size_t>(width) * height, 0);
}

double GmmBank::effective_var_init(double mean) const {
  return var_init_s_ + boost_ * mean * mean;
}
double GmmBank::effective_var_min(double mean) const {
  return var_min_s_ + boost_ * mean * mean;
}
double GmmBank::effective_var_max(double mean) const {
  return var_max_s_ + boost_ * mean * mean;
}

void GmmBank::update_pixel(std::size_t px, double x) {
  GaussianComponent* c = comps_.data() + px * params_.max_components;
  int n = counts_[px];
  const double alpha = params_.learning_rate;

  if (n == 0) {
    c[0] = {1.0, x, effective_var_init(x)};
    counts_[px] = 1;
    return;
  }

  // nearest component passing the gate (x - mu)^2 < lambda^2 * var
  const double gate2 = params_.match_gate * params_.match_gate;
  int match = -1;
  double best = std::numeric_limits<double>::max();
  for (int k = 0; k < n; ++k) {
    const double d = x - c[k].mean;
    const double d2 = d * d;
    if (d2 < gate2 * c[k].var && d2 < best) {
      best = d2;
      match = k;
    }
  }

  const double decay = alpha * params_.prune_weight;
  if (match >= 0) {
    for (int k = 0; k < n; ++k) {
      const double o = k == match ? 1.0 : 0.0;
      c[k].weight += alpha * (o - c[k].weight) - decay;
    }
    GaussianComponent& m = c[match];
    const double step = alpha / m.weight;
    const double d = x - m.mean;
    m.mean += step * d;
    m.var += step * (d * d - m.var);
    m.var = std::clamp(m.var, effective_var_min(m.mean), effective_var_max(m.mean));
  } else {
    for (int k = 0; k < n; ++k) c[k].weight = c[k].weight * (1.0 - alpha) - decay;
    if (n == params_.max_components) --n;  // smallest weight sits last
    c[n] = {alpha, x, effective_var_init(x)};
    ++n;
  }

  // drop exhausted components, renormalize, restore weight order
  int kept = 0;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    if (c[k].weight > 0.0) {
      c[kept++] = c[k];
      total += c[k].weight;
    }
  }
  n = kept;
  if (total > 0.0)
    for (int k = 0; k < n; ++k) c[k].weight /= total;
  for (int k = 1; k < n; ++k) {  // insertion sort, descending weight
    const GaussianComponent tmp = c[k];
    int j = k - 1;
    while (j >= 0 && c[j].weight < tmp.weight) {
      c[j + 1] = c[j];
      --j;
    }
    c[j + 1] = tmp;
  }
  counts_[px] = static_cast<std::uint8_t>(n);
}

void GmmBank::update(const Plane& plane, const Mask* skip) {
  if (plane.width != width_ || plane.height != height_)
    throw std::invalid_argument("GmmBank::update: plane dimension mismatch");
  if (skip != nullptr && (skip->width != width_ || skip->height != height_))
    throw std::invalid_argument("GmmBank::update: skip mask dimension mismatch");
  const std::size_t total = plane.size();
  if (skip == nullptr) {
    for (std::size_t px = 0; px < total; ++px) update_pixel(px, plane.values[px]);
  } else {
    for (std::size_t px = 0; px < total; ++px)
      if (!skip->bits[px]) update_pixel(px, plane.values[px]);
  }
}

void GmmBank::background_likelihood(const Plane& plane, Plane& out) const {
  if (plane.width != width_ || plane.height != height_)
    throw std::invalid_argument("GmmBank::background_likelihood: dimension mismatch");
  if (out.width != width_ || out.height != height_) out = Plane(width_, height_);
  const double threshold = 1.0 - params_.background_ratio;
  const std::size_t total = plane.size();
  for (std::size_t px = 0; px < total; ++px) {
    const GaussianComponent* c = comps_.data() + px * params_.max_components;
    const int n = counts_[px];
    const double x = plane.values[px];
    double density = 0.0, cumulative = 0.0;
    for (int k = 0; k < n; ++k) {
      density += c[k].weight * normal_density(x, c[k].mean, c[k].var);
      cumulative += c[k].weight;
      if (cumulative > threshold) break;
    }
    out.values[px] = density;
  }
}

Plane GmmBank::background_likelihood(const Plane& plane) const {
  Plane out(width_, height_);
  background_likelihood(plane, out);
  return out;
}

std::span<const GaussianComponent> GmmBank::components_at(int row, int col) const {
  const std::size_t px = static_cast<std::size_t>(row) * width_ + col;
  return {comps_.data() + px * params_.max_components, counts_[px]};
}

void GmmBank::set_components_at(int row, int col,
                                std::span<const GaussianComponent> comps) {
  if (comps.size() > static_cast<std::size_t>(params_.max_components))
    throw std::invalid_argument("set_components_at: too many components");
  const std::size_t px = static_cast<std::size_t>(row) * width_ + col;
  std::copy(comps.begin(), comps.end(), comps_.begin() + px * params_.max_components);
  counts_[px] = static_cast<std::uint8_t>(comps.size());
}

void GmmBank::save(std::ostream& out) const {
  using detail::write_pod;
  write_pod<std::int32_t>(out, width_);
  write_pod<std::int32_t>(out, height_);
  write_pod<std::int32_t>(out, static_cast<int>(band_));
  write_pod<std::int32_t>(out, level_);
  write_pod(out, params_.learning_rate);
  write_pod<std::int32_t>(out, params_.max_components);
  write_pod(out, params_.background_ratio);
  write_pod(out, params_.match_gate);
  write_pod(out, params_.prune_weight);
  write_pod(out, params_.var_init);
  write_pod(out, params_.var_min);
  write_pod(out, params_.var_max);
  write_pod(out, params_.mean_boost);
  write_pod(out, scale_ratio_);
  out.write(reinterpret_cast<const char*>(counts_.data()),
            static_cast<std::streamsize>(counts_.size()));
  for (std::size_t px = 0; px < counts_.size(); ++px) {
    const GaussianComponent* c = comps_.data() + px * params_.max_components;
    out.write(reinterpret_cast<const char*>(c),
              static_cast<std::streamsize>(sizeof(GaussianComponent) * counts_[px]));
  }
}

GmmBank GmmBank::load(std::istream& in) {
  using detail::read_pod;
  const int width = read_pod<std::int32_t>(in);
  const int height = read_pod<std::int32_t>(in);
  const Band band = static_cast<Band>(read_pod<std::int32_t>(in));
  const int level = read_pod<std::int32_t>(in);
  GmmParams params;
  params.learning_rate = read_pod<double>(in);
  params.max_components = read_pod<std::int32_t>(in);
  params.background_ratio = read_pod<double>(in);
  params.match_gate = read_pod<double>(in);
  params.prune_weight = read_pod<double>(in);
  params.var_init = read_pod<double>(in);
  params.var_min = read_pod<double>(in);
  params.var_max = read_pod<double>(in);
  params.mean_boost = read_pod<double>(in);
  const double ratio = read_pod<double>(in);
  GmmBank bank(width, height, band, level, params, ratio);
  in.read(reinterpret_cast<char*>(bank.counts_.data()),
          static_cast<std::streamsize>(bank.counts_.size()));
  if (!in) throw std::runtime_error("checkpoint: truncated bank counts");
  for (std::size_t px = 0; px < bank.counts_.size(); ++px) {
    GaussianComponent* c = bank.comps_.data() + px * params.max_components;
    if (bank.counts_[px] > params.max_components)
      throw std::runtime_error("checkpoint: corrupt component count");
    in.read(reinterpret_cast<char*>(c),
            static_cast<std::streamsize>(sizeof(GaussianComponent) * bank.counts_[px]));
    if (!in) throw std::runtime_error("checkpoint: truncated bank components");
  }
  return bank;
}

GmmBank init_bank(int width, int height, Band band, int level, const GmmParams& params,
                  double scale_ratio) {
  return GmmBank(width, height, band, level, params, scale_ratio);
}

double ForegroundModel::density(double x) const {
  if (band == Band::A) return uniform_density;
  return normal_density(x, 0.0, var_f);
}

Plane foreground_likelihood(const ForegroundModel& model, const Plane& plane,
                            Band plane_band) {
  if (model.band != plane_band)
    throw std::invalid_argument("foreground_likelihood: band mismatch");
  Plane out(plane.width, plane.height);
  if (model.band == Band::A) {
    std::fill(out.values.begin(), out.values.end(), model.uniform_density);
  } else {
    for (std::size_t i = 0; i < plane.size(); ++i)
      out.values[i] = normal_density(plane.values[i], 0.0, model.var_f);
  }
  return out;
}

BandStatsAccumulator::BandStatsAccumulator(int levels) : levels_(levels) {
  if (levels < 1) throw std::invalid_argument("BandStatsAccumulator: levels must be >= 1");
  sum_.assign(static_cast<std::size_t>(levels) * 4, 0.0);
  sumsq_.assign(static_cast<std::size_t>(levels) * 4, 0.0);
  count_.assign(static_cast<std::size_t>(levels) * 4, 0);
}

void BandStatsAccumulator::accumulate(const Plane& frame_plane, const Pyramid& pyramid) {
  if (pyramid.levels != levels_)
    throw std::invalid_argument("BandStatsAccumulator: level count mismatch");
  ++frames_;
  for (double v : frame_plane.values) {
    img_sum_ += v;
    img_sumsq_ += v * v;
  }
  img_count_ += static_cast<long long>(frame_plane.size());
  for (int level = 1; level <= levels_; ++level) {
    for (Band band : kAllBands) {
      const Plane& p = pyramid.at(level, band);
      const std::size_t idx = static_cast<std::size_t>(level - 1) * 4 + static_cast<int>(band);
      double s = 0.0, ss = 0.0;
      for (double v : p.values) {
        s += v;
        ss += v * v;
      }
      sum_[idx] += s;
      sumsq_[idx] += ss;
      count_[idx] += static_cast<long long>(p.size());
    }
  }
}

namespace {
double pooled_std(double sum, double sumsq, long long count) {
  if (count <= 0) return 0.0;
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}
}  // namespace

BandStatsTable BandStatsAccumulator::finalize() const {
  if (frames_ == 0) throw std::runtime_error("calibration: empty calibration set");
  BandStatsTable table;
  table.levels = levels_;
  for (int b = 0; b < 4; ++b) table.sigma[b].assign(levels_, 0.0);
  for (int level = 1; level <= levels_; ++level) {
    for (Band band : kAllBands) {
      const std::size_t idx = static_cast<std::size_t>(level - 1) * 4 + static_cast<int>(band);
      table.sigma[static_cast<int>(band)][level - 1] =
          pooled_std(sum_[idx], sumsq_[idx], count_[idx]);
    }
  }
  table.sigma_image = pooled_std(img_sum_, img_sumsq_, img_count_);
  return table;
}

void BandStatsAccumulator::save(std::ostream& out) const {
  using detail::write_pod;
  write_pod<std::int32_t>(out, levels_);
  write_pod<std::int32_t>(out, frames_);
  for (double v : sum_) write_pod(out, v);
  for (double v : sumsq_) write_pod(out, v);
  for (long long v : count_) write_pod(out, v);
  write_pod(out, img_sum_);
  write_pod(out, img_sumsq_);
  write_pod(out, img_count_);
}

BandStatsAccumulator BandStatsAccumulator::load(std::istream& in) {
  using detail::read_pod;
  const int levels = read_pod<std::int32_t>(in);
  BandStatsAccumulator acc(levels);
  acc.frames_ = read_pod<std::int32_t>(in);
  for (double& v : acc.sum_) v = read_pod<double>(in);
  for (double& v : acc.sumsq_) v = read_pod<double>(in);
  for (long long& v : acc.count_) v = read_pod<long long>(in);
  acc.img_sum_ = read_pod<double>(in);
  acc.img_sumsq_ = read_pod<double>(in);
  acc.img_count_ = read_pod<long long>(in);
  return acc;
}

BandStatsTable calibrate_band_stats(const std::vector<Frame>& frames, int levels,
                                    Boundary boundary) {
  if (frames.empty()) throw std::invalid_argument("calibrate_band_stats: empty calibration set");
  BandStatsAccumulator acc(levels);
  for (const Frame& f : frames) {
    const Plane p = frame_to_plane(f);
    acc.accumulate(p, decompose(p, levels, boundary));
  }
  return acc.finalize();
}

double estimate_noise_sigma(const Plane& plane, Band band, int level) {
  if (band != Band::D || level != 1)
    throw std::invalid_argument("estimate_noise_sigma: expects the level-1 D band");
  if (plane.size() == 0) throw std::invalid_argument("estimate_noise_sigma: empty plane");
  std::vector<double> mag(plane.size());
  for (std::size_t i = 0; i < plane.size(); ++i) mag[i] = std::fabs(plane.values[i]);
  const std::size_t n = mag.size();
  const std::size_t mid = n / 2;
  std::nth_element(mag.begin(), mag.begin() + mid, mag.end());
  double median = mag[mid];
  if (n % 2 == 0) {
    std::nth_element(mag.begin(), mag.begin() + (mid - 1), mag.begin() + mid);
    median = 0.5 * (median + mag[mid - 1]);
  }
  return median / 0.6745;
}

}  // namespace fwfc
