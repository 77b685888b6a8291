#include "fwfc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "fwfc/frame_io.hpp"
#include "serial.hpp"

namespace fwfc {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x43465746;  // "FWFC"
constexpr std::uint32_t kCheckpointVersion = 1;

Mask crop_mask_to(const Mask& mask, int width, int height) {
  if (mask.width == width && mask.height == height) return mask;
  if (mask.width < width || mask.height < height)
    throw std::runtime_error("ground-truth mask smaller than prediction");
  Mask out(width, height);
  for (int i = 0; i < height; ++i)
    std::copy_n(&mask.bits[static_cast<std::size_t>(i) * mask.width], width,
                &out.bits[static_cast<std::size_t>(i) * width]);
  return out;
}

std::string dir_basename(const std::string& dir) {
  fs::path p(dir);
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

}  // namespace

Pipeline::Pipeline(int width, int height, const Config& config)
    : config_(config), width_(width), height_(height) {
  config_.validate();
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("Pipeline: dimensions must be positive");
  if (config_.levels > 0) {
    if (width < (1 << config_.levels) || height < (1 << config_.levels))
      throw std::invalid_argument("Pipeline: frame too small for the level count");
    accumulator_ = BandStatsAccumulator(config_.levels);
  }
  prev_mask_ = Mask(width, height);
}

const GmmBank& Pipeline::bank(Band band, int level) const {
  if (!calibrated_) throw std::runtime_error("Pipeline: banks exist only after calibration");
  if (config_.levels == 0) return banks_.at(0);
  return banks_.at(static_cast<std::size_t>(level - 1) * 4 + static_cast<int>(band));
}

GmmBank& Pipeline::bank_ref(Band band, int level) {
  return const_cast<GmmBank&>(static_cast<const Pipeline*>(this)->bank(band, level));
}

Mask Pipeline::step(const Frame& frame) {
  if (frame.width != width_ || frame.height != height_)
    throw std::invalid_argument("Pipeline::step: frame dimension mismatch");
  const Plane plane = frame_to_plane(frame);
  return config_.levels > 0 ? step_wavelet(plane) : step_baseline(plane);
}

void Pipeline::finalize_calibration() {
  if (config_.levels > 0) {
    stats_ = accumulator_.finalize();
    if (config_.sigma_n) sigma_n_ = *config_.sigma_n;
    weights_ = compute_fusion_weights(stats_, sigma_n_, config_.alpha_corr);

    banks_.clear();
    fg_models_.clear();
    const double img_var = stats_.sigma_image * stats_.sigma_image;
    for (int level = 1; level <= config_.levels; ++level) {
      for (Band band : kAllBands) {
        const double band_sigma = stats_.at(band, level);
        const double ratio = (band_sigma > 0.0 && img_var > 0.0)
                                 ? band_sigma * band_sigma / img_var
                                 : 1.0;
        banks_.emplace_back(width_, height_, band, level, config_.gmm, ratio);

        ForegroundModel fg;
        fg.band = band;
        fg.level = level;
        if (band == Band::A) {
          fg.uniform_density = config_.c_foreground;
        } else {
          double sigma_f = config_.beta * band_sigma;
          if (const auto o = config_.sigma_f_override(band, level)) sigma_f = *o;
          sigma_f = std::max(sigma_f, 1e-6);
          fg.var_f = sigma_f * sigma_f;
        }
        fg_models_.push_back(fg);
      }
    }
  } else {
    if (config_.sigma_n) sigma_n_ = *config_.sigma_n;
    banks_.clear();
    banks_.emplace_back(width_, height_, Band::A, 0, config_.gmm, 1.0);
  }
  calibrated_ = true;
}

Mask Pipeline::step_wavelet(const Plane& plane) {
  const int n = config_.levels;
  if (!calibrated_) {
    const Pyramid pyr = decompose(plane, n, config_.boundary);
    if (frame_index_ == 0 && !config_.sigma_n)
      sigma_n_ = estimate_noise_sigma(pyr.at(1, Band::D), Band::D, 1);
    accumulator_.accumulate(plane, pyr);
    ++frame_index_;
    if (accumulator_.frames() >= config_.calibration_frames) finalize_calibration();
    return Mask(width_, height_);
  }

  pyramid_ = decompose(plane, n, config_.boundary);
  have_pyramid_ = true;
  const Mask* skip = config_.selective_update ? &prev_mask_ : nullptr;

  if (like_f_.empty()) {
    like_f_.assign(static_cast<std::size_t>(n) * 4, Plane(width_, height_));
    like_b_.assign(static_cast<std::size_t>(n) * 4, Plane(width_, height_));
  }

  for (int level = 1; level <= n; ++level) {
    for (Band band : kAllBands) {
      const std::size_t idx =
          static_cast<std::size_t>(level - 1) * 4 + static_cast<int>(band);
      const Plane& coeffs = pyramid_.at(level, band);
      GmmBank& bank = banks_[idx];
      bank.update(coeffs, skip);
      bank.background_likelihood(coeffs, like_b_[idx]);

      const ForegroundModel& fg = fg_models_[idx];
      Plane& lf = like_f_[idx];
      if (band == Band::A) {
        std::fill(lf.values.begin(), lf.values.end(), fg.uniform_density);
      } else {
        for (std::size_t i = 0; i < coeffs.size(); ++i)
          lf.values[i] = fg.density(coeffs.values[i]);
      }
    }
  }

  if (fused_f_.empty()) {
    fused_f_.assign(4, Plane(width_, height_));
    fused_b_.assign(4, Plane(width_, height_));
  }

  std::vector<Plane> level_f, level_b;
  for (Band band : kAllBands) {
    const int b = static_cast<int>(band);
    level_f.clear();
    level_b.clear();
    std::vector<double> w;
    const bool top_only = band == Band::A && config_.ll_top_only;
    const int first = top_only ? n : 1;
    for (int level = first; level <= n; ++level) {
      const std::size_t idx = static_cast<std::size_t>(level - 1) * 4 + b;
      level_f.push_back(like_f_[idx]);
      level_b.push_back(like_b_[idx]);
      w.push_back(weights_.at(band, level));
    }
    if (config_.level_fusion == LevelFusion::Product) {
      fused_f_[b] = fuse_levels_product(level_f);
      fused_b_[b] = fuse_levels_product(level_b);
    } else {
      fused_f_[b] = fuse_levels(level_f, w);
      fused_b_[b] = fuse_levels(level_b, w);
    }
  }

  const Mask hf = fuse_bands(fused_f_[static_cast<int>(Band::H)],
                             fused_f_[static_cast<int>(Band::V)],
                             fused_f_[static_cast<int>(Band::D)],
                             fused_b_[static_cast<int>(Band::H)],
                             fused_b_[static_cast<int>(Band::V)],
                             fused_b_[static_cast<int>(Band::D)]);
  const Mask raw = decide(hf, fused_f_[static_cast<int>(Band::A)],
                          fused_b_[static_cast<int>(Band::A)], config_.combine);
  Mask final_mask = cleanup_chain(raw, config_.morph);
  prev_mask_ = final_mask;
  ++frame_index_;
  return final_mask;
}

Mask Pipeline::step_baseline(const Plane& plane) {
  if (!calibrated_) {
    ++frame_index_;
    if (frame_index_ >= config_.calibration_frames) finalize_calibration();
    return Mask(width_, height_);
  }
  GmmBank& bank = banks_[0];
  bank.update(plane, config_.selective_update ? &prev_mask_ : nullptr);
  if (like_b_.empty()) like_b_.assign(1, Plane(width_, height_));
  bank.background_likelihood(plane, like_b_[0]);
  Mask raw(width_, height_);
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw.bits[i] = config_.c_foreground > like_b_[0].values[i] ? 1 : 0;
  Mask final_mask = cleanup_chain(raw, config_.morph);
  prev_mask_ = final_mask;
  ++frame_index_;
  return final_mask;
}

namespace {

void save_config(std::ostream& out, const Config& c) {
  using detail::write_pod;
  write_pod<std::int32_t>(out, c.levels);
  write_pod<std::int32_t>(out, static_cast<int>(c.boundary));
  write_pod<std::int32_t>(out, c.calibration_frames);
  write_pod(out, c.alpha_corr);
  write_pod(out, c.beta);
  write_pod<std::uint8_t>(out, c.sigma_n.has_value() ? 1 : 0);
  write_pod(out, c.sigma_n.value_or(0.0));
  write_pod(out, c.c_foreground);
  write_pod<std::int32_t>(out, static_cast<int>(c.combine));
  write_pod<std::uint8_t>(out, c.ll_top_only ? 1 : 0);
  write_pod<std::int32_t>(out, static_cast<int>(c.level_fusion));
  write_pod<std::uint8_t>(out, c.selective_update ? 1 : 0);
  write_pod(out, c.gmm.learning_rate);
  write_pod<std::int32_t>(out, c.gmm.max_components);
  write_pod(out, c.gmm.background_ratio);
  write_pod(out, c.gmm.match_gate);
  write_pod(out, c.gmm.prune_weight);
  write_pod(out, c.gmm.var_init);
  write_pod(out, c.gmm.var_min);
  write_pod(out, c.gmm.var_max);
  write_pod(out, c.gmm.mean_boost);
  write_pod<std::int32_t>(out, c.morph.se1);
  write_pod<std::int32_t>(out, c.morph.se2);
  write_pod<std::int32_t>(out, c.morph.se3);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.sigma_f_overrides.size()));
  for (const SigmaFOverride& o : c.sigma_f_overrides) {
    write_pod<std::int32_t>(out, static_cast<int>(o.band));
    write_pod<std::int32_t>(out, o.level);
    write_pod(out, o.sigma);
  }
}

Config load_config(std::istream& in) {
  using detail::read_pod;
  Config c;
  c.levels = read_pod<std::int32_t>(in);
  c.boundary = static_cast<Boundary>(read_pod<std::int32_t>(in));
  c.calibration_frames = read_pod<std::int32_t>(in);
  c.alpha_corr = read_pod<double>(in);
  c.beta = read_pod<double>(in);
  const bool has_sigma_n = read_pod<std::uint8_t>(in) != 0;
  const double sigma_n = read_pod<double>(in);
  if (has_sigma_n) c.sigma_n = sigma_n;
  c.c_foreground = read_pod<double>(in);
  c.combine = static_cast<CombineMode>(read_pod<std::int32_t>(in));
  c.ll_top_only = read_pod<std::uint8_t>(in) != 0;
  c.level_fusion = static_cast<LevelFusion>(read_pod<std::int32_t>(in));
  c.selective_update = read_pod<std::uint8_t>(in) != 0;
  c.gmm.learning_rate = read_pod<double>(in);
  c.gmm.max_components = read_pod<std::int32_t>(in);
  c.gmm.background_ratio = read_pod<double>(in);
  c.gmm.match_gate = read_pod<double>(in);
  c.gmm.prune_weight = read_pod<double>(in);
  c.gmm.var_init = read_pod<double>(in);
  c.gmm.var_min = read_pod<double>(in);
  c.gmm.var_max = read_pod<double>(in);
  c.gmm.mean_boost = read_pod<double>(in);
  c.morph.se1 = read_pod<std::int32_t>(in);
  c.morph.se2 = read_pod<std::int32_t>(in);
  c.morph.se3 = read_pod<std::int32_t>(in);
  const auto n_overrides = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_overrides; ++i) {
    SigmaFOverride o;
    o.band = static_cast<Band>(read_pod<std::int32_t>(in));
    o.level = read_pod<std::int32_t>(in);
    o.sigma = read_pod<double>(in);
    c.sigma_f_overrides.push_back(o);
  }
  return c;
}

void save_stats(std::ostream& out, const BandStatsTable& stats) {
  using detail::write_pod;
  write_pod<std::int32_t>(out, stats.levels);
  for (int b = 0; b < 4; ++b)
    for (double v : stats.sigma[b]) write_pod(out, v);
  write_pod(out, stats.sigma_image);
}

BandStatsTable load_stats(std::istream& in) {
  using detail::read_pod;
  BandStatsTable stats;
  stats.levels = read_pod<std::int32_t>(in);
  for (int b = 0; b < 4; ++b) {
    stats.sigma[b].resize(stats.levels);
    for (double& v : stats.sigma[b]) v = read_pod<double>(in);
  }
  stats.sigma_image = read_pod<double>(in);
  return stats;
}

}  // namespace

void Pipeline::save_checkpoint(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  using detail::write_pod;
  write_pod(out, kCheckpointMagic);
  write_pod(out, kCheckpointVersion);
  save_config(out, config_);
  write_pod<std::int32_t>(out, width_);
  write_pod<std::int32_t>(out, height_);
  write_pod<std::int32_t>(out, frame_index_);
  write_pod<std::uint8_t>(out, calibrated_ ? 1 : 0);
  write_pod(out, sigma_n_);
  if (!calibrated_) {
    if (config_.levels > 0) accumulator_.save(out);
  } else {
    if (config_.levels > 0) save_stats(out, stats_);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(banks_.size()));
    for (const GmmBank& b : banks_) b.save(out);
  }
  out.write(reinterpret_cast<const char*>(prev_mask_.bits.data()),
            static_cast<std::streamsize>(prev_mask_.bits.size()));
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Pipeline Pipeline::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  using detail::read_pod;
  if (read_pod<std::uint32_t>(in) != kCheckpointMagic)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (read_pod<std::uint32_t>(in) != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);
  const Config config = load_config(in);
  const int width = read_pod<std::int32_t>(in);
  const int height = read_pod<std::int32_t>(in);

  Pipeline p(width, height, config);
  p.frame_index_ = read_pod<std::int32_t>(in);
  const bool calibrated = read_pod<std::uint8_t>(in) != 0;
  p.sigma_n_ = read_pod<double>(in);
  if (!calibrated) {
    if (config.levels > 0) p.accumulator_ = BandStatsAccumulator::load(in);
  } else {
    if (config.levels > 0) {
      p.stats_ = load_stats(in);
      p.weights_ = compute_fusion_weights(p.stats_, p.sigma_n_, config.alpha_corr);
    }
    const auto n_banks = read_pod<std::uint32_t>(in);
    p.banks_.clear();
    for (std::uint32_t i = 0; i < n_banks; ++i) p.banks_.push_back(GmmBank::load(in));
    // rebuild the derived foreground models
    if (config.levels > 0) {
      p.fg_models_.clear();
      for (int level = 1; level <= config.levels; ++level) {
        for (Band band : kAllBands) {
          ForegroundModel fg;
          fg.band = band;
          fg.level = level;
          if (band == Band::A) {
            fg.uniform_density = config.c_foreground;
          } else {
            double sigma_f = config.beta * p.stats_.at(band, level);
            if (const auto o = config.sigma_f_override(band, level)) sigma_f = *o;
            sigma_f = std::max(sigma_f, 1e-6);
            fg.var_f = sigma_f * sigma_f;
          }
          p.fg_models_.push_back(fg);
        }
      }
    }
    p.calibrated_ = true;
  }
  in.read(reinterpret_cast<char*>(p.prev_mask_.bits.data()),
          static_cast<std::streamsize>(p.prev_mask_.bits.size()));
  if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
  return p;
}

RunResult run_pipeline(const RunOptions& options) {
  Config config = options.config;
  config.validate();
  if (!options.report_path.empty() && options.gt_dir.empty())
    throw std::invalid_argument("run: a report requires a ground-truth directory");

  const auto files = list_frame_files(options.input_dir);
  fs::create_directories(options.output_dir);
  const int factor = config.levels > 0 ? (1 << config.levels) : 1;

  std::unordered_map<std::string, fs::path> gt_by_stem;
  if (!options.gt_dir.empty())
    for (const auto& p : list_frame_files(options.gt_dir)) gt_by_stem[p.stem().string()] = p;

  std::unique_ptr<Pipeline> pipeline;
  if (!options.checkpoint_path.empty() && fs::exists(options.checkpoint_path))
    pipeline = std::make_unique<Pipeline>(Pipeline::load_checkpoint(options.checkpoint_path));

  RunResult result;
  ConfusionCounts video_counts;
  bool any_gt = false;

  for (const auto& file : files) {
    Frame frame = read_frame(file);
    if (frame.width < factor || frame.height < factor)
      throw std::runtime_error("run: frame smaller than the crop factor: " +
                               file.filename().string());
    frame = crop_to_multiple(frame, factor);
    if (!pipeline) {
      pipeline = std::make_unique<Pipeline>(frame.width, frame.height, config);
    } else if (frame.width != pipeline->width() || frame.height != pipeline->height()) {
      throw std::runtime_error("run: mixed frame dimensions at " + file.filename().string());
    }

    const Mask mask = pipeline->step(frame);
    const std::string stem = file.stem().string();
    write_mask(mask, (fs::path(options.output_dir) / (stem + ".png")).string());

    if (!options.dump_bands_dir.empty() && pipeline->last_pyramid() != nullptr)
      dump_band_images(*pipeline->last_pyramid(), options.dump_bands_dir, stem);

    if (!options.gt_dir.empty()) {
      const auto it = gt_by_stem.find(stem);
      if (it != gt_by_stem.end()) {
        const Mask gt = crop_mask_to(read_mask(it->second.string()), mask.width, mask.height);
        const ConfusionCounts counts = confusion_counts(mask, gt);
        video_counts += counts;
        result.frame_fmeasure.push_back(metrics_row("", counts).fmeasure);
        any_gt = true;
      }
    }
    ++result.frames_processed;
  }

  if (any_gt) {
    result.totals = video_counts;
    result.report.rows.push_back(metrics_row(dir_basename(options.input_dir), video_counts));
  } else if (!options.gt_dir.empty()) {
    throw std::runtime_error("run: no ground-truth frames matched the input");
  }
  if (!options.report_path.empty()) write_report_csv(result.report, options.report_path);

  if (!options.weights_path.empty()) {
    if (pipeline->weights() == nullptr)
      throw std::runtime_error("run: weight dump requires a calibrated wavelet pipeline");
    std::ofstream out(options.weights_path);
    if (!out) throw std::runtime_error("run: cannot write " + options.weights_path);
    write_weight_table(*pipeline->weights(), out);
  }
  if (!options.checkpoint_path.empty()) pipeline->save_checkpoint(options.checkpoint_path);
  return result;
}

MetricsReport evaluate_directories(const std::string& pred_dir, const std::string& gt_dir) {
  if (!fs::is_directory(pred_dir))
    throw std::runtime_error("eval: no such directory: " + pred_dir);
  if (!fs::is_directory(gt_dir))
    throw std::runtime_error("eval: no such directory: " + gt_dir);

  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> videos;
  for (const auto& entry : fs::directory_iterator(pred_dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    const fs::path gt_sub = fs::path(gt_dir) / name;
    if (fs::is_directory(gt_sub))
      videos.emplace_back(name, std::make_pair(entry.path().string(), gt_sub.string()));
  }
  if (videos.empty())
    videos.emplace_back(dir_basename(pred_dir), std::make_pair(pred_dir, gt_dir));
  std::sort(videos.begin(), videos.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  MetricsReport report;
  for (const auto& [name, dirs] : videos) {
    std::unordered_map<std::string, fs::path> pred_by_stem;
    for (const auto& p : list_frame_files(dirs.first)) pred_by_stem[p.stem().string()] = p;
    ConfusionCounts counts;
    for (const auto& gt_file : list_frame_files(dirs.second)) {
      const auto it = pred_by_stem.find(gt_file.stem().string());
      if (it == pred_by_stem.end())
        throw std::runtime_error("eval: missing prediction for " +
                                 gt_file.filename().string());
      const Mask pred = read_mask(it->second.string());
      const Mask gt = crop_mask_to(read_mask(gt_file.string()), pred.width, pred.height);
      counts += confusion_counts(pred, gt);
    }
    report.rows.push_back(metrics_row(name, counts));
  }
  return report;
}

}  // namespace fwfc
