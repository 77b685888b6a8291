#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwfc/config.hpp"
#include "fwfc/metrics.hpp"

namespace fwfc {

// Streaming per-frame processor. The first K frames calibrate the band
// statistics and produce empty masks; models start at frame K and update on
// every subsequent frame.
class Pipeline {
 public:
  Pipeline(int width, int height, const Config& config);

  // Frame dimensions must equal the construction dimensions (crop upstream).
  Mask step(const Frame& frame);

  int width() const { return width_; }
  int height() const { return height_; }
  int frame_index() const { return frame_index_; }
  bool calibrated() const { return calibrated_; }
  const Config& config() const { return config_; }

  // Available once calibrated (wavelet mode only for stats/weights).
  const BandStatsTable* stats() const { return calibrated_ && config_.levels > 0 ? &stats_ : nullptr; }
  const FusionWeights* weights() const { return calibrated_ && config_.levels > 0 ? &weights_ : nullptr; }
  double sigma_n() const { return sigma_n_; }
  const GmmBank& bank(Band band, int level) const;
  const Pyramid* last_pyramid() const { return config_.levels > 0 && have_pyramid_ ? &pyramid_ : nullptr; }

  void save_checkpoint(const std::string& path) const;
  static Pipeline load_checkpoint(const std::string& path);

 private:
  Pipeline() = default;
  Mask step_wavelet(const Plane& plane);
  Mask step_baseline(const Plane& plane);
  void finalize_calibration();
  GmmBank& bank_ref(Band band, int level);

  Config config_;
  int width_ = 0, height_ = 0;
  int frame_index_ = 0;
  bool calibrated_ = false;
  bool have_pyramid_ = false;
  double sigma_n_ = 0.0;

  BandStatsAccumulator accumulator_;
  BandStatsTable stats_;
  FusionWeights weights_;
  std::vector<GmmBank> banks_;  // (level-1)*4 + band; single bank in baseline
  std::vector<ForegroundModel> fg_models_;
  Pyramid pyramid_;
  Mask prev_mask_;  // selective update support

  // scratch planes reused across frames
  std::vector<Plane> like_f_, like_b_;
  std::vector<Plane> fused_f_, fused_b_;
};

struct RunOptions {
  std::string input_dir;
  std::string output_dir;
  std::string gt_dir;          // optional
  std::string report_path;     // optional CSV
  std::string dump_bands_dir;  // optional per-frame band dumps
  std::string checkpoint_path; // load if present, saved after the run
  std::string weights_path;    // optional weight-table dump
  Config config;
};

struct RunResult {
  int frames_processed = 0;
  ConfusionCounts totals;
  MetricsReport report;               // one video row; empty without gt
  std::vector<double> frame_fmeasure; // per ground-truthed frame, in order
};

// Full pipeline over a frame directory: crop, grayscale, detect, write masks,
// evaluate against ground truth where present.
RunResult run_pipeline(const RunOptions& options);

// Standalone mask evaluation. If pred/gt contain matching subdirectories,
// each subdirectory is scored as one video; otherwise the directories form a
// single video. Pairs are matched by filename stem.
MetricsReport evaluate_directories(const std::string& pred_dir,
                                   const std::string& gt_dir);

}  // namespace fwfc
