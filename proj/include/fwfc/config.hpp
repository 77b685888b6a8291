#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fwfc/fusion.hpp"
#include "fwfc/gmm.hpp"
#include "fwfc/morphology.hpp"

namespace fwfc {

struct SigmaFOverride {
  Band band = Band::H;
  int level = 1;
  double sigma = 0.0;
};

// Every hyperparameter of the pipeline; defaults match the reference
// parameterization. levels = 0 selects the image-domain baseline.
struct Config {
  int levels = 6;
  Boundary boundary = Boundary::Symmetric;
  int calibration_frames = 25;  // K
  double alpha_corr = 0.95;
  double beta = 2.0;                      // sigma_F = beta * sigma_dl
  std::optional<double> sigma_n;          // unset: estimate by MAD on D1
  double c_foreground = 1.0 / 256.0;      // uniform foreground density (A bands)
  CombineMode combine = CombineMode::Or;  // LL/HF combination
  bool ll_top_only = false;               // fuse only the top A level
  LevelFusion level_fusion = LevelFusion::WeightedMean;
  bool selective_update = false;  // skip model update under the previous mask
  GmmParams gmm;
  MorphParams morph;
  std::vector<SigmaFOverride> sigma_f_overrides;

  std::optional<double> sigma_f_override(Band band, int level) const;
  void validate() const;
};

// Line-oriented `key = value` file; '#' starts a comment. Unknown keys are
// an error.
Config parse_config_file(const std::string& path);

// Applies one key/value pair; used by the file parser and CLI overrides.
void apply_config_entry(Config& config, const std::string& key,
                        const std::string& value);

// Recomputes the default prune weight when only the learning rate was set.
void finalize_config(Config& config, bool prune_was_set);

}  // namespace fwfc
