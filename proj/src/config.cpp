#include "fwfc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace fwfc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  const double v = std::stod(value, &pos);
  if (pos != value.size())
    throw std::invalid_argument("config: bad numeric value for " + key + ": " + value);
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  const int v = std::stoi(value, &pos);
  if (pos != value.size())
    throw std::invalid_argument("config: bad integer value for " + key + ": " + value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean value for " + key + ": " + value);
}

}  // namespace

std::optional<double> Config::sigma_f_override(Band band, int level) const {
  for (const SigmaFOverride& o : sigma_f_overrides)
    if (o.band == band && o.level == level) return o.sigma;
  return std::nullopt;
}

void Config::validate() const {
  if (levels < 0 || levels > 16)
    throw std::invalid_argument("config: levels must be in [0,16]");
  if (calibration_frames < 1)
    throw std::invalid_argument("config: calibration_frames must be >= 1");
  if (!(alpha_corr > 0.0 && alpha_corr < 1.0))
    throw std::invalid_argument("config: alpha_corr must be in (0,1)");
  if (beta <= 0.0) throw std::invalid_argument("config: beta must be positive");
  if (sigma_n && *sigma_n < 0.0)
    throw std::invalid_argument("config: sigma_n must be >= 0");
  if (c_foreground <= 0.0)
    throw std::invalid_argument("config: c_foreground must be positive");
  gmm.validate();
  for (int se : {morph.se1, morph.se2, morph.se3})
    if (se < 1 || se % 2 == 0)
      throw std::invalid_argument("config: structuring element sides must be odd and >= 1");
  for (const SigmaFOverride& o : sigma_f_overrides) {
    if (o.sigma <= 0.0)
      throw std::invalid_argument("config: sigma_f overrides must be positive");
    if (o.level < 1 || (levels > 0 && o.level > levels))
      throw std::invalid_argument("config: sigma_f override level out of range");
  }
}

void apply_config_entry(Config& config, const std::string& raw_key,
                        const std::string& value) {
  const std::string key = lower(trim(raw_key));
  if (key == "levels") config.levels = parse_int(key, value);
  else if (key == "boundary") {
    const std::string v = lower(value);
    if (v == "symmetric") config.boundary = Boundary::Symmetric;
    else if (v == "periodic") config.boundary = Boundary::Periodic;
    else throw std::invalid_argument("config: boundary must be symmetric or periodic");
  } else if (key == "calibration_frames") config.calibration_frames = parse_int(key, value);
  else if (key == "alpha_corr") config.alpha_corr = parse_double(key, value);
  else if (key == "beta") config.beta = parse_double(key, value);
  else if (key == "sigma_n") config.sigma_n = parse_double(key, value);
  else if (key == "c_foreground") config.c_foreground = parse_double(key, value);
  else if (key == "combine") {
    const std::string v = lower(value);
    if (v == "or") config.combine = CombineMode::Or;
    else if (v == "and") config.combine = CombineMode::And;
    else throw std::invalid_argument("config: combine must be or/and");
  } else if (key == "ll_levels") {
    const std::string v = lower(value);
    if (v == "all") config.ll_top_only = false;
    else if (v == "top") config.ll_top_only = true;
    else throw std::invalid_argument("config: ll_levels must be all/top");
  } else if (key == "level_fusion") {
    const std::string v = lower(value);
    if (v == "weighted_mean") config.level_fusion = LevelFusion::WeightedMean;
    else if (v == "product") config.level_fusion = LevelFusion::Product;
    else throw std::invalid_argument("config: level_fusion must be weighted_mean/product");
  } else if (key == "selective_update") config.selective_update = parse_bool(key, value);
  else if (key == "learning_rate") config.gmm.learning_rate = parse_double(key, value);
  else if (key == "max_components") config.gmm.max_components = parse_int(key, value);
  else if (key == "background_ratio") config.gmm.background_ratio = parse_double(key, value);
  else if (key == "match_gate") config.gmm.match_gate = parse_double(key, value);
  else if (key == "prune_weight") config.gmm.prune_weight = parse_double(key, value);
  else if (key == "var_init") config.gmm.var_init = parse_double(key, value);
  else if (key == "var_min") config.gmm.var_min = parse_double(key, value);
  else if (key == "var_max") config.gmm.var_max = parse_double(key, value);
  else if (key == "alpha_boost") config.gmm.mean_boost = parse_double(key, value);
  else if (key == "se1") config.morph.se1 = parse_int(key, value);
  else if (key == "se2") config.morph.se2 = parse_int(key, value);
  else if (key == "se3") config.morph.se3 = parse_int(key, value);
  else if (key.rfind("sigma_f_", 0) == 0) {
    // sigma_f_<band>_<level>, e.g. sigma_f_h_3
    const std::string rest = key.substr(8);
    const std::size_t sep = rest.find('_');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= rest.size())
      throw std::invalid_argument("config: expected sigma_f_<band>_<level>, got " + key);
    SigmaFOverride o;
    o.band = band_from_name(rest.substr(0, sep));
    o.level = parse_int(key, rest.substr(sep + 1));
    o.sigma = parse_double(key, value);
    config.sigma_f_overrides.push_back(o);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

void finalize_config(Config& config, bool prune_was_set) {
  if (!prune_was_set) config.gmm.prune_weight = 0.01 * config.gmm.learning_rate;
  config.validate();
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  Config config;
  bool prune_was_set = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: missing '=' at " + path + ":" +
                                  std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: empty key or value at " + path + ":" +
                                  std::to_string(line_no));
    if (lower(key) == "prune_weight") prune_was_set = true;
    apply_config_entry(config, key, value);
  }
  finalize_config(config, prune_was_set);
  return config;
}

}  // namespace fwfc
