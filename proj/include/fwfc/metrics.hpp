#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwfc/frame.hpp"

namespace fwfc {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    tn += other.tn;
    return *this;
  }
  std::uint64_t total() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion_counts(const Mask& pred, const Mask& gt);

struct MetricsRow {
  std::string video;
  double recall = 0.0;
  double precision = 0.0;
  double fmeasure = 0.0;
};

// R = TP/(TP+FN), P = TP/(TP+FP), F = 2PR/(P+R); degenerate denominators
// yield 0.
MetricsRow metrics_row(const std::string& video, const ConfusionCounts& counts);

struct MetricsReport {
  std::vector<MetricsRow> rows;

  // Unweighted mean over the per-video rows.
  MetricsRow average() const;
};

// CSV with header video,recall,precision,fmeasure and a trailing average row.
void write_report_csv(const MetricsReport& report, const std::string& path);

}  // namespace fwfc
