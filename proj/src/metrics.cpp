#include "fwfc/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fwfc {

ConfusionCounts confusion_counts(const Mask& pred, const Mask& gt) {
  if (!same_size(pred, gt))
    throw std::invalid_argument("confusion_counts: dimension mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.bits[i] != 0;
    const bool g = gt.bits[i] != 0;
    if (p && g) ++c.tp;
    else if (p && !g) ++c.fp;
    else if (!p && g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsRow metrics_row(const std::string& video, const ConfusionCounts& counts) {
  MetricsRow row;
  row.video = video;
  const double tp = static_cast<double>(counts.tp);
  const double recall_den = tp + static_cast<double>(counts.fn);
  const double precision_den = tp + static_cast<double>(counts.fp);
  row.recall = recall_den > 0.0 ? tp / recall_den : 0.0;
  row.precision = precision_den > 0.0 ? tp / precision_den : 0.0;
  const double pr = row.precision + row.recall;
  row.fmeasure = pr > 0.0 ? 2.0 * row.precision * row.recall / pr : 0.0;
  return row;
}

MetricsRow MetricsReport::average() const {
  MetricsRow avg;
  avg.video = "average";
  if (rows.empty()) return avg;
  for (const MetricsRow& r : rows) {
    avg.recall += r.recall;
    avg.precision += r.precision;
    avg.fmeasure += r.fmeasure;
  }
  const double n = static_cast<double>(rows.size());
  avg.recall /= n;
  avg.precision /= n;
  avg.fmeasure /= n;
  return avg;
}

void write_report_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot write " + path);
  out << "video,recall,precision,fmeasure\n";
  char line[256];
  for (const MetricsRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", r.video.c_str(), r.recall,
                  r.precision, r.fmeasure);
    out << line;
  }
  const MetricsRow avg = report.average();
  std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", avg.video.c_str(), avg.recall,
                avg.precision, avg.fmeasure);
  out << line;
}

}  // namespace fwfc
