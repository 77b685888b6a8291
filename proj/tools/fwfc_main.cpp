#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "fwfc/config.hpp"
#include "fwfc/pipeline.hpp"

namespace {

struct RunArgs {
  std::string input, output, gt, config_file, report, dump_bands, checkpoint, dump_weights;
  int levels = -1;
  bool baseline = false;
};

int do_run(const RunArgs& args) {
  fwfc::RunOptions options;
  if (!args.config_file.empty()) options.config = fwfc::parse_config_file(args.config_file);
  if (args.levels >= 0) options.config.levels = args.levels;
  if (args.baseline) options.config.levels = 0;
  options.input_dir = args.input;
  options.output_dir = args.output;
  options.gt_dir = args.gt;
  options.report_path = args.report;
  options.dump_bands_dir = args.dump_bands;
  options.checkpoint_path = args.checkpoint;
  options.weights_path = args.dump_weights;

  const fwfc::RunResult result = fwfc::run_pipeline(options);
  std::printf("processed %d frames\n", result.frames_processed);
  for (const fwfc::MetricsRow& row : result.report.rows)
    std::printf("%s: recall %.4f precision %.4f fmeasure %.4f\n", row.video.c_str(),
                row.recall, row.precision, row.fmeasure);
  return 0;
}

int do_eval(const std::string& pred, const std::string& gt, const std::string& report) {
  const fwfc::MetricsReport result = fwfc::evaluate_directories(pred, gt);
  for (const fwfc::MetricsRow& row : result.rows)
    std::printf("%s: recall %.4f precision %.4f fmeasure %.4f\n", row.video.c_str(),
                row.recall, row.precision, row.fmeasure);
  const fwfc::MetricsRow avg = result.average();
  std::printf("average: recall %.4f precision %.4f fmeasure %.4f\n", avg.recall,
              avg.precision, avg.fmeasure);
  if (!report.empty()) fwfc::write_report_csv(result, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fwfc - camouflaged moving foreground detection in the wavelet domain"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "detect foreground over a frame directory");
  run->add_option("--input", run_args.input, "input frame directory")->required();
  run->add_option("--output", run_args.output, "output mask directory")->required();
  run->add_option("--gt", run_args.gt, "ground-truth mask directory");
  run->add_option("--config", run_args.config_file, "key = value configuration file");
  run->add_option("--levels", run_args.levels, "wavelet levels (0 = image-domain baseline)");
  run->add_flag("--baseline", run_args.baseline, "image-domain GMM baseline (levels = 0)");
  run->add_option("--report", run_args.report, "metrics CSV path (requires --gt)");
  run->add_option("--dump-bands", run_args.dump_bands, "directory for per-band debug images");
  run->add_option("--checkpoint", run_args.checkpoint,
                  "model checkpoint; loaded if present, saved after the run");
  run->add_option("--dump-weights", run_args.dump_weights, "fusion weight table dump path");

  std::string eval_pred, eval_gt, eval_report;
  CLI::App* eval = app.add_subcommand("eval", "score predicted masks against ground truth");
  eval->add_option("--pred", eval_pred, "predicted mask directory")->required();
  eval->add_option("--gt", eval_gt, "ground-truth mask directory")->required();
  eval->add_option("--report", eval_report, "metrics CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(run_args);
    if (eval->parsed()) return do_eval(eval_pred, eval_gt, eval_report);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
