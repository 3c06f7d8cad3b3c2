#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "spxtrack/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spxtrack: long-term superpixel tracking"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string stage = "all";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "run configuration file");
  app.add_option("--stage", stage, "stage to run: segment|fields|track|eval|all");
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--jobs", jobs, "worker thread budget");

  // pipeline subcommands share the --config flow
  for (const char* name : {"segment", "fields", "track", "all"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->parse_complete_callback([&, name] { stage = name; });
  }

  std::string masks_dir, gt_dir, report = "report.csv";
  std::string fields_dir;
  CLI::App* eval = app.add_subcommand("eval", "score masks against ground truth");
  eval->add_option("--masks", masks_dir, "directory of estimated masks")->required();
  eval->add_option("--gt", gt_dir, "directory of ground-truth masks")->required();
  eval->add_option("--fields", fields_dir,
                   "track output directory (enables consistency scoring)");
  eval->add_option("--report", report, "report CSV path");

  CLI11_PARSE(app, argc, argv);

  if (eval->parsed()) {
    std::optional<std::filesystem::path> fields;
    if (!fields_dir.empty()) fields = fields_dir;
    return spxtrack::run_eval(masks_dir, gt_dir, fields, report);
  }

  if (config_path.empty()) {
    std::fprintf(stderr, "config error: --config is required\n");
    return 2;
  }
  spxtrack::CliOverrides overrides;
  overrides.seed = seed;
  overrides.jobs = jobs;
  return spxtrack::run_track(config_path, overrides, stage);
}
