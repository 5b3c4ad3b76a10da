#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feedersim/feedersim.hpp"

namespace {

std::vector<double> parse_snapshot_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : feedersim::split_csv_line(s))
    out.push_back(feedersim::parse_double(part));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using feedersim::cli::RunOptions;

  CLI::App app{"Quasi-static time-series simulator for radial distribution feeders "
               "with smart-inverter voltage-control functions"};
  app.require_subcommand(1);

  std::string feeder_path;
  auto* validate = app.add_subcommand("validate", "Check a feeder file against the schema "
                                                  "and the network invariants");
  validate->add_option("feeder", feeder_path, "feeder JSON file")->required();

  std::string scenario_path;
  std::string out_dir;
  std::string harmonics_arg;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int parallel = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides scenario and FEEDERSIM_OUT)");
    cmd->add_option("--seed", seed, "profile generator seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  auto* run = app.add_subcommand("run", "Simulate one scenario and write the CSV bundle");
  add_common(run);
  run->add_option("--harmonics", harmonics_arg,
                  "comma-separated snapshot times in seconds for the harmonic scan");

  auto* sweep = app.add_subcommand("sweep", "Run every function in the scenario sweep list "
                                            "plus the no-PV baseline and compare them");
  add_common(sweep);
  sweep->add_option("--parallel", parallel, "number of worker threads");
  sweep->add_option("--harmonics", harmonics_arg,
                    "comma-separated snapshot times in seconds for the harmonic scan");

  std::string results_dir;
  std::string report_feeder;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Recompute impact metrics from a sweep's raw "
                                              "CSV bundles");
  report->add_option("results", results_dir, "sweep output directory")->required();
  report->add_option("--feeder", report_feeder, "feeder JSON file")->required();
  report->add_option("--out", report_out, "report output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return feedersim::cli::cmd_validate(feeder_path);

    RunOptions opt;
    opt.scenario_path = scenario_path;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (seed_set) opt.seed = seed;
    if (!harmonics_arg.empty()) opt.harmonic_snapshots_s = parse_snapshot_list(harmonics_arg);
    opt.parallel = parallel;

    if (run->parsed()) return feedersim::cli::cmd_run(opt);
    if (sweep->parsed()) return feedersim::cli::cmd_sweep(opt);
    if (report->parsed()) {
      std::optional<std::filesystem::path> rout;
      if (!report_out.empty()) rout = report_out;
      return feedersim::cli::cmd_report(results_dir, report_feeder, rout);
    }
  } catch (const feedersim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return feedersim::cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
