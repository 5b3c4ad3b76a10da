#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "feedersim/io_bundle.hpp"
#include "feedersim/io_json.hpp"
#include "feedersim/profiles.hpp"

namespace feedersim {
namespace cli {

namespace fs = std::filesystem;

// Documented exit codes: 0 ok, 2 parse, 3 validation, 4 convergence flag,
// 5 missing file / I/O, 1 anything else.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::invalid_curve: return 2;
    case ErrorCode::cycle_detected:
    case ErrorCode::dangling_reference:
    case ErrorCode::phase_mismatch:
    case ErrorCode::non_positive_rating:
    case ErrorCode::invalid_impedance:
    case ErrorCode::invalid_device_config:
    case ErrorCode::zero_power_factor:
    case ErrorCode::duration_mismatch:
    case ErrorCode::undefined_baseline:
    case ErrorCode::empty_list:
    case ErrorCode::empty_sweep:
    case ErrorCode::unknown_order:
    case ErrorCode::missing_fundamental:
    case ErrorCode::singular_segment: return 3;
    case ErrorCode::unconverged_solution: return 4;
    case ErrorCode::missing_baseline:
    case ErrorCode::missing_file:
    case ErrorCode::io_error: return 5;
  }
  return 1;
}

struct RunOptions {
  fs::path scenario_path;
  std::optional<fs::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> harmonic_snapshots_s;
  int parallel = 1;
};

inline fs::path effective_out_dir(const io::ScenarioFile& sc, const RunOptions& opt) {
  if (opt.out_dir) return *opt.out_dir;
  if (const char* env = std::getenv("FEEDERSIM_OUT")) return fs::path(env);
  return sc.output_dir;
}

inline ProfileSeries resolve_profile(const std::string& ref, const io::ScenarioFile& sc,
                                     std::uint64_t seed, const char* what) {
  const double dt = sc.dt_s;
  const std::size_t steps = sc.steps();
  if (ref.rfind("builtin:", 0) == 0) {
    std::string name = ref.substr(8);
    if (name == "cloudy_day") return synth::cloudy_day_irradiance(seed, dt, steps);
    if (name == "adversarial") return synth::adversarial_irradiance(dt, steps);
    if (name == "daily_temperature") return synth::daily_temperature(dt, steps);
    if (name == "diurnal_load") return synth::diurnal_load_multiplier(dt, steps);
    if (name.rfind("constant:", 0) == 0)
      return ProfileSeries::constant(parse_double(name.substr(9)), dt, steps);
    throw Error(ErrorCode::parse_error,
                std::string(what) + ": unknown builtin profile '" + name + "'");
  }
  fs::path p(ref);
  if (!p.is_absolute()) p = sc.path.parent_path() / p;
  ProfileSeries series = io::read_profile_csv(p);
  if (std::abs(series.dt_s - dt) > 1e-9 * std::max(1.0, dt))
    throw Error(ErrorCode::duration_mismatch,
                p.string() + ": profile spacing does not match scenario dt_s");
  if (series.values.size() < steps)
    throw Error(ErrorCode::duration_mismatch,
                p.string() + ": profile does not cover the scenario duration");
  return series;
}

struct LoadedScenario {
  io::ScenarioFile file;
  Network network;
  Scenario scenario;
};

inline LoadedScenario load_scenario(const RunOptions& opt) {
  io::ScenarioFile file = io::load_scenario_file(opt.scenario_path);
  if (opt.seed) file.seed = *opt.seed;
  if (opt.harmonic_snapshots_s) file.harmonic_snapshots_s = *opt.harmonic_snapshots_s;

  Network net = build_network(io::load_feeder_file(file.feeder_path));

  Scenario sc;
  sc.dt_s = file.dt_s;
  sc.steps = file.steps();
  sc.pv_enabled = file.pv_enabled;
  sc.function = file.function;
  sc.per_pv_function = file.per_pv_function;
  sc.irradiance = resolve_profile(file.irradiance_ref, file, file.seed, "irradiance");
  sc.temperature = resolve_profile(file.temperature_ref, file, file.seed + 1, "temperature");
  if (!file.frequency_ref.empty())
    sc.frequency = resolve_profile(file.frequency_ref, file, file.seed + 2, "frequency");
  for (const auto& [name, ref] : file.load_multiplier_refs)
    sc.load_multipliers[name] = resolve_profile(ref, file, file.seed + 3, name.c_str());

  LoadedScenario out{std::move(file), std::move(net), std::move(sc)};
  out.scenario.network = &out.network;
  return out;
}

/// Harmonic scans at the configured snapshot instants of a completed run.
inline std::vector<std::pair<double, HarmonicResult>> run_harmonics(const Network& net,
                                                                    const io::ScenarioFile& file,
                                                                    const RunResult& run) {
  std::vector<std::pair<double, HarmonicResult>> out;
  if (file.harmonic_snapshots_s.empty()) return out;
  std::map<std::string, HarmonicSpectrum> spectra;
  for (const PVUnit& pv : net.pv_units()) spectra[pv.id] = file.spectrum;
  for (double when : file.harmonic_snapshots_s) {
    double idx = when / file.dt_s;
    auto t = static_cast<std::size_t>(idx + 0.5);
    if (std::abs(idx - static_cast<double>(t)) > 1e-9 || t >= run.steps.size())
      throw Error(ErrorCode::invalid_device_config,
                  "harmonic snapshot " + format_double(when) + " s is not a timestep");
    out.emplace_back(when, harmonic_solution(net, run.steps[t].solution, spectra,
                                             file.harmonic_orders));
  }
  return out;
}

inline void write_run_bundle(const fs::path& dir, const Network& net,
                             const io::ScenarioFile& file, const RunResult& run) {
  fs::create_directories(dir);
  io::write_voltages_csv(dir / "voltages.csv", net, run);
  io::write_inverters_csv(dir / "inverters.csv", net, run);
  io::write_devices_csv(dir / "devices.csv", run);
  io::write_losses_csv(dir / "losses.csv", run);
  io::write_run_summary(dir / "run_summary.txt", run);
  if (!file.harmonic_snapshots_s.empty())
    io::write_harmonics_csv(dir / "harmonics.csv", run_harmonics(net, file, run),
                            file.monitored_lines);
}

inline bool run_has_flags(const RunResult& run) {
  for (const TimestepResult& ts : run.steps)
    if (!ts.control_converged) return true;
  return false;
}

/// validate: parse the feeder file and run every network invariant check.
inline int cmd_validate(const fs::path& feeder_path, std::ostream& out = std::cout) {
  FeederDescription d = io::load_feeder_file(feeder_path);
  Network net = build_network(d);
  out << "valid: " << feeder_path.string() << "\n";
  out << "  buses=" << net.buses().size() << " lines=" << net.lines().size()
      << " regulators=" << net.regulators().size() << " capacitors=" << net.capacitors().size()
      << " loads=" << net.loads().size() << " pv_units=" << net.pv_units().size() << "\n";
  return 0;
}

/// run: one QSTS simulation, bundle written to the output directory.
inline int cmd_run(const RunOptions& opt, std::ostream& out = std::cout) {
  LoadedScenario ls = load_scenario(opt);
  RunResult run = run_series(ls.scenario);
  run.scenario_tag = ls.file.function ? function_kind_name(ls.file.function->kind) : "default";
  if (!ls.scenario.pv_enabled) run.scenario_tag = "baseline";
  fs::path dir = effective_out_dir(ls.file, opt);
  write_run_bundle(dir, ls.network, ls.file, run);
  out << "run complete: " << run.steps.size() << " steps -> " << dir.string() << "\n";
  return run_has_flags(run) ? 4 : 0;
}

namespace detail {

struct SweepComputation {
  std::vector<std::string> names;  // lexicographic
  std::vector<ImpactReport> reports;
  SwitchTally baseline_tally;
  LossSummary baseline_losses;
  long baseline_violations = 0;
};

inline long count_violations(const RunResult& run) {
  long v = 0;
  for (const TimestepResult& ts : run.steps) v += static_cast<long>(ts.violations.size());
  return v;
}

}  // namespace detail

/// sweep: one run per configured function plus the no-PV baseline, a
/// comparison table, per-function impact reports and plot data.
inline int cmd_sweep(const RunOptions& opt, std::ostream& out = std::cout) {
  LoadedScenario ls = load_scenario(opt);
  if (ls.file.sweep.empty()) throw Error(ErrorCode::empty_sweep, "scenario has no sweep list");

  // Baseline plus one scenario per function; embarrassingly parallel.
  std::vector<Scenario> scenarios;
  std::vector<std::string> names;
  {
    Scenario base = ls.scenario;
    base.pv_enabled = false;
    scenarios.push_back(base);
    names.emplace_back("baseline");
  }
  for (const SweepEntry& entry : ls.file.sweep) {
    Scenario sc = ls.scenario;
    sc.pv_enabled = true;
    sc.function = entry.config;
    sc.per_pv_function.clear();
    scenarios.push_back(sc);
    names.push_back(entry.name);
  }

  std::vector<RunResult> runs(scenarios.size());
  int workers = std::max(1, opt.parallel);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= scenarios.size()) break;
        runs[i] = run_series(scenarios[i]);
        runs[i].scenario_tag = names[i];
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  fs::path dir = effective_out_dir(ls.file, opt);
  fs::create_directories(dir);

  const Network& net = ls.network;
  const RunResult& baseline = runs[0];
  SwitchTally baseline_tally = tally_from_log(baseline.log, baseline.steps.size(), net);
  LossSummary baseline_losses = loss_summary(baseline, baseline);

  // Reports and emitted tables are ordered lexicographically by function name
  // so that report regeneration from the bundles is reproducible.
  std::vector<std::size_t> order;
  for (std::size_t i = 1; i < runs.size(); ++i) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });

  std::vector<ImpactReport> reports;
  for (std::size_t i : order) {
    SwitchTally tally = tally_from_log(runs[i].log, runs[i].steps.size(), net);
    LossSummary losses = loss_summary(runs[i], baseline);
    reports.push_back(build_impact_report(net, names[i], tally, baseline_tally, losses,
                                          detail::count_violations(runs[i])));
  }

  write_run_bundle(dir / "baseline", net, ls.file, baseline);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const fs::path fdir = dir / names[order[k]];
    write_run_bundle(fdir, net, ls.file, runs[order[k]]);
    io::write_impact_report(fdir / "impact_report.txt", reports[k]);
  }

  io::write_comparison_csv(dir / "comparison.csv", net, reports, baseline_tally,
                           detail::count_violations(baseline), baseline_losses.mean_p_loss_kw,
                           baseline_losses.mean_q_loss_kvar);
  {
    std::vector<std::string> series_names{"baseline"};
    std::vector<const std::vector<double>*> series{&baseline_losses.p_loss_kw};
    for (const ImpactReport& r : reports) {
      series_names.push_back(r.function_name);
      series.push_back(&r.losses.p_loss_kw);
    }
    io::write_plot_losses_csv(dir / "plot_losses.csv", series_names, series);
  }
  io::write_plot_cii_csv(dir / "plot_cii.csv", reports);

  bool flagged = false;
  for (const RunResult& r : runs) flagged = flagged || run_has_flags(r);
  out << "sweep complete: " << ls.file.sweep.size() << " functions + baseline -> " << dir.string()
      << "\n";
  return flagged ? 4 : 0;
}

/// report: rebuild every metric from the raw CSV bundles of a sweep output
/// directory. Shares no in-memory state with the sweep that produced them, so
/// matching output is a consistency check of the logs themselves.
inline int cmd_report(const fs::path& results_dir, const fs::path& feeder_path,
                      std::optional<fs::path> out_dir = std::nullopt,
                      std::ostream& out = std::cout) {
  Network net = build_network(io::load_feeder_file(feeder_path));
  fs::path base_dir = results_dir / "baseline";
  if (!fs::exists(base_dir / "devices.csv"))
    throw Error(ErrorCode::missing_baseline,
                "no baseline bundle under '" + results_dir.string() + "'");

  io::LossCsv base_losses = io::read_losses_csv(base_dir / "losses.csv");
  std::size_t steps = base_losses.p_loss_kw.size();
  SwitchTally baseline_tally = io::read_devices_csv_tally(base_dir / "devices.csv", steps, net);
  auto base_summary = io::read_key_value_file(base_dir / "run_summary.txt");
  LossSummary baseline_losses =
      loss_summary_series(base_losses.p_loss_kw, base_losses.q_loss_kvar, base_losses.p_loss_kw,
                          base_losses.q_loss_kvar, base_losses.pv_available_total_kw);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    if (name == "baseline" || name == "report") continue;
    if (fs::exists(entry.path() / "devices.csv")) names.push_back(name);
  }
  std::sort(names.begin(), names.end());

  std::vector<ImpactReport> reports;
  for (const std::string& name : names) {
    fs::path fdir = results_dir / name;
    io::LossCsv losses_csv = io::read_losses_csv(fdir / "losses.csv");
    SwitchTally tally = io::read_devices_csv_tally(fdir / "devices.csv", losses_csv.p_loss_kw.size(), net);
    LossSummary losses =
        loss_summary_series(losses_csv.p_loss_kw, losses_csv.q_loss_kvar, base_losses.p_loss_kw,
                            base_losses.q_loss_kvar, losses_csv.pv_available_total_kw);
    auto summary = io::read_key_value_file(fdir / "run_summary.txt");
    long violations = parse_long(summary.at("violations"));
    reports.push_back(
        build_impact_report(net, name, tally, baseline_tally, losses, violations));
  }

  fs::path rdir = out_dir ? *out_dir : results_dir / "report";
  fs::create_directories(rdir);
  io::write_comparison_csv(rdir / "comparison.csv", net, reports, baseline_tally,
                           parse_long(base_summary.at("violations")),
                           baseline_losses.mean_p_loss_kw, baseline_losses.mean_q_loss_kvar);
  for (const ImpactReport& rep : reports)
    io::write_impact_report(rdir / ("impact_" + rep.function_name + ".txt"), rep);
  io::write_plot_cii_csv(rdir / "plot_cii.csv", reports);
  out << "report written -> " << rdir.string() << "\n";
  return 0;
}

}  // namespace cli
}  // namespace feedersim
