#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "feedersim/harmonics.hpp"
#include "feedersim/io_text.hpp"
#include "feedersim/metrics.hpp"
#include "feedersim/qsts.hpp"

namespace feedersim {
namespace io {

// CSV dialect: comma separator, dot decimal, LF line ends, UTF-8, mandatory
// header row. Numbers are shortest-round-trip so bundles re-parse losslessly.

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open '" + path.string() + "'");
  return in;
}

inline void write_profile_csv(const std::filesystem::path& path, const ProfileSeries& p) {
  auto out = open_out(path);
  out << "timestamp,value\n";
  for (std::size_t t = 0; t < p.values.size(); ++t)
    out << format_double(static_cast<double>(t) * p.dt_s) << ',' << format_double(p.values[t])
        << '\n';
}

inline ProfileSeries read_profile_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "timestamp,value")
    throw Error(ErrorCode::parse_error, path.string() + ": expected header 'timestamp,value'");
  ProfileSeries p;
  std::vector<double> ts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw Error(ErrorCode::parse_error,
                  path.string() + ":" + std::to_string(lineno) + ": expected 2 fields");
    ts.push_back(parse_double(fields[0]));
    p.values.push_back(parse_double(fields[1]));
  }
  if (ts.size() < 2)
    throw Error(ErrorCode::parse_error, path.string() + ": profile needs at least 2 samples");
  double dt = ts[1] - ts[0];
  if (!(dt > 0.0))
    throw Error(ErrorCode::parse_error, path.string() + ": timestamps must be strictly increasing");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (std::abs((ts[i] - ts[i - 1]) - dt) > 1e-9 * std::max(1.0, dt))
      throw Error(ErrorCode::parse_error, path.string() + ": non-uniform timestamp spacing");
  p.dt_s = dt;
  return p;
}

inline void write_voltages_csv(const std::filesystem::path& path, const Network& net,
                               const RunResult& run) {
  auto out = open_out(path);
  out << "timestep,bus,phase,v_mag_pu,v_angle_deg\n";
  for (const TimestepResult& ts : run.steps) {
    for (std::size_t b = 0; b < net.buses().size(); ++b) {
      for (Phase p : net.buses()[b].phases) {
        Complex v = ts.solution.bus_v_pu[b][phase_index(p)];
        out << ts.t << ',' << net.buses()[b].id << ',' << phase_letter(p) << ','
            << format_double(std::abs(v)) << ','
            << format_double(std::arg(v) * 180.0 / std::numbers::pi) << '\n';
      }
    }
  }
}

inline void write_inverters_csv(const std::filesystem::path& path, const Network& net,
                                const RunResult& run) {
  auto out = open_out(path);
  out << "timestep,pv,p_kw,q_kvar,p_available_kw\n";
  for (const TimestepResult& ts : run.steps)
    for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi)
      out << ts.t << ',' << net.pv_units()[pi].id << ',' << format_double(ts.pv_outputs[pi].p_kw)
          << ',' << format_double(ts.pv_outputs[pi].q_kvar) << ','
          << format_double(ts.pv_available_kw[pi]) << '\n';
}

inline void write_devices_csv(const std::filesystem::path& path, const RunResult& run) {
  auto out = open_out(path);
  out << "timestep,device,phase,action,delta,position_or_state\n";
  for (const auto& e : run.log.entries()) {
    std::string phase = e.phase < 0 ? "*" : std::string(1, "ABC"[e.phase]);
    switch (e.kind) {
      case DeviceActionLog::Kind::tap:
        out << e.timestep << ',' << e.device_id << ',' << phase << ",tap," << e.delta << ','
            << e.position << '\n';
        break;
      case DeviceActionLog::Kind::cap_switch:
        out << e.timestep << ',' << e.device_id << ',' << phase << ",switch,0,"
            << (e.state_on ? 1 : 0) << '\n';
        break;
      case DeviceActionLog::Kind::note:
        out << e.timestep << ',' << e.device_id << ',' << phase << ",note:" << e.note << ",0,0\n";
        break;
    }
  }
}

inline void write_losses_csv(const std::filesystem::path& path, const RunResult& run) {
  auto out = open_out(path);
  out << "timestep,p_loss_kw,q_loss_kvar,pv_available_total_kw\n";
  for (const TimestepResult& ts : run.steps)
    out << ts.t << ',' << format_double(ts.p_loss_kw) << ',' << format_double(ts.q_loss_kvar)
        << ',' << format_double(ts.pv_available_total_kw) << '\n';
}

inline void write_run_summary(const std::filesystem::path& path, const RunResult& run) {
  auto out = open_out(path);
  long violations = 0;
  long unconverged = 0;
  for (const TimestepResult& ts : run.steps) {
    violations += static_cast<long>(ts.violations.size());
    if (!ts.control_converged) ++unconverged;
  }
  out << "scenario=" << run.scenario_tag << '\n';
  out << "steps=" << run.steps.size() << '\n';
  out << "violations=" << violations << '\n';
  out << "unconverged_steps=" << unconverged << '\n';
}

/// devices.csv re-aggregation: the independent route to the switch tallies.
inline SwitchTally read_devices_csv_tally(const std::filesystem::path& path, std::size_t run_steps,
                                          const Network& net) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      strip_cr(line) != "timestep,device,phase,action,delta,position_or_state")
    throw Error(ErrorCode::parse_error, path.string() + ": bad devices.csv header");
  SwitchTally t;
  t.run_steps = run_steps;
  for (const RegulatorBank& r : net.regulators()) t.reg_taps[r.id] = {0, 0, 0};
  for (const CapacitorBank& c : net.capacitors()) t.cap_switches[c.id] = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6)
      throw Error(ErrorCode::parse_error, path.string() + ": expected 6 fields");
    const std::string& action = f[3];
    if (action == "tap") {
      int phase = f[2] == "A" ? 0 : (f[2] == "B" ? 1 : 2);
      t.reg_taps[f[1]][phase] += std::abs(parse_long(f[4]));
    } else if (action == "switch") {
      t.cap_switches[f[1]] += 1;
    }
  }
  return t;
}

struct LossCsv {
  std::vector<double> p_loss_kw;
  std::vector<double> q_loss_kvar;
  std::vector<double> pv_available_total_kw;
};

inline LossCsv read_losses_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      strip_cr(line) != "timestep,p_loss_kw,q_loss_kvar,pv_available_total_kw")
    throw Error(ErrorCode::parse_error, path.string() + ": bad losses.csv header");
  LossCsv out;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) throw Error(ErrorCode::parse_error, path.string() + ": expected 4 fields");
    out.p_loss_kw.push_back(parse_double(f[1]));
    out.q_loss_kvar.push_back(parse_double(f[2]));
    out.pv_available_total_kw.push_back(parse_double(f[3]));
  }
  return out;
}

inline std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    auto pos = line.find('=');
    if (pos == std::string::npos)
      throw Error(ErrorCode::parse_error, path.string() + ": expected key=value lines");
    kv[line.substr(0, pos)] = line.substr(pos + 1);
  }
  return kv;
}

inline void write_harmonics_csv(const std::filesystem::path& path,
                                const std::vector<std::pair<double, HarmonicResult>>& snapshots,
                                const std::vector<std::string>& monitored_lines) {
  auto out = open_out(path);
  out << "snapshot_s,element,phase,order,v_mag_pu,i_mag_a,thd_v_pct,thd_i_pct\n";
  for (const auto& [when, res] : snapshots) {
    const std::vector<std::string>& lines =
        monitored_lines.empty() ? res.line_ids : monitored_lines;
    for (const std::string& id : lines) {
      std::size_t li = res.line_index(id);
      ThdValue td = thd(res, id);
      for (Phase p : res.line_phases[li]) {
        int i = phase_index(p);
        for (std::size_t k = 0; k < res.orders.size(); ++k) {
          out << format_double(when) << ',' << id << ',' << phase_letter(p) << ','
              << res.orders[k] << ',' << format_double(res.magnitudes[li][k].v_mag_pu[i]) << ','
              << format_double(res.magnitudes[li][k].i_mag_a[i]) << ','
              << format_double(td.thd_v_pct[i]) << ',' << format_double(td.thd_i_pct[i]) << '\n';
        }
      }
    }
  }
}

/// Impact report in the documented key=value schema.
inline void write_impact_report(const std::filesystem::path& path, const ImpactReport& rep) {
  auto out = open_out(path);
  out << "function=" << rep.function_name << '\n';
  out << "omc_baseline=" << format_double(rep.omc_baseline) << '\n';
  out << "cii=" << format_double(rep.cii.value) << '\n';
  for (const std::string& id : rep.cii.undefined_devices)
    out << "cii_excluded=" << id << '\n';
  for (const auto& [id, dcf] : rep.regulator_dcf)
    out << "dcf_" << id << '=' << (dcf.defined ? format_double(dcf.value) : "undefined") << '\n';
  for (const auto& [id, omc] : rep.regulator_omc)
    out << "omc_" << id << '=' << format_double(omc) << '\n';
  for (const auto& [id, dcf] : rep.capacitor_dcf)
    out << "cap_dcf_" << id << '=' << (dcf.defined ? format_double(dcf.value) : "undefined")
        << '\n';
  for (const auto& [id, taps] : rep.tally.reg_taps)
    out << "taps_" << id << '=' << taps[0] << ',' << taps[1] << ',' << taps[2] << '\n';
  for (const auto& [id, n] : rep.tally.cap_switches) out << "switches_" << id << '=' << n << '\n';
  out << "mean_p_loss_kw=" << format_double(rep.losses.mean_p_loss_kw) << '\n';
  out << "mean_q_loss_kvar=" << format_double(rep.losses.mean_q_loss_kvar) << '\n';
  out << "min_p_loss_kw=" << format_double(rep.losses.min_p_loss_kw) << '\n';
  out << "min_q_loss_kvar=" << format_double(rep.losses.min_q_loss_kvar) << '\n';
  out << "pv_window_mean_p_delta_kw=" << format_double(rep.losses.pv_window_mean_p_delta_kw)
      << '\n';
  out << "pv_window_mean_q_delta_kvar=" << format_double(rep.losses.pv_window_mean_q_delta_kvar)
      << '\n';
  out << "pv_window_steps=" << rep.losses.pv_window_steps << '\n';
  out << "violations=" << rep.violation_count << '\n';
}

/// Comparison table across sweep functions: one row per function plus the
/// baseline, tap counts laid out per regulator per phase.
inline void write_comparison_csv(const std::filesystem::path& path, const Network& net,
                                 const std::vector<ImpactReport>& reports,
                                 const SwitchTally& baseline_tally, long baseline_violations,
                                 double baseline_mean_p_loss, double baseline_mean_q_loss) {
  auto out = open_out(path);
  out << "function,cii";
  for (const RegulatorBank& r : net.regulators())
    for (Phase p : r.phases) out << ",taps_" << r.id << '_' << phase_letter(p);
  for (const CapacitorBank& c : net.capacitors()) out << ",switches_" << c.id;
  out << ",mean_p_loss_kw,mean_q_loss_kvar,pv_window_mean_p_delta_kw,violations\n";

  out << "baseline," << format_double(1.0);
  for (const RegulatorBank& r : net.regulators())
    for (Phase p : r.phases)
      out << ',' << baseline_tally.reg_taps.at(r.id)[phase_index(p)];
  for (const CapacitorBank& c : net.capacitors())
    out << ',' << baseline_tally.cap_switches.at(c.id);
  out << ',' << format_double(baseline_mean_p_loss) << ',' << format_double(baseline_mean_q_loss)
      << ',' << format_double(0.0) << ',' << baseline_violations << '\n';

  for (const ImpactReport& rep : reports) {
    out << rep.function_name << ',' << format_double(rep.cii.value);
    for (const RegulatorBank& r : net.regulators())
      for (Phase p : r.phases) out << ',' << rep.tally.reg_taps.at(r.id)[phase_index(p)];
    for (const CapacitorBank& c : net.capacitors())
      out << ',' << rep.tally.cap_switches.at(c.id);
    out << ',' << format_double(rep.losses.mean_p_loss_kw) << ','
        << format_double(rep.losses.mean_q_loss_kvar) << ','
        << format_double(rep.losses.pv_window_mean_p_delta_kw) << ',' << rep.violation_count
        << '\n';
  }
}

inline void write_plot_losses_csv(const std::filesystem::path& path,
                                  const std::vector<std::string>& names,
                                  const std::vector<const std::vector<double>*>& series) {
  auto out = open_out(path);
  out << "timestep";
  for (const std::string& n : names) out << ',' << n;
  out << '\n';
  std::size_t steps = series.empty() ? 0 : series.front()->size();
  for (std::size_t t = 0; t < steps; ++t) {
    out << t;
    for (const auto* s : series) out << ',' << format_double((*s)[t]);
    out << '\n';
  }
}

inline void write_plot_cii_csv(const std::filesystem::path& path,
                               const std::vector<ImpactReport>& reports) {
  auto out = open_out(path);
  out << "function,cii\n";
  for (const ImpactReport& rep : reports)
    out << rep.function_name << ',' << format_double(rep.cii.value) << '\n';
}

}  // namespace io
}  // namespace feedersim
