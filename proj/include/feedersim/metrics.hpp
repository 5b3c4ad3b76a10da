#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "feedersim/controllers.hpp"
#include "feedersim/qsts.hpp"

namespace feedersim {

/// Switching operations aggregated from a device action log: |delta| per
/// regulator phase, switch events per capacitor bank.
struct SwitchTally {
  std::map<std::string, PerPhase<long>> reg_taps;
  std::map<std::string, long> cap_switches;
  std::size_t run_steps = 0;

  long reg_total(const std::string& id) const {
    auto it = reg_taps.find(id);
    if (it == reg_taps.end()) return 0;
    return it->second[0] + it->second[1] + it->second[2];
  }
};

inline SwitchTally tally_from_log(const DeviceActionLog& log, std::size_t run_steps,
                                  const Network& net) {
  SwitchTally t;
  t.run_steps = run_steps;
  for (const RegulatorBank& r : net.regulators()) t.reg_taps[r.id] = {0, 0, 0};
  for (const CapacitorBank& c : net.capacitors()) t.cap_switches[c.id] = 0;
  for (const auto& e : log.entries()) {
    if (e.kind == DeviceActionLog::Kind::tap)
      t.reg_taps[e.device_id][e.phase] += std::abs(e.delta);
    else if (e.kind == DeviceActionLog::Kind::cap_switch)
      t.cap_switches[e.device_id] += 1;
  }
  return t;
}

struct DcfValue {
  bool defined = false;
  double value = 0.0;
};

/// Device cost factor of a regulator: switching with PV over switching
/// without, phases A, B, C aggregated. Undefined when the baseline never
/// switched.
inline DcfValue device_cost_factor(const SwitchTally& with_pv, const SwitchTally& baseline,
                                   const std::string& device_id) {
  if (with_pv.run_steps != baseline.run_steps)
    throw Error(ErrorCode::duration_mismatch, "tallies cover different run lengths");
  long num = with_pv.reg_total(device_id);
  long den = baseline.reg_total(device_id);
  if (den == 0) return {false, 0.0};
  return {true, static_cast<double>(num) / static_cast<double>(den)};
}

/// Capacitor DCF uses bank switch totals; reported alongside, never in CII.
inline DcfValue capacitor_cost_factor(const SwitchTally& with_pv, const SwitchTally& baseline,
                                      const std::string& device_id) {
  if (with_pv.run_steps != baseline.run_steps)
    throw Error(ErrorCode::duration_mismatch, "tallies cover different run lengths");
  auto wn = with_pv.cap_switches.find(device_id);
  auto bn = baseline.cap_switches.find(device_id);
  long num = wn == with_pv.cap_switches.end() ? 0 : wn->second;
  long den = bn == baseline.cap_switches.end() ? 0 : bn->second;
  if (den == 0) return {false, 0.0};
  return {true, static_cast<double>(num) / static_cast<double>(den)};
}

inline double scaled_omc(double omc_baseline, const DcfValue& dcf) {
  if (omc_baseline < 0.0)
    throw Error(ErrorCode::invalid_device_config, "baseline OMC must be >= 0");
  if (!dcf.defined)
    throw Error(ErrorCode::undefined_baseline, "DCF undefined (no baseline switching)");
  return omc_baseline * dcf.value;
}

struct CiiValue {
  double value = 1.0;
  std::vector<std::string> undefined_devices;  // excluded from the mean
};

/// Circuit impact index under the equal-OMC assumption: the mean of the
/// regulator DCFs (each baseline DCF is 1 by definition). Regulators with an
/// undefined DCF are excluded and reported.
inline CiiValue circuit_impact_index(const std::vector<std::pair<std::string, DcfValue>>& dcfs) {
  if (dcfs.empty()) throw Error(ErrorCode::empty_list, "no regulators for CII");
  CiiValue out;
  double sum = 0.0;
  int n = 0;
  for (const auto& [id, dcf] : dcfs) {
    if (!dcf.defined) {
      out.undefined_devices.push_back(id);
      continue;
    }
    sum += dcf.value;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::undefined_baseline, "every regulator DCF is undefined");
  out.value = sum / static_cast<double>(n);
  return out;
}

struct LossSummary {
  std::vector<double> p_loss_kw;   // per timestep, this run
  std::vector<double> q_loss_kvar;
  double mean_p_loss_kw = 0.0;
  double mean_q_loss_kvar = 0.0;
  double min_p_loss_kw = 0.0;
  double min_q_loss_kvar = 0.0;
  // Deltas vs baseline restricted to the PV-generation window.
  double pv_window_mean_p_delta_kw = 0.0;
  double pv_window_mean_q_delta_kvar = 0.0;
  std::size_t pv_window_steps = 0;
};

/// Loss series on raw vectors so in-memory results and re-parsed CSV bundles
/// share one aggregation path.
inline LossSummary loss_summary_series(const std::vector<double>& p_run,
                                       const std::vector<double>& q_run,
                                       const std::vector<double>& p_base,
                                       const std::vector<double>& q_base,
                                       const std::vector<double>& pv_available_kw) {
  if (p_run.size() != p_base.size() || q_run.size() != q_base.size() ||
      p_run.size() != q_run.size() || p_run.size() != pv_available_kw.size())
    throw Error(ErrorCode::duration_mismatch, "loss series cover different durations");
  if (p_run.empty()) throw Error(ErrorCode::empty_list, "empty loss series");

  LossSummary s;
  s.p_loss_kw = p_run;
  s.q_loss_kvar = q_run;
  s.min_p_loss_kw = p_run.front();
  s.min_q_loss_kvar = q_run.front();
  double sp = 0.0, sq = 0.0, dp = 0.0, dq = 0.0;
  for (std::size_t t = 0; t < p_run.size(); ++t) {
    sp += p_run[t];
    sq += q_run[t];
    s.min_p_loss_kw = std::min(s.min_p_loss_kw, p_run[t]);
    s.min_q_loss_kvar = std::min(s.min_q_loss_kvar, q_run[t]);
    if (pv_available_kw[t] > 0.0) {
      dp += p_run[t] - p_base[t];
      dq += q_run[t] - q_base[t];
      ++s.pv_window_steps;
    }
  }
  s.mean_p_loss_kw = sp / static_cast<double>(p_run.size());
  s.mean_q_loss_kvar = sq / static_cast<double>(q_run.size());
  if (s.pv_window_steps > 0) {
    s.pv_window_mean_p_delta_kw = dp / static_cast<double>(s.pv_window_steps);
    s.pv_window_mean_q_delta_kvar = dq / static_cast<double>(s.pv_window_steps);
  }
  return s;
}

inline LossSummary loss_summary(const RunResult& run, const RunResult& baseline) {
  if (run.steps.size() != baseline.steps.size())
    throw Error(ErrorCode::duration_mismatch, "runs cover different durations");
  std::vector<double> pr, qr, pb, qb, pv;
  pr.reserve(run.steps.size());
  for (std::size_t t = 0; t < run.steps.size(); ++t) {
    pr.push_back(run.steps[t].p_loss_kw);
    qr.push_back(run.steps[t].q_loss_kvar);
    pb.push_back(baseline.steps[t].p_loss_kw);
    qb.push_back(baseline.steps[t].q_loss_kvar);
    pv.push_back(run.steps[t].pv_available_total_kw);
  }
  return loss_summary_series(pr, qr, pb, qb, pv);
}

struct ImpactReport {
  std::string function_name;
  std::vector<std::pair<std::string, DcfValue>> regulator_dcf;  // in network order
  std::vector<std::pair<std::string, double>> regulator_omc;    // scaled, defined DCFs only
  std::vector<std::pair<std::string, DcfValue>> capacitor_dcf;
  CiiValue cii;
  LossSummary losses;
  long violation_count = 0;
  SwitchTally tally;
  double omc_baseline = 1.0;
};

/// Assemble the full economic/engineering impact picture of one run against
/// the no-PV baseline.
inline ImpactReport build_impact_report(const Network& net, const std::string& function_name,
                                        const SwitchTally& with_pv, const SwitchTally& baseline,
                                        const LossSummary& losses, long violation_count,
                                        double omc_baseline = 1.0) {
  ImpactReport rep;
  rep.function_name = function_name;
  rep.tally = with_pv;
  rep.losses = losses;
  rep.violation_count = violation_count;
  rep.omc_baseline = omc_baseline;
  for (const RegulatorBank& r : net.regulators()) {
    DcfValue dcf = device_cost_factor(with_pv, baseline, r.id);
    rep.regulator_dcf.emplace_back(r.id, dcf);
    if (dcf.defined) rep.regulator_omc.emplace_back(r.id, scaled_omc(omc_baseline, dcf));
  }
  for (const CapacitorBank& c : net.capacitors())
    rep.capacitor_dcf.emplace_back(c.id, capacitor_cost_factor(with_pv, baseline, c.id));
  rep.cii = circuit_impact_index(rep.regulator_dcf);
  return rep;
}

}  // namespace feedersim
