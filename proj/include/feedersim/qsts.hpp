#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feedersim/controllers.hpp"
#include "feedersim/inverter.hpp"
#include "feedersim/network.hpp"
#include "feedersim/power_flow.hpp"
#include "feedersim/profiles.hpp"

namespace feedersim {

struct Scenario {
  const Network* network = nullptr;
  ProfileSeries irradiance;
  ProfileSeries temperature;
  std::optional<ProfileSeries> frequency;  // defaults to 60 Hz when absent
  std::map<std::string, ProfileSeries> load_multipliers;
  double dt_s = 60.0;
  std::size_t steps = 0;
  bool pv_enabled = true;

  // Function assignment: `function` applies to every PV unless a per-PV entry
  // overrides it; with neither, the unit's own config from the feeder applies.
  std::optional<InverterFunctionConfig> function;
  std::map<std::string, InverterFunctionConfig> per_pv_function;

  double damping_lambda = 0.5;
  int max_control_iterations = 50;
  SolveOptions solve_options;

  void validate() const {
    if (network == nullptr) throw Error(ErrorCode::invalid_device_config, "scenario has no network");
    if (!(dt_s > 0.0)) throw Error(ErrorCode::invalid_device_config, "dt_s must be > 0");
    if (steps == 0) throw Error(ErrorCode::invalid_device_config, "scenario duration is zero");
    auto check = [&](const ProfileSeries& p, const char* name) {
      if (p.values.size() < steps)
        throw Error(ErrorCode::duration_mismatch,
                    std::string(name) + " profile does not cover the scenario duration");
    };
    check(irradiance, "irradiance");
    check(temperature, "temperature");
    if (frequency) check(*frequency, "frequency");
    for (const auto& [name, p] : load_multipliers) check(p, name.c_str());
  }

  const InverterFunctionConfig& config_for(std::size_t pv_index) const {
    const PVUnit& pv = network->pv_units()[pv_index];
    if (auto it = per_pv_function.find(pv.id); it != per_pv_function.end()) return it->second;
    if (function) return *function;
    return pv.function_config;
  }
};

struct TimestepResult {
  std::size_t t = 0;
  Solution solution;
  std::vector<InverterOutput> pv_outputs;   // per PV unit
  std::vector<double> pv_available_kw;      // per PV unit (before any function)
  double pv_available_total_kw = 0.0;
  std::vector<PerPhase<int>> taps;          // per regulator, end of step
  std::vector<PerPhase<bool>> caps_on;      // per capacitor, end of step
  double p_loss_kw = 0.0;
  double q_loss_kvar = 0.0;
  std::vector<ViolationRecord> violations;
  bool control_converged = true;
  int control_iterations = 0;
};

struct RunResult {
  std::vector<TimestepResult> steps;
  DeviceActionLog log;
  std::string scenario_tag;
  double wall_seconds = 0.0;  // metadata only; never serialized into bundles
};

/// Carry-over state between timesteps.
struct EngineState {
  TapState taps;
  CapState caps;
  std::vector<InverterState> inverters;
  std::vector<InverterOutput> applied;  // last applied output per PV
  DeviceActionLog log;

  static EngineState initial(const Network& net) {
    EngineState s;
    s.taps = TapState::initial(net);
    s.caps = CapState::initial(net);
    s.inverters.assign(net.pv_units().size(), InverterState{});
    s.applied.assign(net.pv_units().size(), InverterOutput{});
    return s;
  }
};

namespace detail {

inline InjectionSet build_injections(const Network& net, const Scenario& sc, std::size_t t,
                                     const std::vector<InverterOutput>& pv_out) {
  InjectionSet inj = InjectionSet::zeros(net);
  inj.load_kva.assign(net.loads().size(), Cx3{});
  inj.pv_kva.assign(net.pv_units().size(), Cx3{});

  for (std::size_t li = 0; li < net.loads().size(); ++li) {
    const LoadPoint& load = net.loads()[li];
    double mult = 1.0;
    if (!load.profile_ref.empty()) {
      auto it = sc.load_multipliers.find(load.profile_ref);
      if (it == sc.load_multipliers.end())
        throw Error(ErrorCode::dangling_reference,
                    "load references unknown multiplier series '" + load.profile_ref + "'");
      mult = it->second.at(t);
    }
    std::size_t bus = net.load_bus(li);
    for (Phase p : load.phases) {
      int i = phase_index(p);
      Complex s{load.kw[i] * mult, load.kvar[i] * mult};
      inj.load_kva[li][i] = s;
      inj.net_kva[bus][i] -= s;
    }
  }

  for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi) {
    const PVUnit& pv = net.pv_units()[pi];
    std::size_t bus = net.pv_bus(pi);
    int nph = pv.phases.count();
    Complex total{pv_out[pi].p_kw, pv_out[pi].q_kvar};
    for (Phase p : pv.phases) {
      int i = phase_index(p);
      Complex share = total / static_cast<double>(nph);
      inj.pv_kva[pi][i] = share;
      inj.net_kva[bus][i] += share;
    }
  }
  return inj;
}

/// Inverter terminal voltage: mean phase voltage magnitude at its bus.
inline double terminal_voltage_pu(const Network& net, const Solution& sol, std::size_t pv_index) {
  const PVUnit& pv = net.pv_units()[pv_index];
  std::size_t bus = net.pv_bus(pv_index);
  double sum = 0.0;
  int n = 0;
  for (Phase p : pv.phases) {
    sum += sol.v_mag_pu(bus, p);
    ++n;
  }
  return sum / n;
}

}  // namespace detail

/// One QSTS timestep: iterate power flow, inverter functions (with damped Q
/// updates) and legacy device controls to a fixed point, then advance the
/// inverter dynamic states exactly once.
inline TimestepResult run_timestep(const Scenario& sc, std::size_t t, EngineState& st) {
  const Network& net = *sc.network;
  st.log.begin_timestep(static_cast<long>(t), sc.dt_s);

  TimestepResult res;
  res.t = t;

  double irr = sc.irradiance.at(t);
  double temp = sc.temperature.at(t);
  double f_hz = sc.frequency ? sc.frequency->at(t) : 60.0;

  res.pv_available_kw.resize(net.pv_units().size());
  for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi) {
    const PVUnit& pv = net.pv_units()[pi];
    res.pv_available_kw[pi] = pv_available_power(irr, temp, pv.p_rated_kw, pv.temp_coeff_per_degc);
    res.pv_available_total_kw += res.pv_available_kw[pi];
  }

  std::vector<InverterOutput> applied = sc.pv_enabled
                                            ? st.applied
                                            : std::vector<InverterOutput>(net.pv_units().size());

  Solution sol;
  bool control_converged = false;
  int iter = 0;
  while (iter < sc.max_control_iterations) {
    ++iter;
    InjectionSet inj = detail::build_injections(net, sc, t, applied);
    sol = solve(net, inj, st.taps, st.caps, sc.solve_options);
    if (!sol.converged) break;

    bool quiet = true;

    if (sc.pv_enabled) {
      double max_dq = 0.0, max_dp = 0.0;
      for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi) {
        const PVUnit& pv = net.pv_units()[pi];
        double v = detail::terminal_voltage_pu(net, sol, pi);
        InverterOutput eval =
            evaluate_inverter(sc.config_for(pi), st.inverters[pi],
                              InverterRating{pv.p_rated_kw, pv.s_rated_kva}, v, f_hz,
                              res.pv_available_kw[pi], sc.dt_s);
        InverterOutput next;
        next.p_kw = eval.p_kw;
        next.q_kvar = applied[pi].q_kvar + sc.damping_lambda * (eval.q_kvar - applied[pi].q_kvar);
        max_dp = std::max(max_dp, std::abs(next.p_kw - applied[pi].p_kw));
        max_dq = std::max(max_dq, std::abs(next.q_kvar - applied[pi].q_kvar));
        applied[pi] = next;
      }
      if (max_dq >= 1.0 || max_dp >= 1.0) quiet = false;
    }

    for (std::size_t r = 0; r < net.regulators().size(); ++r) {
      RegulatorDecision dec = regulator_decide(net, sol, r, st.taps, st.log);
      for (const ControlNote& n : dec.notes) st.log.record_note(n);
      if (!dec.actions.empty()) {
        quiet = false;
        for (const TapAction& a : dec.actions) st.log.record_tap(a);
        apply_tap_actions(st.taps, net, dec.actions);
      }
    }
    for (std::size_t c = 0; c < net.capacitors().size(); ++c) {
      CapacitorDecision dec = capacitor_decide(net, sol, c, st.caps, st.log);
      for (const ControlNote& n : dec.notes) st.log.record_note(n);
      if (!dec.actions.empty()) {
        quiet = false;
        for (const SwitchAction& a : dec.actions) st.log.record_switch(a);
        apply_switch_actions(st.caps, net, dec.actions);
      }
    }

    if (quiet) {
      control_converged = true;
      break;
    }
  }

  // Re-solve so the recorded solution matches the final applied outputs and
  // device states exactly.
  if (sol.converged) {
    InjectionSet inj = detail::build_injections(net, sc, t, applied);
    sol = solve(net, inj, st.taps, st.caps, sc.solve_options);
  }

  res.control_converged = control_converged && sol.converged;
  res.control_iterations = iter;
  res.pv_outputs = applied;
  res.taps = st.taps.taps;
  res.caps_on = st.caps.on;

  if (sol.converged) {
    auto [pl, ql] = total_losses(sol);
    res.p_loss_kw = pl;
    res.q_loss_kvar = ql;
    res.violations = check_voltage_limits(net, sol, static_cast<long>(t));
  }

  // Dynamic states advance once per timestep, at the settled operating point.
  if (sc.pv_enabled && sol.converged) {
    for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi) {
      const PVUnit& pv = net.pv_units()[pi];
      double v = detail::terminal_voltage_pu(net, sol, pi);
      commit_inverter_state(st.inverters[pi], sc.config_for(pi),
                            InverterRating{pv.p_rated_kw, pv.s_rated_kva}, v, applied[pi],
                            sc.dt_s);
    }
    st.applied = applied;
  }

  res.solution = std::move(sol);
  return res;
}

inline RunResult run_series(const Scenario& sc) {
  sc.validate();
  EngineState st = EngineState::initial(*sc.network);
  RunResult run;
  run.steps.reserve(sc.steps);
  for (std::size_t t = 0; t < sc.steps; ++t) run.steps.push_back(run_timestep(sc, t, st));
  run.log = std::move(st.log);
  return run;
}

struct SweepEntry {
  std::string name;
  InverterFunctionConfig config;
};

struct SweepResult {
  std::vector<std::pair<std::string, RunResult>> runs;  // in sweep order
  RunResult baseline;                                    // pv_enabled = false
};

/// One run per config plus the no-PV baseline, all over identical profiles.
inline SweepResult sweep_functions(const Scenario& base, const std::vector<SweepEntry>& configs) {
  if (configs.empty()) throw Error(ErrorCode::empty_sweep, "sweep list is empty");
  SweepResult out;

  Scenario baseline = base;
  baseline.pv_enabled = false;
  out.baseline = run_series(baseline);
  out.baseline.scenario_tag = "baseline";

  for (const SweepEntry& entry : configs) {
    Scenario sc = base;
    sc.pv_enabled = true;
    sc.function = entry.config;
    sc.per_pv_function.clear();
    RunResult r = run_series(sc);
    r.scenario_tag = entry.name;
    out.runs.emplace_back(entry.name, std::move(r));
  }
  return out;
}

/// The nine smart-inverter settings compared by the study, in report order.
inline std::vector<SweepEntry> paper_nine_functions() {
  std::vector<SweepEntry> out;
  auto add = [&](const std::string& name, FunctionKind kind) {
    out.push_back({name, InverterFunctionConfig::make(kind)});
  };
  add("volt_watt", FunctionKind::volt_watt);
  add("volt_watt_rate_limit", FunctionKind::volt_watt_rate_limit);
  add("volt_var", FunctionKind::volt_var);
  add("volt_var_adaptive", FunctionKind::volt_var_adaptive);
  add("volt_var_hysteresis", FunctionKind::volt_var_hysteresis);
  add("volt_var_lpf", FunctionKind::volt_var_lpf);
  add("max_gen_limit_80", FunctionKind::max_gen_limit);
  {
    SweepEntry fpf{"fpf_0.8", InverterFunctionConfig::make(FunctionKind::constant_pf)};
    fpf.config.power_factor = 0.8;
    out.push_back(fpf);
  }
  add("dyn_reactive_current", FunctionKind::dyn_reactive_current);
  return out;
}

}  // namespace feedersim
