#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "feedersim/network.hpp"
#include "feedersim/power_flow.hpp"

namespace feedersim {

struct TapAction {
  std::string device_id;
  Phase phase = Phase::A;
  int delta = 0;
  int resulting_position = 0;
};

struct SwitchAction {
  std::string device_id;
  Phase phase = Phase::A;  // meaningful only when !ganged
  bool ganged = true;
  bool new_on = false;
};

struct ControlNote {
  std::string device_id;
  Phase phase = Phase::A;
  std::string note;  // budget_exhausted | limit_clamped | q_cap_limited
};

struct ViolationRecord {
  long timestep = 0;
  std::string bus;
  Phase phase = Phase::A;
  double v_pu = 0.0;
  bool upper = false;  // true: above v_max, false: below v_min
};

/// Append-only record of every tap and switch event, plus controller notes.
/// Daily counters reset at midnight simulation time and always equal the
/// aggregation of the day's entries.
class DeviceActionLog {
 public:
  enum class Kind { tap, cap_switch, note };

  struct Entry {
    long timestep = 0;
    Kind kind = Kind::note;
    std::string device_id;
    int phase = -1;  // -1 for whole-bank events
    int delta = 0;
    int position = 0;   // tap entries: resulting tap position
    bool state_on = false;  // switch entries
    std::string note;
  };

  void begin_timestep(long timestep, double dt_s) {
    timestep_ = timestep;
    long day = static_cast<long>(std::floor((static_cast<double>(timestep) * dt_s) / 86400.0));
    if (day != day_) {
      day_ = day;
      daily_tap_ops_.clear();
      daily_cap_ops_.clear();
    }
  }

  void record_tap(const TapAction& a) {
    Entry e;
    e.timestep = timestep_;
    e.kind = Kind::tap;
    e.device_id = a.device_id;
    e.phase = phase_index(a.phase);
    e.delta = a.delta;
    e.position = a.resulting_position;
    entries_.push_back(e);
    daily_tap_ops_[{a.device_id, phase_index(a.phase)}] += std::abs(a.delta);
  }

  void record_switch(const SwitchAction& a) {
    Entry e;
    e.timestep = timestep_;
    e.kind = Kind::cap_switch;
    e.device_id = a.device_id;
    e.phase = a.ganged ? -1 : phase_index(a.phase);
    e.state_on = a.new_on;
    entries_.push_back(e);
    daily_cap_ops_[a.device_id] += 1;
  }

  void record_note(const ControlNote& n) {
    Entry e;
    e.timestep = timestep_;
    e.kind = Kind::note;
    e.device_id = n.device_id;
    e.phase = phase_index(n.phase);
    e.note = n.note;
    entries_.push_back(e);
  }

  int daily_tap_ops(const std::string& device, Phase p) const {
    auto it = daily_tap_ops_.find({device, phase_index(p)});
    return it == daily_tap_ops_.end() ? 0 : it->second;
  }

  int daily_cap_ops(const std::string& device) const {
    auto it = daily_cap_ops_.find(device);
    return it == daily_cap_ops_.end() ? 0 : it->second;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  long current_timestep() const { return timestep_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::pair<std::string, int>, int> daily_tap_ops_;
  std::map<std::string, int> daily_cap_ops_;
  long timestep_ = 0;
  long day_ = -1;
};

struct RegulatorDecision {
  std::vector<TapAction> actions;
  std::vector<ControlNote> notes;
};

/// Deadband tap control on the regulated-side bus voltage. Multi-step moves
/// are taken in one action and count as |delta| switching operations against
/// the per-phase daily budget.
inline RegulatorDecision regulator_decide(const Network& net, const Solution& sol,
                                          std::size_t reg_index, const TapState& taps,
                                          const DeviceActionLog& log) {
  if (!sol.converged)
    throw Error(ErrorCode::unconverged_solution, "regulator control needs a converged solution");
  const RegulatorBank& reg = net.regulators()[reg_index];

  std::size_t to_bus = net.bus_index(reg.to_bus);
  RegulatorDecision out;
  for (Phase p : reg.phases) {
    int i = phase_index(p);
    double v = sol.v_mag_pu(to_bus, p);
    double dev = v - reg.setpoint_pu;
    double half_band = reg.bandwidth_pu / 2.0;
    if (std::abs(dev) <= half_band) continue;

    int steps = static_cast<int>(std::ceil((std::abs(dev) - half_band) / reg.step_pu - 1e-12));
    int direction = dev > 0 ? -1 : +1;  // high voltage -> lower the ratio
    int desired = steps * direction;

    int pos = taps.taps.at(reg_index)[i];
    int clamped = std::clamp(pos + desired, reg.tap_min, reg.tap_max) - pos;
    bool hit_limit = clamped != desired;

    int budget_left = reg.daily_tap_limit - log.daily_tap_ops(reg.id, p);
    if (std::abs(clamped) > budget_left) {
      clamped = budget_left > 0 ? direction * budget_left : 0;
      if (clamped == 0) {
        out.notes.push_back({reg.id, p, "budget_exhausted"});
        continue;
      }
      out.notes.push_back({reg.id, p, "budget_exhausted"});
    }
    if (clamped == 0) {
      if (hit_limit) out.notes.push_back({reg.id, p, "limit_clamped"});
      continue;
    }
    if (hit_limit) out.notes.push_back({reg.id, p, "limit_clamped"});
    out.actions.push_back({reg.id, p, clamped, pos + clamped});
  }
  return out;
}

struct CapacitorDecision {
  std::vector<SwitchAction> actions;
  std::vector<ControlNote> notes;
};

namespace detail {

/// Predicted injection of the whole bank at the present bus voltages if the
/// given phases were on (constant-impedance bank, Q scales with V^2).
inline double predicted_bank_q_kvar(const CapacitorBank& cap, const Solution& sol,
                                    std::size_t bus, PerPhase<bool> on) {
  double q = 0.0;
  for (Phase p : cap.phases) {
    int i = phase_index(p);
    if (!on[i]) continue;
    double vm = sol.v_mag_pu(bus, p);
    q += cap.kvar_per_phase[i] * vm * vm;
  }
  return q;
}

}  // namespace detail

/// Voltage hysteresis switching for a capacitor bank: on below on_threshold,
/// off above off_threshold, hold in between. Fixed banks never act. The node
/// reactive cap and the daily switching budget gate every close.
inline CapacitorDecision capacitor_decide(const Network& net, const Solution& sol,
                                          std::size_t cap_index, const CapState& caps,
                                          const DeviceActionLog& log) {
  if (!sol.converged)
    throw Error(ErrorCode::unconverged_solution, "capacitor control needs a converged solution");
  const CapacitorBank& cap = net.capacitors()[cap_index];
  CapacitorDecision out;
  if (cap.mode == CapacitorMode::fixed) return out;

  std::size_t bus = net.capacitor_bus(cap_index);
  const PerPhase<bool>& on = caps.on.at(cap_index);
  int budget_left = cap.daily_switch_limit - log.daily_cap_ops(cap.id);

  auto consider = [&](Phase decision_phase, double v_ctrl, PerPhase<bool> next_on, bool switch_on) {
    if (budget_left <= 0) {
      out.notes.push_back({cap.id, decision_phase, "budget_exhausted"});
      return;
    }
    if (switch_on) {
      double q_pred = detail::predicted_bank_q_kvar(cap, sol, bus, next_on);
      if (q_pred > cap.q_max_node_kvar) {
        out.notes.push_back({cap.id, decision_phase, "q_cap_limited"});
        return;
      }
    }
    (void)v_ctrl;
    out.actions.push_back({cap.id, decision_phase, cap.ganged, switch_on});
    --budget_left;
  };

  if (cap.ganged) {
    double v_sum = 0.0;
    int n = 0;
    bool any_on = false;
    for (Phase p : cap.phases) {
      v_sum += sol.v_mag_pu(bus, p);
      ++n;
      any_on = any_on || on[phase_index(p)];
    }
    double v_ctrl = v_sum / n;
    if (!any_on && v_ctrl < cap.on_threshold_pu) {
      PerPhase<bool> next{false, false, false};
      for (Phase p : cap.phases) next[phase_index(p)] = true;
      consider(Phase::A, v_ctrl, next, true);
    } else if (any_on && v_ctrl > cap.off_threshold_pu) {
      consider(Phase::A, v_ctrl, PerPhase<bool>{false, false, false}, false);
    }
  } else {
    for (Phase p : cap.phases) {
      int i = phase_index(p);
      double v_ctrl = sol.v_mag_pu(bus, p);
      if (!on[i] && v_ctrl < cap.on_threshold_pu) {
        PerPhase<bool> next = on;
        next[i] = true;
        consider(p, v_ctrl, next, true);
      } else if (on[i] && v_ctrl > cap.off_threshold_pu) {
        PerPhase<bool> next = on;
        next[i] = false;
        consider(p, v_ctrl, next, false);
      }
    }
  }
  return out;
}

/// One record per (bus, phase) whose voltage magnitude lies outside the bus
/// band. The bounds are inclusive: sitting exactly on a limit is compliant.
inline std::vector<ViolationRecord> check_voltage_limits(const Network& net, const Solution& sol,
                                                         long timestep = 0) {
  if (!sol.converged)
    throw Error(ErrorCode::unconverged_solution, "limit check needs a converged solution");
  std::vector<ViolationRecord> out;
  for (std::size_t b = 0; b < net.buses().size(); ++b) {
    const Bus& bus = net.buses()[b];
    for (Phase p : bus.phases) {
      double v = sol.v_mag_pu(b, p);
      if (v > bus.v_max_pu)
        out.push_back({timestep, bus.id, p, v, true});
      else if (v < bus.v_min_pu)
        out.push_back({timestep, bus.id, p, v, false});
    }
  }
  return out;
}

/// Apply controller outputs to the mutable device state.
inline void apply_tap_actions(TapState& taps, const Network& net,
                              const std::vector<TapAction>& actions) {
  for (const TapAction& a : actions) {
    for (std::size_t r = 0; r < net.regulators().size(); ++r) {
      if (net.regulators()[r].id == a.device_id) {
        taps.taps[r][phase_index(a.phase)] = a.resulting_position;
        break;
      }
    }
  }
}

inline void apply_switch_actions(CapState& caps, const Network& net,
                                 const std::vector<SwitchAction>& actions) {
  for (const SwitchAction& a : actions) {
    for (std::size_t c = 0; c < net.capacitors().size(); ++c) {
      const CapacitorBank& cap = net.capacitors()[c];
      if (cap.id != a.device_id) continue;
      if (a.ganged) {
        for (Phase p : cap.phases) caps.on[c][phase_index(p)] = a.new_on;
      } else {
        caps.on[c][phase_index(a.phase)] = a.new_on;
      }
      break;
    }
  }
}

}  // namespace feedersim
