#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "feedersim/curve.hpp"
#include "feedersim/errors.hpp"

namespace feedersim {

enum class FunctionKind {
  constant_pf,
  volt_var,
  volt_var_hysteresis,
  volt_var_adaptive,
  volt_var_lpf,
  volt_watt,
  volt_watt_rate_limit,
  freq_watt,
  max_gen_limit,
  dyn_reactive_current,
  watt_pf,
};

inline const char* function_kind_name(FunctionKind k) {
  switch (k) {
    case FunctionKind::constant_pf: return "constant_pf";
    case FunctionKind::volt_var: return "volt_var";
    case FunctionKind::volt_var_hysteresis: return "volt_var_hysteresis";
    case FunctionKind::volt_var_adaptive: return "volt_var_adaptive";
    case FunctionKind::volt_var_lpf: return "volt_var_lpf";
    case FunctionKind::volt_watt: return "volt_watt";
    case FunctionKind::volt_watt_rate_limit: return "volt_watt_rate_limit";
    case FunctionKind::freq_watt: return "freq_watt";
    case FunctionKind::max_gen_limit: return "max_gen_limit";
    case FunctionKind::dyn_reactive_current: return "dyn_reactive_current";
    case FunctionKind::watt_pf: return "watt_pf";
  }
  return "?";
}

enum class KvaPrecedence { watt_priority, var_priority };

/// Default volt-VAR characteristic: y is reactive output as a fraction of
/// the inverter kVA rating, x is terminal voltage in pu.
inline PiecewiseLinearCurve default_volt_var_curve() {
  return PiecewiseLinearCurve{{0.92, 0.44}, {0.98, 0.0}, {1.02, 0.0}, {1.08, -0.44}};
}

/// Default volt-Watt characteristic: y is the active-power cap as a fraction
/// of rated power.
inline PiecewiseLinearCurve default_volt_watt_curve() {
  return PiecewiseLinearCurve{{1.03, 1.0}, {1.06, 0.0}};
}

/// Over-frequency droop: full output up to 60.02 Hz, zero at 60.5 Hz.
inline PiecewiseLinearCurve default_freq_watt_curve() {
  return PiecewiseLinearCurve{{60.02, 1.0}, {60.50, 0.0}};
}

inline PiecewiseLinearCurve default_watt_pf_curve() {
  return PiecewiseLinearCurve{{0.0, 1.0}, {1.0, 1.0}};
}

inline constexpr double default_hysteresis_offset_pu = 0.01;

struct InverterFunctionConfig {
  FunctionKind kind = FunctionKind::constant_pf;

  // constant_pf / watt_pf
  double power_factor = 1.0;  // in [-1,1], never 0; sign is the sign of Q

  // volt_var family. Curve y is a fraction of the kVA rating. For the
  // hysteresis variant, volt_var_curve is followed on rising voltage and
  // volt_var_curve_down on falling voltage.
  PiecewiseLinearCurve volt_var_curve = default_volt_var_curve();
  PiecewiseLinearCurve volt_var_curve_down =
      default_volt_var_curve().shifted_x(-default_hysteresis_offset_pu);
  double tau_adapt_s = 600.0;
  double tau_lpf_s = 300.0;

  // volt_watt family. Rate limits are fractions of rated power per minute.
  PiecewiseLinearCurve volt_watt_curve = default_volt_watt_curve();
  double ramp_up_per_min = 0.10;
  double ramp_down_per_min = 0.10;

  PiecewiseLinearCurve freq_watt_curve = default_freq_watt_curve();

  double gen_limit_fraction = 0.80;

  // dyn_reactive_current: droop gain in pu current per pu voltage deviation
  // from the moving-average reference, with a deadband.
  double droop_kq = 2.0;
  double deadband_pu = 0.02;
  double window_min = 10.0;

  PiecewiseLinearCurve watt_pf_curve = default_watt_pf_curve();

  KvaPrecedence precedence = KvaPrecedence::watt_priority;

  // Storage absorption branches of the Watt curves stay clamped off unless set.
  bool storage_enabled = false;

  static InverterFunctionConfig make(FunctionKind kind) {
    InverterFunctionConfig cfg;
    cfg.kind = kind;
    cfg.precedence = default_precedence(kind);
    return cfg;
  }

  /// Voltage-support functions default to var-priority so they keep control
  /// authority at full sun; power-export functions keep watt-priority.
  static KvaPrecedence default_precedence(FunctionKind kind) {
    switch (kind) {
      case FunctionKind::volt_var:
      case FunctionKind::volt_var_hysteresis:
      case FunctionKind::volt_var_adaptive:
      case FunctionKind::volt_var_lpf:
      case FunctionKind::dyn_reactive_current:
        return KvaPrecedence::var_priority;
      default:
        return KvaPrecedence::watt_priority;
    }
  }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0))
        throw Error(ErrorCode::invalid_device_config, std::string(what) + " must be > 0");
    };
    switch (kind) {
      case FunctionKind::constant_pf:
        if (power_factor == 0.0)
          throw Error(ErrorCode::zero_power_factor, "zero power factor setting is not allowed");
        if (power_factor < -1.0 || power_factor > 1.0)
          throw Error(ErrorCode::invalid_device_config, "power factor outside [-1, 1]");
        break;
      case FunctionKind::volt_var_adaptive: positive(tau_adapt_s, "tau_adapt_s"); break;
      case FunctionKind::volt_var_lpf: positive(tau_lpf_s, "tau_lpf_s"); break;
      case FunctionKind::volt_watt_rate_limit:
        positive(ramp_up_per_min, "ramp_up_per_min");
        positive(ramp_down_per_min, "ramp_down_per_min");
        break;
      case FunctionKind::max_gen_limit:
        if (gen_limit_fraction < 0.0 || gen_limit_fraction > 1.0)
          throw Error(ErrorCode::invalid_device_config, "gen_limit_fraction outside [0, 1]");
        break;
      case FunctionKind::dyn_reactive_current:
        positive(droop_kq, "droop_kq");
        positive(window_min, "window_min");
        if (deadband_pu < 0.0)
          throw Error(ErrorCode::invalid_device_config, "deadband_pu must be >= 0");
        break;
      default: break;
    }
  }
};

struct InverterRating {
  double p_rated_kw = 1000.0;
  double s_rated_kva = 1200.0;
};

struct InverterOutput {
  double p_kw = 0.0;
  double q_kvar = 0.0;
};

/// Per-inverter controller memory. Dynamic fields advance exactly once per
/// simulation timestep, after the control loop has settled; the step_*
/// evaluations below never mutate it.
struct InverterState {
  double q_prev_kvar = 0.0;
  double p_prev_kw = 0.0;
  bool seen_voltage = false;
  double v_ref_adaptive_pu = 1.0;
  double v_avg_pu = 1.0;
  enum class Branch { rising, falling };
  Branch hysteresis_branch = Branch::rising;
  std::deque<double> v_window;  // samples feeding the moving average
};

/// PV DC-side power from irradiance and cell temperature, capped at nameplate.
inline double pv_available_power(double irradiance_w_m2, double temp_c, double p_rated_kw,
                                 double temp_coeff_per_degc) {
  double derate = std::max(0.0, 1.0 + temp_coeff_per_degc * (temp_c - 25.0));
  double p = p_rated_kw * (irradiance_w_m2 / 1000.0) * derate;
  return std::min(p, p_rated_kw);
}

/// Clamp an operating point onto the inverter kVA circle. Watt-priority keeps
/// P and shrinks |Q|; var-priority keeps Q and shrinks P.
inline InverterOutput apply_kva_limit(double p_kw, double q_kvar, double s_rated_kva,
                                      KvaPrecedence precedence) {
  double s = std::hypot(p_kw, q_kvar);
  if (s <= s_rated_kva) return {p_kw, q_kvar};
  if (precedence == KvaPrecedence::watt_priority) {
    double p = std::min(p_kw, s_rated_kva);
    double head = std::sqrt(std::max(0.0, s_rated_kva * s_rated_kva - p * p));
    double q = std::copysign(std::min(std::abs(q_kvar), head), q_kvar);
    return {p, q};
  }
  double q = std::copysign(std::min(std::abs(q_kvar), s_rated_kva), q_kvar);
  double head = std::sqrt(std::max(0.0, s_rated_kva * s_rated_kva - q * q));
  double p = std::min(p_kw, head);
  return {p, q};
}

namespace detail {

inline double clamp_p(double p, double p_avail) { return std::clamp(p, 0.0, p_avail); }

}  // namespace detail

/// Fixed power factor. With var-priority the commanded power factor is held
/// when the kVA circle binds (P and Q scale back together); with watt-priority
/// active power wins and Q takes the leftover headroom.
inline InverterOutput step_constant_pf(double p_avail_kw, double pf, double s_rated_kva,
                                       KvaPrecedence precedence) {
  if (pf == 0.0)
    throw Error(ErrorCode::zero_power_factor, "zero power factor setting is not allowed");
  double p = std::max(0.0, p_avail_kw);
  double q = p * std::tan(std::acos(std::min(1.0, std::abs(pf)))) * (pf >= 0 ? 1.0 : -1.0);
  double s = std::hypot(p, q);
  if (s <= s_rated_kva) return {p, q};
  if (precedence == KvaPrecedence::var_priority) {
    double k = s_rated_kva / s;
    return {p * k, q * k};
  }
  return apply_kva_limit(p, q, s_rated_kva, KvaPrecedence::watt_priority);
}

/// Shared volt-VAR core: reactive output from the terminal voltage via a
/// piecewise-linear curve, with the variant-specific post-processing.
inline InverterOutput step_volt_var(double v_pu, double p_avail_kw,
                                    const InverterFunctionConfig& cfg, const InverterState& state,
                                    const InverterRating& rating, double dt_s) {
  double q_target = 0.0;
  switch (cfg.kind) {
    case FunctionKind::volt_var:
      q_target = cfg.volt_var_curve(v_pu) * rating.s_rated_kva;
      break;
    case FunctionKind::volt_var_hysteresis: {
      // Backlash between the rising (up) and falling (down) curves: output is
      // the last commanded Q clamped into the band the two curves span at v.
      double up = cfg.volt_var_curve(v_pu) * rating.s_rated_kva;
      double down = cfg.volt_var_curve_down(v_pu) * rating.s_rated_kva;
      double lo = std::min(up, down), hi = std::max(up, down);
      q_target = std::clamp(state.q_prev_kvar, lo, hi);
      break;
    }
    case FunctionKind::volt_var_adaptive: {
      double v_ref = state.seen_voltage ? state.v_ref_adaptive_pu : v_pu;
      q_target = cfg.volt_var_curve(v_pu - v_ref + 1.0) * rating.s_rated_kva;
      break;
    }
    case FunctionKind::volt_var_lpf: {
      double q_curve = cfg.volt_var_curve(v_pu) * rating.s_rated_kva;
      q_target = state.q_prev_kvar + (dt_s / cfg.tau_lpf_s) * (q_curve - state.q_prev_kvar);
      break;
    }
    default:
      throw Error(ErrorCode::invalid_device_config, "step_volt_var called with non volt-VAR kind");
  }
  double p = detail::clamp_p(p_avail_kw, p_avail_kw);
  return apply_kva_limit(p, q_target, rating.s_rated_kva, cfg.precedence);
}

/// Volt-Watt: cap active power from the terminal voltage; the rate-limited
/// variant additionally slews from the last committed output.
inline InverterOutput step_volt_watt(double v_pu, double p_avail_kw,
                                     const InverterFunctionConfig& cfg, const InverterState& state,
                                     const InverterRating& rating, double dt_s) {
  double p_cap = cfg.volt_watt_curve(v_pu) * rating.p_rated_kw;
  if (!cfg.storage_enabled) p_cap = std::max(0.0, p_cap);
  double p_target = std::min(p_avail_kw, p_cap);
  double p = p_target;
  if (cfg.kind == FunctionKind::volt_watt_rate_limit) {
    double dt_min = dt_s / 60.0;
    double lo = state.p_prev_kw - cfg.ramp_down_per_min * rating.p_rated_kw * dt_min;
    double hi = state.p_prev_kw + cfg.ramp_up_per_min * rating.p_rated_kw * dt_min;
    p = std::clamp(p_target, lo, hi);
  }
  p = detail::clamp_p(p, p_avail_kw);
  return {p, 0.0};
}

/// Frequency-Watt droop on over-frequency; the absorption branch of the curve
/// is only reachable with storage enabled.
inline InverterOutput step_freq_watt(double f_hz, double p_avail_kw,
                                     const InverterFunctionConfig& cfg,
                                     const InverterRating& rating) {
  double p_cap = cfg.freq_watt_curve(f_hz) * rating.p_rated_kw;
  if (!cfg.storage_enabled) p_cap = std::max(0.0, p_cap);
  double p = std::min(p_avail_kw, p_cap);
  return {detail::clamp_p(p, p_avail_kw), 0.0};
}

/// Active power curtailment to a fixed fraction of rated power.
inline InverterOutput step_max_gen_limit(double p_avail_kw, double limit_fraction,
                                         const InverterRating& rating) {
  double p = std::min(p_avail_kw, limit_fraction * rating.p_rated_kw);
  return {detail::clamp_p(p, p_avail_kw), 0.0};
}

/// Reactive current droop on the deviation of the terminal voltage from its
/// moving average: sag -> injection, swell -> absorption, with a deadband.
inline InverterOutput step_dyn_reactive_current(double v_pu, double p_avail_kw,
                                                const InverterFunctionConfig& cfg,
                                                const InverterState& state,
                                                const InverterRating& rating) {
  double v_avg = v_pu;
  if (!state.v_window.empty()) {
    double sum = 0.0;
    for (double v : state.v_window) sum += v;
    v_avg = sum / static_cast<double>(state.v_window.size());
  }
  double dv = v_pu - v_avg;
  double iq_pu = 0.0;
  if (std::abs(dv) > cfg.deadband_pu)
    iq_pu = -cfg.droop_kq * (dv - std::copysign(cfg.deadband_pu, dv));
  double q = iq_pu * v_pu * rating.s_rated_kva;
  double p = detail::clamp_p(p_avail_kw, p_avail_kw);
  return apply_kva_limit(p, q, rating.s_rated_kva, cfg.precedence);
}

/// Watt-PF: the operating power factor is itself a curve over P/P_rated.
inline InverterOutput step_watt_pf(double p_avail_kw, const InverterFunctionConfig& cfg,
                                   const InverterRating& rating) {
  double ratio = rating.p_rated_kw > 0 ? p_avail_kw / rating.p_rated_kw : 0.0;
  double pf = cfg.watt_pf_curve(ratio);
  if (pf == 0.0)
    throw Error(ErrorCode::zero_power_factor, "watt-pf curve passes through zero power factor");
  return step_constant_pf(p_avail_kw, pf, rating.s_rated_kva, cfg.precedence);
}

/// One control-loop evaluation of the configured function. Pure in the state:
/// commit() advances the dynamic fields once the timestep's operating point is
/// final.
inline InverterOutput evaluate_inverter(const InverterFunctionConfig& cfg,
                                        const InverterState& state, const InverterRating& rating,
                                        double v_pu, double f_hz, double p_avail_kw, double dt_s) {
  switch (cfg.kind) {
    case FunctionKind::constant_pf:
      return step_constant_pf(p_avail_kw, cfg.power_factor, rating.s_rated_kva, cfg.precedence);
    case FunctionKind::volt_var:
    case FunctionKind::volt_var_hysteresis:
    case FunctionKind::volt_var_adaptive:
    case FunctionKind::volt_var_lpf:
      return step_volt_var(v_pu, p_avail_kw, cfg, state, rating, dt_s);
    case FunctionKind::volt_watt:
    case FunctionKind::volt_watt_rate_limit:
      return step_volt_watt(v_pu, p_avail_kw, cfg, state, rating, dt_s);
    case FunctionKind::freq_watt:
      return step_freq_watt(f_hz, p_avail_kw, cfg, rating);
    case FunctionKind::max_gen_limit:
      return step_max_gen_limit(p_avail_kw, cfg.gen_limit_fraction, rating);
    case FunctionKind::dyn_reactive_current:
      return step_dyn_reactive_current(v_pu, p_avail_kw, cfg, state, rating);
    case FunctionKind::watt_pf:
      return step_watt_pf(p_avail_kw, cfg, rating);
  }
  return {};
}

/// Advance the dynamic state by one timestep at the settled operating point.
inline void commit_inverter_state(InverterState& state, const InverterFunctionConfig& cfg,
                                  const InverterRating& rating, double v_pu,
                                  const InverterOutput& out, double dt_s) {
  if (!state.seen_voltage) {
    state.v_ref_adaptive_pu = v_pu;
    state.v_avg_pu = v_pu;
    state.seen_voltage = true;
  }
  if (cfg.kind == FunctionKind::volt_var_hysteresis) {
    // Track which curve the output last touched; informational only.
    double up = cfg.volt_var_curve(v_pu) * rating.s_rated_kva;
    double down = cfg.volt_var_curve_down(v_pu) * rating.s_rated_kva;
    constexpr double eps = 1e-12;
    if (std::abs(out.q_kvar - up) <= eps * std::max(1.0, std::abs(up)))
      state.hysteresis_branch = InverterState::Branch::rising;
    else if (std::abs(out.q_kvar - down) <= eps * std::max(1.0, std::abs(down)))
      state.hysteresis_branch = InverterState::Branch::falling;
  }
  if (cfg.kind == FunctionKind::volt_var_adaptive)
    state.v_ref_adaptive_pu += (dt_s / cfg.tau_adapt_s) * (v_pu - state.v_ref_adaptive_pu);
  if (cfg.kind == FunctionKind::dyn_reactive_current) {
    std::size_t max_samples = static_cast<std::size_t>(
        std::max(1.0, std::round(cfg.window_min * 60.0 / dt_s)));
    state.v_window.push_back(v_pu);
    while (state.v_window.size() > max_samples) state.v_window.pop_front();
    double sum = 0.0;
    for (double v : state.v_window) sum += v;
    state.v_avg_pu = sum / static_cast<double>(state.v_window.size());
  }
  state.p_prev_kw = out.p_kw;
  state.q_prev_kvar = out.q_kvar;
}

}  // namespace feedersim
