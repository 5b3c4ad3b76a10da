#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "feedersim/harmonics.hpp"
#include "feedersim/io_text.hpp"
#include "feedersim/network.hpp"
#include "feedersim/qsts.hpp"

namespace feedersim {

using nlohmann::json;

namespace io {

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(ErrorCode::parse_error, where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, where + ": bad field '" + key + "': " + e.what());
  }
}

template <typename T>
T get_field_or(const json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

/// Per-phase array in the order of the phase set, e.g. kw [a_val, c_val] for
/// phases "AC".
template <typename T>
PerPhase<T> per_phase_from_json(const json& arr, PhaseSet phases, const std::string& where) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(phases.count()))
    throw Error(ErrorCode::parse_error,
                where + ": expected " + std::to_string(phases.count()) + " per-phase values");
  PerPhase<T> out{};
  std::size_t k = 0;
  for (Phase p : phases) out[phase_index(p)] = arr[k++].get<T>();
  return out;
}

template <typename T>
json per_phase_to_json(const PerPhase<T>& v, PhaseSet phases) {
  json arr = json::array();
  for (Phase p : phases) arr.push_back(v[phase_index(p)]);
  return arr;
}

inline PhaseMatrix z_matrix_from_json(const json& arr, PhaseSet phases, const std::string& where) {
  const int n = phases.count();
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(n))
    throw Error(ErrorCode::parse_error, where + ": z_ohm must be a " + std::to_string(n) + "x" +
                                            std::to_string(n) + " matrix of [r, x] pairs");
  PhaseMatrix z;
  int r = 0;
  for (Phase pr : phases) {
    const json& row = arr[r++];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
      throw Error(ErrorCode::parse_error, where + ": ragged z_ohm row");
    int c = 0;
    for (Phase pc : phases) {
      const json& cell = row[c++];
      if (!cell.is_array() || cell.size() != 2)
        throw Error(ErrorCode::parse_error, where + ": z_ohm entries must be [r, x] pairs");
      z.at(pr, pc) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return z;
}

inline json z_matrix_to_json(const PhaseMatrix& z, PhaseSet phases) {
  json rows = json::array();
  for (Phase pr : phases) {
    json row = json::array();
    for (Phase pc : phases)
      row.push_back(json::array({z.at(pr, pc).real(), z.at(pr, pc).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline PiecewiseLinearCurve curve_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() < 2)
    throw Error(ErrorCode::parse_error, where + ": curve needs >= 2 [x, y] breakpoints");
  std::vector<PiecewiseLinearCurve::Point> pts;
  for (const json& p : arr) {
    if (!p.is_array() || p.size() != 2)
      throw Error(ErrorCode::parse_error, where + ": curve breakpoints must be [x, y] pairs");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  try {
    return PiecewiseLinearCurve(std::move(pts));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, where + ": " + e.what());
  }
}

inline json curve_to_json(const PiecewiseLinearCurve& c) {
  json arr = json::array();
  for (const auto& [x, y] : c.breakpoints()) arr.push_back(json::array({x, y}));
  return arr;
}

inline FunctionKind function_kind_from_string(const std::string& s) {
  for (FunctionKind k :
       {FunctionKind::constant_pf, FunctionKind::volt_var, FunctionKind::volt_var_hysteresis,
        FunctionKind::volt_var_adaptive, FunctionKind::volt_var_lpf, FunctionKind::volt_watt,
        FunctionKind::volt_watt_rate_limit, FunctionKind::freq_watt, FunctionKind::max_gen_limit,
        FunctionKind::dyn_reactive_current, FunctionKind::watt_pf})
    if (s == function_kind_name(k)) return k;
  throw Error(ErrorCode::parse_error, "unknown inverter function type '" + s + "'");
}

inline InverterFunctionConfig config_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, where + ": function must be an object");
  InverterFunctionConfig cfg =
      InverterFunctionConfig::make(function_kind_from_string(get_field<std::string>(j, "type", where)));

  if (j.contains("power_factor")) cfg.power_factor = j["power_factor"].get<double>();
  if (j.contains("curve")) {
    PiecewiseLinearCurve c = curve_from_json(j["curve"], where);
    switch (cfg.kind) {
      case FunctionKind::volt_var:
      case FunctionKind::volt_var_hysteresis:
      case FunctionKind::volt_var_adaptive:
      case FunctionKind::volt_var_lpf:
        cfg.volt_var_curve = c;
        cfg.volt_var_curve_down = c.shifted_x(-default_hysteresis_offset_pu);
        break;
      case FunctionKind::volt_watt:
      case FunctionKind::volt_watt_rate_limit: cfg.volt_watt_curve = c; break;
      case FunctionKind::freq_watt: cfg.freq_watt_curve = c; break;
      case FunctionKind::watt_pf: cfg.watt_pf_curve = c; break;
      default:
        throw Error(ErrorCode::parse_error, where + ": 'curve' not applicable to this function");
    }
  }
  if (j.contains("hysteresis_offset_pu"))
    cfg.volt_var_curve_down = cfg.volt_var_curve.shifted_x(-j["hysteresis_offset_pu"].get<double>());
  if (j.contains("curve_down")) cfg.volt_var_curve_down = curve_from_json(j["curve_down"], where);
  if (j.contains("tau_adapt_s")) cfg.tau_adapt_s = j["tau_adapt_s"].get<double>();
  if (j.contains("tau_lpf_s")) cfg.tau_lpf_s = j["tau_lpf_s"].get<double>();
  if (j.contains("ramp_up_per_min")) cfg.ramp_up_per_min = j["ramp_up_per_min"].get<double>();
  if (j.contains("ramp_down_per_min")) cfg.ramp_down_per_min = j["ramp_down_per_min"].get<double>();
  if (j.contains("fraction")) cfg.gen_limit_fraction = j["fraction"].get<double>();
  if (j.contains("droop_kq")) cfg.droop_kq = j["droop_kq"].get<double>();
  if (j.contains("deadband_pu")) cfg.deadband_pu = j["deadband_pu"].get<double>();
  if (j.contains("window_min")) cfg.window_min = j["window_min"].get<double>();
  if (j.contains("storage_enabled")) cfg.storage_enabled = j["storage_enabled"].get<bool>();
  if (j.contains("precedence")) {
    std::string p = j["precedence"].get<std::string>();
    if (p == "watt")
      cfg.precedence = KvaPrecedence::watt_priority;
    else if (p == "var")
      cfg.precedence = KvaPrecedence::var_priority;
    else
      throw Error(ErrorCode::parse_error, where + ": precedence must be 'watt' or 'var'");
  }
  cfg.validate();
  return cfg;
}

inline FeederDescription feeder_from_json(const json& j, const std::string& where) {
  FeederDescription d;
  d.schema = get_field_or<std::string>(j, "schema", "feeder/1");
  if (d.schema != "feeder/1")
    throw Error(ErrorCode::parse_error, where + ": unsupported schema '" + d.schema + "'");

  const json& src = j.contains("source") ? j["source"] : json{};
  d.source_bus = get_field<std::string>(src, "bus", where + ".source");
  d.source_voltage_pu = get_field_or<double>(src, "voltage_pu", 1.0);

  for (const json& b : get_field<json>(j, "buses", where)) {
    Bus bus;
    bus.id = get_field<std::string>(b, "id", where + ".buses");
    bus.phases = PhaseSet::from_string(get_field<std::string>(b, "phases", "bus " + bus.id));
    bus.base_kv_ln = get_field<double>(b, "base_kv_ln", "bus " + bus.id);
    bus.v_min_pu = get_field_or<double>(b, "v_min_pu", 0.95);
    bus.v_max_pu = get_field_or<double>(b, "v_max_pu", 1.05);
    d.buses.push_back(bus);
  }
  if (j.contains("lines")) {
    for (const json& l : j["lines"]) {
      LineSegment line;
      line.id = get_field<std::string>(l, "id", where + ".lines");
      line.from_bus = get_field<std::string>(l, "from", "line " + line.id);
      line.to_bus = get_field<std::string>(l, "to", "line " + line.id);
      line.phases = PhaseSet::from_string(get_field<std::string>(l, "phases", "line " + line.id));
      line.length_km = get_field_or<double>(l, "length_km", 0.0);
      line.z_ohm = z_matrix_from_json(get_field<json>(l, "z_ohm", "line " + line.id), line.phases,
                                      "line " + line.id);
      d.lines.push_back(line);
    }
  }
  if (j.contains("regulators")) {
    for (const json& r : j["regulators"]) {
      RegulatorBank reg;
      reg.id = get_field<std::string>(r, "id", where + ".regulators");
      reg.from_bus = get_field<std::string>(r, "from", "regulator " + reg.id);
      reg.to_bus = get_field<std::string>(r, "to", "regulator " + reg.id);
      reg.phases = PhaseSet::from_string(get_field<std::string>(r, "phases", "regulator " + reg.id));
      reg.tap_min = get_field_or<int>(r, "tap_min", -16);
      reg.tap_max = get_field_or<int>(r, "tap_max", 16);
      reg.step_pu = get_field_or<double>(r, "step_pu", 0.00625);
      reg.setpoint_pu = get_field_or<double>(r, "setpoint_pu", 1.0167);
      reg.bandwidth_pu = get_field_or<double>(r, "bandwidth_pu", 0.0167);
      reg.daily_tap_limit = get_field_or<int>(r, "daily_tap_limit", 273);
      reg.is_substation_ltc = get_field_or<bool>(r, "substation_ltc", false);
      if (r.contains("initial_taps"))
        reg.initial_taps = per_phase_from_json<int>(r["initial_taps"], reg.phases,
                                                    "regulator " + reg.id + ".initial_taps");
      d.regulators.push_back(reg);
    }
  }
  if (j.contains("capacitors")) {
    for (const json& c : j["capacitors"]) {
      CapacitorBank cap;
      cap.id = get_field<std::string>(c, "id", where + ".capacitors");
      cap.bus = get_field<std::string>(c, "bus", "capacitor " + cap.id);
      cap.phases = PhaseSet::from_string(get_field<std::string>(c, "phases", "capacitor " + cap.id));
      cap.kvar_per_phase = per_phase_from_json<double>(
          get_field<json>(c, "kvar_per_phase", "capacitor " + cap.id), cap.phases,
          "capacitor " + cap.id + ".kvar_per_phase");
      std::string mode = get_field_or<std::string>(c, "mode", "fixed");
      if (mode == "fixed")
        cap.mode = CapacitorMode::fixed;
      else if (mode == "switched")
        cap.mode = CapacitorMode::voltage_switched;
      else
        throw Error(ErrorCode::parse_error,
                    "capacitor " + cap.id + ": mode must be 'fixed' or 'switched'");
      cap.on_threshold_pu = get_field_or<double>(c, "on_threshold_pu", 0.97);
      cap.off_threshold_pu = get_field_or<double>(c, "off_threshold_pu", 1.03);
      cap.initially_on = get_field_or<bool>(c, "initially_on", cap.mode == CapacitorMode::fixed);
      cap.daily_switch_limit = get_field_or<int>(c, "daily_switch_limit", 20);
      cap.q_max_node_kvar = get_field_or<double>(c, "q_max_node_kvar", 0.0);
      cap.ganged = get_field_or<bool>(c, "ganged", true);
      d.capacitors.push_back(cap);
    }
  }
  if (j.contains("loads")) {
    for (const json& l : j["loads"]) {
      LoadPoint load;
      load.bus = get_field<std::string>(l, "bus", where + ".loads");
      load.phases = PhaseSet::from_string(get_field<std::string>(l, "phases", "load at " + load.bus));
      load.kw = per_phase_from_json<double>(get_field<json>(l, "kw", "load at " + load.bus),
                                            load.phases, "load at " + load.bus + ".kw");
      load.kvar = per_phase_from_json<double>(get_field<json>(l, "kvar", "load at " + load.bus),
                                              load.phases, "load at " + load.bus + ".kvar");
      load.profile_ref = get_field_or<std::string>(l, "profile", "");
      d.loads.push_back(load);
    }
  }
  if (j.contains("pv_units")) {
    for (const json& p : j["pv_units"]) {
      PVUnit pv;
      pv.id = get_field<std::string>(p, "id", where + ".pv_units");
      pv.bus = get_field<std::string>(p, "bus", "pv " + pv.id);
      pv.phases = PhaseSet::from_string(get_field<std::string>(p, "phases", "pv " + pv.id));
      pv.p_rated_kw = get_field_or<double>(p, "p_rated_kw", 1000.0);
      pv.s_rated_kva = get_field_or<double>(p, "s_rated_kva", 1200.0);
      pv.temp_coeff_per_degc = get_field_or<double>(p, "temp_coeff_per_degc", -0.004);
      if (p.contains("function")) pv.function_config = config_from_json(p["function"], "pv " + pv.id);
      d.pv_units.push_back(pv);
    }
  }
  return d;
}

inline json config_to_json(const InverterFunctionConfig& cfg) {
  json j;
  j["type"] = function_kind_name(cfg.kind);
  switch (cfg.kind) {
    case FunctionKind::constant_pf: j["power_factor"] = cfg.power_factor; break;
    case FunctionKind::volt_var: j["curve"] = curve_to_json(cfg.volt_var_curve); break;
    case FunctionKind::volt_var_hysteresis:
      j["curve"] = curve_to_json(cfg.volt_var_curve);
      j["curve_down"] = curve_to_json(cfg.volt_var_curve_down);
      break;
    case FunctionKind::volt_var_adaptive:
      j["curve"] = curve_to_json(cfg.volt_var_curve);
      j["tau_adapt_s"] = cfg.tau_adapt_s;
      break;
    case FunctionKind::volt_var_lpf:
      j["curve"] = curve_to_json(cfg.volt_var_curve);
      j["tau_lpf_s"] = cfg.tau_lpf_s;
      break;
    case FunctionKind::volt_watt: j["curve"] = curve_to_json(cfg.volt_watt_curve); break;
    case FunctionKind::volt_watt_rate_limit:
      j["curve"] = curve_to_json(cfg.volt_watt_curve);
      j["ramp_up_per_min"] = cfg.ramp_up_per_min;
      j["ramp_down_per_min"] = cfg.ramp_down_per_min;
      break;
    case FunctionKind::freq_watt: j["curve"] = curve_to_json(cfg.freq_watt_curve); break;
    case FunctionKind::max_gen_limit: j["fraction"] = cfg.gen_limit_fraction; break;
    case FunctionKind::dyn_reactive_current:
      j["droop_kq"] = cfg.droop_kq;
      j["deadband_pu"] = cfg.deadband_pu;
      j["window_min"] = cfg.window_min;
      break;
    case FunctionKind::watt_pf: j["curve"] = curve_to_json(cfg.watt_pf_curve); break;
  }
  j["precedence"] = cfg.precedence == KvaPrecedence::watt_priority ? "watt" : "var";
  return j;
}

inline json feeder_to_json(const FeederDescription& d) {
  json j;
  j["schema"] = d.schema;
  j["source"] = {{"bus", d.source_bus}, {"voltage_pu", d.source_voltage_pu}};
  j["buses"] = json::array();
  for (const Bus& b : d.buses)
    j["buses"].push_back({{"id", b.id},
                          {"phases", b.phases.to_string()},
                          {"base_kv_ln", b.base_kv_ln},
                          {"v_min_pu", b.v_min_pu},
                          {"v_max_pu", b.v_max_pu}});
  j["lines"] = json::array();
  for (const LineSegment& l : d.lines)
    j["lines"].push_back({{"id", l.id},
                          {"from", l.from_bus},
                          {"to", l.to_bus},
                          {"phases", l.phases.to_string()},
                          {"length_km", l.length_km},
                          {"z_ohm", z_matrix_to_json(l.z_ohm, l.phases)}});
  j["regulators"] = json::array();
  for (const RegulatorBank& r : d.regulators)
    j["regulators"].push_back({{"id", r.id},
                               {"from", r.from_bus},
                               {"to", r.to_bus},
                               {"phases", r.phases.to_string()},
                               {"tap_min", r.tap_min},
                               {"tap_max", r.tap_max},
                               {"step_pu", r.step_pu},
                               {"setpoint_pu", r.setpoint_pu},
                               {"bandwidth_pu", r.bandwidth_pu},
                               {"daily_tap_limit", r.daily_tap_limit},
                               {"substation_ltc", r.is_substation_ltc},
                               {"initial_taps", per_phase_to_json(r.initial_taps, r.phases)}});
  j["capacitors"] = json::array();
  for (const CapacitorBank& c : d.capacitors)
    j["capacitors"].push_back(
        {{"id", c.id},
         {"bus", c.bus},
         {"phases", c.phases.to_string()},
         {"kvar_per_phase", per_phase_to_json(c.kvar_per_phase, c.phases)},
         {"mode", c.mode == CapacitorMode::fixed ? "fixed" : "switched"},
         {"on_threshold_pu", c.on_threshold_pu},
         {"off_threshold_pu", c.off_threshold_pu},
         {"initially_on", c.initially_on},
         {"daily_switch_limit", c.daily_switch_limit},
         {"q_max_node_kvar", c.q_max_node_kvar},
         {"ganged", c.ganged}});
  j["loads"] = json::array();
  for (const LoadPoint& l : d.loads) {
    json jl = {{"bus", l.bus},
               {"phases", l.phases.to_string()},
               {"kw", per_phase_to_json(l.kw, l.phases)},
               {"kvar", per_phase_to_json(l.kvar, l.phases)}};
    if (!l.profile_ref.empty()) jl["profile"] = l.profile_ref;
    j["loads"].push_back(jl);
  }
  j["pv_units"] = json::array();
  for (const PVUnit& p : d.pv_units)
    j["pv_units"].push_back({{"id", p.id},
                             {"bus", p.bus},
                             {"phases", p.phases.to_string()},
                             {"p_rated_kw", p.p_rated_kw},
                             {"s_rated_kva", p.s_rated_kva},
                             {"temp_coeff_per_degc", p.temp_coeff_per_degc},
                             {"function", config_to_json(p.function_config)}});
  return j;
}

inline FeederDescription load_feeder_file(const std::filesystem::path& path) {
  return feeder_from_json(load_json_file(path), path.filename().string());
}

/// Scenario document as parsed from disk; profiles may still be builtin
/// generator references that get materialized against (dt, steps, seed).
struct ScenarioFile {
  std::filesystem::path path;
  std::filesystem::path feeder_path;
  double dt_s = 60.0;
  double duration_s = 86400.0;
  std::uint64_t seed = 1;
  bool pv_enabled = true;
  std::string irradiance_ref = "builtin:cloudy_day";
  std::string temperature_ref = "builtin:daily_temperature";
  std::string frequency_ref;  // empty -> constant 60 Hz
  std::map<std::string, std::string> load_multiplier_refs;
  std::optional<InverterFunctionConfig> function;
  std::map<std::string, InverterFunctionConfig> per_pv_function;
  std::vector<SweepEntry> sweep;
  // Harmonics request (optional).
  std::vector<double> harmonic_snapshots_s;
  std::vector<int> harmonic_orders = default_harmonic_orders();
  std::vector<std::string> monitored_lines;  // empty -> all lines
  HarmonicSpectrum spectrum = HarmonicSpectrum::typical();
  std::filesystem::path output_dir = "out";

  std::size_t steps() const { return static_cast<std::size_t>(duration_s / dt_s + 0.5); }
};

inline ScenarioFile scenario_from_json(const json& j, const std::filesystem::path& path) {
  ScenarioFile sc;
  sc.path = path;
  std::string where = path.filename().string();
  std::string schema = get_field_or<std::string>(j, "schema", "scenario/1");
  if (schema != "scenario/1")
    throw Error(ErrorCode::parse_error, where + ": unsupported schema '" + schema + "'");

  std::filesystem::path feeder = get_field<std::string>(j, "feeder", where);
  sc.feeder_path = feeder.is_absolute() ? feeder : path.parent_path() / feeder;
  sc.dt_s = get_field_or<double>(j, "dt_s", 60.0);
  sc.duration_s = get_field_or<double>(j, "duration_s", 86400.0);
  if (!(sc.dt_s > 0.0) || !(sc.duration_s > 0.0))
    throw Error(ErrorCode::parse_error, where + ": dt_s and duration_s must be > 0");
  sc.seed = get_field_or<std::uint64_t>(j, "seed", 1);
  sc.pv_enabled = get_field_or<bool>(j, "pv_enabled", true);

  if (j.contains("profiles")) {
    const json& p = j["profiles"];
    sc.irradiance_ref = get_field_or<std::string>(p, "irradiance", sc.irradiance_ref);
    sc.temperature_ref = get_field_or<std::string>(p, "temperature", sc.temperature_ref);
    if (p.contains("frequency") && !p["frequency"].is_null())
      sc.frequency_ref = p["frequency"].get<std::string>();
    if (p.contains("load_multipliers"))
      for (auto it = p["load_multipliers"].begin(); it != p["load_multipliers"].end(); ++it)
        sc.load_multiplier_refs[it.key()] = it.value().get<std::string>();
  }

  if (j.contains("function")) sc.function = config_from_json(j["function"], where + ".function");
  if (j.contains("per_pv_function"))
    for (auto it = j["per_pv_function"].begin(); it != j["per_pv_function"].end(); ++it)
      sc.per_pv_function[it.key()] = config_from_json(it.value(), where + ".per_pv_function");

  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    if (sw.is_string() && sw.get<std::string>() == "paper_nine") {
      sc.sweep = paper_nine_functions();
    } else if (sw.is_array()) {
      for (const json& e : sw) {
        InverterFunctionConfig cfg = config_from_json(e, where + ".sweep");
        std::string name = get_field_or<std::string>(e, "name", function_kind_name(cfg.kind));
        sc.sweep.push_back({name, cfg});
      }
    } else {
      throw Error(ErrorCode::parse_error, where + ": sweep must be an array or \"paper_nine\"");
    }
  }

  if (j.contains("harmonics")) {
    const json& h = j["harmonics"];
    if (h.contains("snapshots_s"))
      for (const json& t : h["snapshots_s"]) sc.harmonic_snapshots_s.push_back(t.get<double>());
    if (h.contains("orders")) {
      sc.harmonic_orders.clear();
      for (const json& o : h["orders"]) sc.harmonic_orders.push_back(o.get<int>());
    }
    if (h.contains("monitored_lines"))
      for (const json& l : h["monitored_lines"])
        sc.monitored_lines.push_back(l.get<std::string>());
    if (h.contains("spectrum")) {
      sc.spectrum.entries.clear();
      sc.spectrum.entries[1] = {1.0, 0.0};
      for (auto it = h["spectrum"].begin(); it != h["spectrum"].end(); ++it) {
        int order = static_cast<int>(parse_long(it.key()));
        const json& e = it.value();
        if (!e.is_array() || e.size() != 2)
          throw Error(ErrorCode::parse_error,
                      where + ": spectrum entries must be [fraction, angle_deg]");
        sc.spectrum.entries[order] = {e[0].get<double>(), e[1].get<double>()};
      }
      sc.spectrum.validate();
    }
  }

  if (j.contains("output_dir")) sc.output_dir = j["output_dir"].get<std::string>();
  if (!sc.output_dir.is_absolute()) sc.output_dir = path.parent_path() / sc.output_dir;
  return sc;
}

inline ScenarioFile load_scenario_file(const std::filesystem::path& path) {
  return scenario_from_json(load_json_file(path), path);
}

}  // namespace io

}  // namespace feedersim
