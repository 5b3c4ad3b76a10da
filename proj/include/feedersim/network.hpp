#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feedersim/inverter.hpp"
#include "feedersim/phase.hpp"

namespace feedersim {

struct Bus {
  std::string id;
  PhaseSet phases;
  double base_kv_ln = 0.0;  // line-to-neutral kilovolts
  double v_min_pu = 0.95;
  double v_max_pu = 1.05;
};

struct LineSegment {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  PhaseSet phases;        // phases carried = shared phases of the endpoints
  PhaseMatrix z_ohm;      // total series impedance, entries on `phases` only
  double length_km = 0.0;  // informational; impedance is given as a total
};

struct RegulatorBank {
  std::string id;
  std::string from_bus;  // source side
  std::string to_bus;    // regulated side
  PhaseSet phases;
  int tap_min = -16;
  int tap_max = 16;
  double step_pu = 0.00625;
  double setpoint_pu = 1.0167;   // ~122 V on a 120 V base
  double bandwidth_pu = 0.0167;  // ~2 V on a 120 V base
  int daily_tap_limit = 273;
  bool is_substation_ltc = false;
  PerPhase<int> initial_taps{0, 0, 0};

  double ratio(int tap) const { return 1.0 + tap * step_pu; }
};

enum class CapacitorMode { fixed, voltage_switched };

struct CapacitorBank {
  std::string id;
  std::string bus;
  PhaseSet phases;
  PerPhase<double> kvar_per_phase{0, 0, 0};  // rating at nominal voltage
  CapacitorMode mode = CapacitorMode::fixed;
  double on_threshold_pu = 0.97;
  double off_threshold_pu = 1.03;
  bool initially_on = true;
  int daily_switch_limit = 20;
  double q_max_node_kvar = 0.0;  // allowable injection at the node, all phases
  bool ganged = true;            // switch all phases together
};

struct LoadPoint {
  std::string bus;
  PhaseSet phases;
  PerPhase<double> kw{0, 0, 0};
  PerPhase<double> kvar{0, 0, 0};
  std::string profile_ref;  // name of a load multiplier series, may be empty
};

struct PVUnit {
  std::string id;
  std::string bus;
  PhaseSet phases;
  double p_rated_kw = 1000.0;
  double s_rated_kva = 1200.0;
  double temp_coeff_per_degc = -0.004;
  InverterFunctionConfig function_config;
};

/// Raw parsed feeder document, before validation.
struct FeederDescription {
  std::string schema = "feeder/1";
  std::string source_bus;
  double source_voltage_pu = 1.0;
  std::vector<Bus> buses;
  std::vector<LineSegment> lines;
  std::vector<RegulatorBank> regulators;
  std::vector<CapacitorBank> capacitors;
  std::vector<LoadPoint> loads;
  std::vector<PVUnit> pv_units;
};

/// A series tree edge: either a line segment or a regulator bank.
struct SeriesEdge {
  enum class Kind { line, regulator };
  Kind kind;
  std::size_t element;  // index into lines() or regulators()
  std::size_t from;     // bus index, closer to the source
  std::size_t to;
  PhaseSet phases;
};

/// Validated immutable radial feeder. Safe to share across threads; all
/// per-timestep state lives outside of it.
class Network {
 public:
  static Network build(const FeederDescription& d) { return Network(d); }

  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<LineSegment>& lines() const { return lines_; }
  const std::vector<RegulatorBank>& regulators() const { return regulators_; }
  const std::vector<CapacitorBank>& capacitors() const { return capacitors_; }
  const std::vector<LoadPoint>& loads() const { return loads_; }
  const std::vector<PVUnit>& pv_units() const { return pv_units_; }
  const std::vector<SeriesEdge>& edges() const { return edges_; }

  std::size_t source_bus() const { return source_; }
  double source_voltage_pu() const { return source_voltage_pu_; }

  std::size_t bus_index(const std::string& id) const {
    auto it = bus_index_.find(id);
    if (it == bus_index_.end())
      throw Error(ErrorCode::dangling_reference, "unknown bus '" + id + "'");
    return it->second;
  }

  /// Buses from the source towards the leaves; the reverse order drives the
  /// backward sweep. Siblings are visited in ascending id order.
  const std::vector<std::size_t>& downstream_order() const { return order_; }

  /// Edge feeding the bus, or nullopt for the source.
  std::optional<std::size_t> parent_edge(std::size_t bus) const {
    return parent_edge_[bus] == npos ? std::nullopt : std::make_optional(parent_edge_[bus]);
  }
  const std::vector<std::size_t>& child_edges(std::size_t bus) const { return child_edges_[bus]; }

  std::size_t capacitor_bus(std::size_t cap) const { return cap_bus_[cap]; }
  std::size_t load_bus(std::size_t load) const { return load_bus_[load]; }
  std::size_t pv_bus(std::size_t pv) const { return pv_bus_[pv]; }

  /// Total nominal load, used to scale power-balance tolerances.
  double total_load_kva() const { return total_load_kva_; }

  FeederDescription to_description() const {
    FeederDescription d;
    d.source_bus = buses_[source_].id;
    d.source_voltage_pu = source_voltage_pu_;
    d.buses = buses_;
    d.lines = lines_;
    d.regulators = regulators_;
    d.capacitors = capacitors_;
    d.loads = loads_;
    d.pv_units = pv_units_;
    return d;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit Network(const FeederDescription& d)
      : buses_(d.buses),
        lines_(d.lines),
        regulators_(d.regulators),
        capacitors_(d.capacitors),
        loads_(d.loads),
        pv_units_(d.pv_units),
        source_voltage_pu_(d.source_voltage_pu) {
    index_buses();
    validate_buses();
    build_tree(d);
    validate_devices();
  }

  void index_buses() {
    for (std::size_t i = 0; i < buses_.size(); ++i) {
      if (!bus_index_.emplace(buses_[i].id, i).second)
        throw Error(ErrorCode::parse_error, "duplicate bus id '" + buses_[i].id + "'");
    }
  }

  void validate_buses() const {
    if (buses_.empty()) throw Error(ErrorCode::parse_error, "feeder has no buses");
    for (const Bus& b : buses_) {
      if (b.phases.empty())
        throw Error(ErrorCode::phase_mismatch, "bus '" + b.id + "' has no phases");
      if (!(b.base_kv_ln > 0.0))
        throw Error(ErrorCode::non_positive_rating, "bus '" + b.id + "' base_kv_ln must be > 0");
      if (!(0.0 < b.v_min_pu && b.v_min_pu < b.v_max_pu))
        throw Error(ErrorCode::invalid_device_config,
                    "bus '" + b.id + "' voltage limits must satisfy 0 < v_min < v_max");
    }
  }

  void build_tree(const FeederDescription& d) {
    if (d.source_bus.empty())
      throw Error(ErrorCode::parse_error, "feeder has no source bus");
    source_ = bus_index(d.source_bus);
    if (!(source_voltage_pu_ > 0.0))
      throw Error(ErrorCode::non_positive_rating, "source voltage must be > 0 pu");

    // Collect undirected candidate edges, then root the tree at the source.
    struct Raw {
      SeriesEdge::Kind kind;
      std::size_t element;
      std::size_t a, b;
    };
    std::vector<Raw> raw;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const LineSegment& l = lines_[i];
      std::size_t a = bus_index(l.from_bus), b = bus_index(l.to_bus);
      if (a == b)
        throw Error(ErrorCode::cycle_detected, "line '" + l.id + "' connects bus to itself");
      validate_line(l, a, b);
      raw.push_back({SeriesEdge::Kind::line, i, a, b});
    }
    for (std::size_t i = 0; i < regulators_.size(); ++i) {
      const RegulatorBank& r = regulators_[i];
      std::size_t a = bus_index(r.from_bus), b = bus_index(r.to_bus);
      if (a == b)
        throw Error(ErrorCode::cycle_detected, "regulator '" + r.id + "' connects bus to itself");
      validate_regulator(r);
      raw.push_back({SeriesEdge::Kind::regulator, i, a, b});
    }

    std::vector<std::vector<std::size_t>> adjacency(buses_.size());
    for (std::size_t e = 0; e < raw.size(); ++e) {
      adjacency[raw[e].a].push_back(e);
      adjacency[raw[e].b].push_back(e);
    }

    parent_edge_.assign(buses_.size(), npos);
    child_edges_.assign(buses_.size(), {});
    std::vector<bool> visited(buses_.size(), false);
    std::vector<bool> edge_used(raw.size(), false);

    // BFS with children taken in ascending bus-id order so the resulting
    // downstream order is deterministic regardless of input ordering.
    std::vector<std::size_t> frontier{source_};
    visited[source_] = true;
    order_.clear();
    while (!frontier.empty()) {
      std::sort(frontier.begin(), frontier.end(),
                [&](std::size_t x, std::size_t y) { return buses_[x].id < buses_[y].id; });
      std::vector<std::size_t> next;
      for (std::size_t u : frontier) {
        order_.push_back(u);
        for (std::size_t e : adjacency[u]) {
          if (edge_used[e]) continue;
          edge_used[e] = true;
          std::size_t v = raw[e].a == u ? raw[e].b : raw[e].a;
          if (visited[v])
            throw Error(ErrorCode::cycle_detected,
                        "edge between '" + buses_[u].id + "' and '" + buses_[v].id +
                            "' closes a loop");
          visited[v] = true;

          SeriesEdge se;
          se.kind = raw[e].kind;
          se.element = raw[e].element;
          se.from = u;
          se.to = v;
          se.phases = edge_phases(se);
          check_edge_phases(se);
          std::size_t edge_idx = edges_.size();
          edges_.push_back(se);
          parent_edge_[v] = edge_idx;
          child_edges_[u].push_back(edge_idx);
          next.push_back(v);
        }
      }
      frontier = std::move(next);
    }

    for (std::size_t i = 0; i < buses_.size(); ++i)
      if (!visited[i])
        throw Error(ErrorCode::cycle_detected,
                    "bus '" + buses_[i].id + "' is not reachable from the source (non-radial)");

    // Children were appended in discovery order; keep them sorted by child id
    // so sweeps are deterministic too.
    for (auto& kids : child_edges_)
      std::sort(kids.begin(), kids.end(), [&](std::size_t x, std::size_t y) {
        return buses_[edges_[x].to].id < buses_[edges_[y].to].id;
      });
  }

  PhaseSet edge_phases(const SeriesEdge& se) const {
    if (se.kind == SeriesEdge::Kind::line) return lines_[se.element].phases;
    return regulators_[se.element].phases;
  }

  void check_edge_phases(const SeriesEdge& se) const {
    const std::string& name = se.kind == SeriesEdge::Kind::line ? lines_[se.element].id
                                                                : regulators_[se.element].id;
    if (se.phases.empty())
      throw Error(ErrorCode::phase_mismatch, "edge '" + name + "' carries no phases");
    if (!se.phases.subset_of(buses_[se.from].phases))
      throw Error(ErrorCode::phase_mismatch,
                  "edge '" + name + "' uses phases missing at bus '" + buses_[se.from].id + "'");
    if (!buses_[se.to].phases.subset_of(se.phases))
      throw Error(ErrorCode::phase_mismatch,
                  "bus '" + buses_[se.to].id + "' has phases not fed by edge '" + name + "'");
  }

  void validate_line(const LineSegment& l, std::size_t a, std::size_t b) const {
    (void)a;
    (void)b;
    if (l.phases.empty())
      throw Error(ErrorCode::phase_mismatch, "line '" + l.id + "' has no phases");
    for (Phase r : l.phases) {
      for (Phase c : l.phases) {
        Complex zrc = l.z_ohm.at(r, c), zcr = l.z_ohm.at(c, r);
        if (std::abs(zrc - zcr) > 1e-9 * std::max(1.0, std::abs(zrc)))
          throw Error(ErrorCode::invalid_impedance, "line '" + l.id + "' impedance not symmetric");
      }
      double diag = std::abs(l.z_ohm.at(r, r));
      double off = 0.0;
      for (Phase c : l.phases)
        if (c != r) off += std::abs(l.z_ohm.at(r, c));
      if (diag + 1e-12 < off)
        throw Error(ErrorCode::invalid_impedance,
                    "line '" + l.id + "' impedance not diagonally dominant");
    }
  }

  void validate_regulator(const RegulatorBank& r) const {
    if (!(r.step_pu > 0.0))
      throw Error(ErrorCode::invalid_device_config, "regulator '" + r.id + "' step_pu must be > 0");
    if (r.tap_min > r.tap_max)
      throw Error(ErrorCode::invalid_device_config, "regulator '" + r.id + "' tap range empty");
    if (!(r.bandwidth_pu > 0.0) || !(r.setpoint_pu > 0.0))
      throw Error(ErrorCode::invalid_device_config,
                  "regulator '" + r.id + "' setpoint and bandwidth must be > 0");
    if (r.daily_tap_limit < 0)
      throw Error(ErrorCode::invalid_device_config,
                  "regulator '" + r.id + "' daily_tap_limit must be >= 0");
    for (Phase p : r.phases) {
      int tap = r.initial_taps[phase_index(p)];
      if (tap < r.tap_min || tap > r.tap_max)
        throw Error(ErrorCode::invalid_device_config,
                    "regulator '" + r.id + "' initial tap outside range");
    }
  }

  void validate_devices() {
    for (std::size_t i = 0; i < capacitors_.size(); ++i) {
      CapacitorBank& c = capacitors_[i];
      std::size_t bus = bus_index(c.bus);
      require_device_phases(c.phases, bus, "capacitor '" + c.id + "'");
      for (Phase p : c.phases)
        if (c.kvar_per_phase[phase_index(p)] < 0.0)
          throw Error(ErrorCode::non_positive_rating,
                      "capacitor '" + c.id + "' kvar rating must be >= 0");
      if (c.mode == CapacitorMode::voltage_switched && !(c.on_threshold_pu < c.off_threshold_pu))
        throw Error(ErrorCode::invalid_device_config,
                    "capacitor '" + c.id + "' needs on_threshold < off_threshold");
      if (c.daily_switch_limit < 0)
        throw Error(ErrorCode::invalid_device_config,
                    "capacitor '" + c.id + "' daily_switch_limit must be >= 0");
      if (!(c.q_max_node_kvar > 0.0)) {
        // Unspecified cap defaults to 25% headroom above the bank rating.
        double total = 0.0;
        for (Phase p : c.phases) total += c.kvar_per_phase[phase_index(p)];
        c.q_max_node_kvar = 1.25 * total;
      }
      cap_bus_.push_back(bus);
    }
    for (const LoadPoint& l : loads_) {
      std::size_t bus = bus_index(l.bus);
      require_device_phases(l.phases, bus, "load at '" + l.bus + "'");
      for (Phase p : l.phases)
        if (l.kw[phase_index(p)] < 0.0)
          throw Error(ErrorCode::non_positive_rating, "load at '" + l.bus + "' kw must be >= 0");
      load_bus_.push_back(bus);
      for (Phase p : l.phases)
        total_load_kva_ += std::hypot(l.kw[phase_index(p)], l.kvar[phase_index(p)]);
    }
    for (const PVUnit& pv : pv_units_) {
      std::size_t bus = bus_index(pv.bus);
      require_device_phases(pv.phases, bus, "pv '" + pv.id + "'");
      if (!(pv.p_rated_kw > 0.0) || !(pv.s_rated_kva > 0.0))
        throw Error(ErrorCode::non_positive_rating, "pv '" + pv.id + "' ratings must be > 0");
      pv.function_config.validate();
      pv_bus_.push_back(bus);
    }
  }

  void require_device_phases(PhaseSet ph, std::size_t bus, const std::string& what) const {
    if (ph.empty()) throw Error(ErrorCode::phase_mismatch, what + " has no phases");
    if (!ph.subset_of(buses_[bus].phases))
      throw Error(ErrorCode::phase_mismatch,
                  what + " uses phases not present at bus '" + buses_[bus].id + "'");
  }

  std::vector<Bus> buses_;
  std::vector<LineSegment> lines_;
  std::vector<RegulatorBank> regulators_;
  std::vector<CapacitorBank> capacitors_;
  std::vector<LoadPoint> loads_;
  std::vector<PVUnit> pv_units_;
  double source_voltage_pu_ = 1.0;
  std::size_t source_ = 0;
  std::map<std::string, std::size_t> bus_index_;
  std::vector<SeriesEdge> edges_;
  std::vector<std::size_t> parent_edge_;
  std::vector<std::vector<std::size_t>> child_edges_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> cap_bus_;
  std::vector<std::size_t> load_bus_;
  std::vector<std::size_t> pv_bus_;
  double total_load_kva_ = 0.0;
};

inline Network build_network(const FeederDescription& d) { return Network::build(d); }

/// Bus ids from the source to the leaves.
inline std::vector<std::string> downstream_order(const Network& n) {
  std::vector<std::string> out;
  out.reserve(n.buses().size());
  for (std::size_t i : n.downstream_order()) out.push_back(n.buses()[i].id);
  return out;
}

}  // namespace feedersim
