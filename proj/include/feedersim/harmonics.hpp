#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "feedersim/network.hpp"
#include "feedersim/power_flow.hpp"

namespace feedersim {

/// Inverter emission spectrum: harmonic order -> (magnitude as a fraction of
/// the fundamental current, phase angle in degrees).
struct HarmonicSpectrum {
  std::map<int, std::pair<double, double>> entries;

  static HarmonicSpectrum typical() {
    HarmonicSpectrum s;
    s.entries = {{1, {1.0, 0.0}},   {3, {0.015, 0.0}}, {5, {0.025, 0.0}},
                 {7, {0.015, 0.0}}, {11, {0.007, 0.0}}, {13, {0.005, 0.0}}};
    return s;
  }

  static HarmonicSpectrum silent() {
    HarmonicSpectrum s;
    s.entries = {{1, {1.0, 0.0}}};
    return s;
  }

  void validate() const {
    auto it = entries.find(1);
    if (it == entries.end() || it->second.first != 1.0)
      throw Error(ErrorCode::invalid_device_config,
                  "spectrum must contain order 1 with magnitude 1.0");
    for (const auto& [h, e] : entries) {
      if (h < 1) throw Error(ErrorCode::unknown_order, "harmonic order must be >= 1");
      if (e.first < 0.0)
        throw Error(ErrorCode::invalid_device_config, "spectrum fractions must be >= 0");
    }
  }

  double fraction(int h) const {
    auto it = entries.find(h);
    if (it == entries.end())
      throw Error(ErrorCode::unknown_order, "order " + std::to_string(h) + " not in spectrum");
    return it->second.first;
  }
  double angle_deg(int h) const { return entries.at(h).second; }
};

inline const std::vector<int>& default_harmonic_orders() {
  static const std::vector<int> orders{1, 3, 5, 7, 11, 13};
  return orders;
}

/// Per-line voltage (at the downstream bus) and current magnitudes for each
/// solved order, plus the THD aggregates derived from them.
struct HarmonicResult {
  std::vector<int> orders;  // ascending, order 1 first
  std::vector<std::string> line_ids;
  std::vector<PhaseSet> line_phases;

  struct PhaseMagnitudes {
    PerPhase<double> v_mag_pu{0, 0, 0};
    PerPhase<double> i_mag_a{0, 0, 0};
  };
  // magnitudes[line_index][order_position]
  std::vector<std::vector<PhaseMagnitudes>> magnitudes;

  std::size_t line_index(const std::string& id) const {
    for (std::size_t i = 0; i < line_ids.size(); ++i)
      if (line_ids[i] == id) return i;
    throw Error(ErrorCode::dangling_reference, "unknown monitored line '" + id + "'");
  }
};

struct ThdValue {
  PerPhase<double> thd_v_pct{0, 0, 0};
  PerPhase<double> thd_i_pct{0, 0, 0};
};

/// THD = sqrt(sum of squared harmonic magnitudes) / fundamental * 100, per
/// phase, for both the line current and the downstream bus voltage.
inline ThdValue thd(const HarmonicResult& res, const std::string& line_id) {
  if (res.orders.empty() || res.orders.front() != 1)
    throw Error(ErrorCode::missing_fundamental, "THD needs order 1 in the result");
  std::size_t li = res.line_index(line_id);
  ThdValue out;
  for (int i = 0; i < 3; ++i) {
    double v1 = res.magnitudes[li][0].v_mag_pu[i];
    double i1 = res.magnitudes[li][0].i_mag_a[i];
    double sv = 0.0, si = 0.0;
    for (std::size_t k = 1; k < res.orders.size(); ++k) {
      sv += res.magnitudes[li][k].v_mag_pu[i] * res.magnitudes[li][k].v_mag_pu[i];
      si += res.magnitudes[li][k].i_mag_a[i] * res.magnitudes[li][k].i_mag_a[i];
    }
    out.thd_v_pct[i] = v1 > 0.0 ? std::sqrt(sv) / v1 * 100.0 : 0.0;
    out.thd_i_pct[i] = i1 > 0.0 ? std::sqrt(si) / i1 * 100.0 : 0.0;
  }
  return out;
}

/// Frequency scan at the given orders. For h > 1 the network is linear:
/// series reactances scale by h (resistance unscaled), the source is shorted,
/// loads become constant impedances at their fundamental operating point, and
/// every inverter injects fraction_h of its fundamental current rotated by
/// the spectrum angle. The radial structure admits one exact
/// backward-fold/forward-unfold pass per order. Order 1 is copied from the
/// fundamental solution.
inline HarmonicResult harmonic_solution(const Network& net, const Solution& fundamental,
                                        const std::map<std::string, HarmonicSpectrum>& spectra,
                                        std::vector<int> orders) {
  if (!fundamental.converged)
    throw Error(ErrorCode::unconverged_solution, "fundamental solution did not converge");
  for (const auto& [id, s] : spectra) s.validate();
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  if (orders.empty() || orders.front() != 1)
    throw Error(ErrorCode::missing_fundamental, "orders must include the fundamental");
  for (int h : orders)
    for (const auto& [id, s] : spectra)
      (void)s.fraction(h);  // throws UnknownOrder on gaps

  const std::size_t nbus = net.buses().size();
  std::vector<double> v_base(nbus);
  for (std::size_t i = 0; i < nbus; ++i) v_base[i] = net.buses()[i].base_kv_ln * 1000.0;

  // Fundamental bus voltages in volts.
  std::vector<Cx3> v1(nbus, Cx3{});
  for (std::size_t b = 0; b < nbus; ++b)
    for (Phase p : net.buses()[b].phases)
      v1[b][phase_index(p)] = fundamental.bus_v_pu[b][phase_index(p)] * v_base[b];

  // Fundamental inverter terminal currents in amps.
  std::vector<Cx3> pv_i1(net.pv_units().size(), Cx3{});
  if (!fundamental.injections.pv_kva.empty()) {
    for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi) {
      std::size_t bus = net.pv_bus(pi);
      for (Phase p : net.pv_units()[pi].phases) {
        int i = phase_index(p);
        Complex s_va = fundamental.injections.pv_kva[pi][i] * 1000.0;
        Complex v = v1[bus][i];
        if (std::abs(v) > 0.0) pv_i1[pi][i] = std::conj(s_va / v);
      }
    }
  }

  HarmonicResult res;
  res.orders = orders;
  for (const LineSegment& l : net.lines()) {
    res.line_ids.push_back(l.id);
    res.line_phases.push_back(l.phases);
  }
  res.magnitudes.assign(net.lines().size(),
                        std::vector<HarmonicResult::PhaseMagnitudes>(orders.size()));

  // Map each line to its tree edge.
  std::vector<std::size_t> line_edge(net.lines().size());
  for (std::size_t e = 0; e < net.edges().size(); ++e)
    if (net.edges()[e].kind == SeriesEdge::Kind::line) line_edge[net.edges()[e].element] = e;

  for (std::size_t oi = 0; oi < orders.size(); ++oi) {
    int h = orders[oi];
    if (h == 1) {
      for (std::size_t li = 0; li < net.lines().size(); ++li) {
        std::size_t e = line_edge[li];
        std::size_t to = net.edges()[e].to;
        for (Phase p : net.edges()[e].phases) {
          int i = phase_index(p);
          res.magnitudes[li][oi].v_mag_pu[i] = std::abs(fundamental.bus_v_pu[to][i]);
          res.magnitudes[li][oi].i_mag_a[i] = std::abs(fundamental.edge_i_amps[e][i]);
        }
      }
      continue;
    }

    // Per-bus shunt admittance at order h.
    std::vector<PhaseMatrix> shunt(nbus);
    for (std::size_t li = 0; li < net.loads().size(); ++li) {
      if (fundamental.injections.load_kva.empty()) break;
      std::size_t bus = net.load_bus(li);
      for (Phase p : net.loads()[li].phases) {
        int i = phase_index(p);
        Complex s_va = fundamental.injections.load_kva[li][i] * 1000.0;
        double vm = std::abs(v1[bus][i]);
        if (vm <= 0.0 || s_va == Complex{}) continue;
        // Parallel R-X conversion: resistance unscaled, reactance scaled by h.
        Complex y{s_va.real() / (vm * vm), -s_va.imag() / (static_cast<double>(h) * vm * vm)};
        shunt[bus].at(p, p) += y;
      }
    }
    for (std::size_t c = 0; c < net.capacitors().size(); ++c) {
      const CapacitorBank& cap = net.capacitors()[c];
      std::size_t bus = net.capacitor_bus(c);
      for (Phase p : cap.phases) {
        int i = phase_index(p);
        if (fundamental.caps_on.empty() || !fundamental.caps_on[c][i]) continue;
        double b_s = feedersim::detail::cap_susceptance(cap, p, v_base[bus]);
        shunt[bus].at(p, p) += Complex(0.0, static_cast<double>(h) * b_s);
      }
    }

    // Injection current sources.
    std::vector<Cx3> inject(nbus, Cx3{});
    for (std::size_t pi = 0; pi < net.pv_units().size(); ++pi) {
      auto it = spectra.find(net.pv_units()[pi].id);
      if (it == spectra.end()) continue;
      double frac = it->second.fraction(h);
      double ang = it->second.angle_deg(h) * std::numbers::pi / 180.0;
      Complex rot = std::polar(1.0, ang);
      std::size_t bus = net.pv_bus(pi);
      for (Phase p : net.pv_units()[pi].phases) {
        int i = phase_index(p);
        inject[bus][i] += frac * pv_i1[pi][i] * rot;
      }
    }

    // Backward fold: aggregate each subtree into (Y_eq, J_eq) seen from its
    // head bus, so that I_from_parent = Y_eq V - J_eq.
    std::vector<PhaseMatrix> y_eq = shunt;
    std::vector<Cx3> j_eq = inject;
    std::vector<PhaseMatrix> edge_y(net.edges().size());
    std::vector<Cx3> edge_j(net.edges().size(), Cx3{});

    const auto& order_list = net.downstream_order();
    for (auto it = order_list.rbegin(); it != order_list.rend(); ++it) {
      std::size_t b = *it;
      auto pe = net.parent_edge(b);
      if (!pe) continue;
      const SeriesEdge& e = net.edges()[*pe];
      if (e.kind == SeriesEdge::Kind::line) {
        PhaseMatrix z = net.lines()[e.element].z_ohm;
        for (Phase r : e.phases)
          for (Phase c : e.phases)
            z.at(r, c) = Complex(z.at(r, c).real(), z.at(r, c).imag() * h);
        PhaseMatrix a = PhaseMatrix::identity(e.phases).plus(y_eq[b].times(z, e.phases), e.phases);
        edge_y[*pe] = solve_phases(a, y_eq[b], e.phases);
        Cx3 j = solve_phases(a, j_eq[b], e.phases);
        edge_j[*pe] = j;
        y_eq[e.from] = y_eq[e.from].plus(edge_y[*pe], e.phases);
        for (Phase p : e.phases) j_eq[e.from][phase_index(p)] += j[phase_index(p)];
      } else {
        const RegulatorBank& reg = net.regulators()[e.element];
        PhaseMatrix a_y;
        Cx3 a_j{};
        for (Phase r : e.phases) {
          double ar = fundamental.taps.empty()
                          ? reg.ratio(reg.initial_taps[phase_index(r)])
                          : reg.ratio(fundamental.taps[e.element][phase_index(r)]);
          for (Phase c : e.phases) {
            double ac = fundamental.taps.empty()
                            ? reg.ratio(reg.initial_taps[phase_index(c)])
                            : reg.ratio(fundamental.taps[e.element][phase_index(c)]);
            a_y.at(r, c) = ar * y_eq[b].at(r, c) * ac;
          }
          a_j[phase_index(r)] = ar * j_eq[b][phase_index(r)];
        }
        edge_y[*pe] = a_y;
        edge_j[*pe] = a_j;
        y_eq[e.from] = y_eq[e.from].plus(a_y, e.phases);
        for (Phase p : e.phases) j_eq[e.from][phase_index(p)] += a_j[phase_index(p)];
      }
    }

    // Forward unfold from the shorted source.
    std::vector<Cx3> vh(nbus, Cx3{});
    std::vector<Cx3> ih_to(net.edges().size(), Cx3{});  // current at the `to` side
    for (std::size_t idx = 1; idx < order_list.size(); ++idx) {
      std::size_t b = order_list[idx];
      std::size_t pe = *net.parent_edge(b);
      const SeriesEdge& e = net.edges()[pe];
      if (e.kind == SeriesEdge::Kind::line) {
        Cx3 i_line = edge_y[pe].mul(vh[e.from], e.phases);
        for (Phase p : e.phases) i_line[phase_index(p)] -= edge_j[pe][phase_index(p)];
        PhaseMatrix z = net.lines()[e.element].z_ohm;
        for (Phase r : e.phases)
          for (Phase c : e.phases)
            z.at(r, c) = Complex(z.at(r, c).real(), z.at(r, c).imag() * h);
        Cx3 drop = z.mul(i_line, e.phases);
        for (Phase p : e.phases) {
          int i = phase_index(p);
          vh[b][i] = vh[e.from][i] - drop[i];
        }
        ih_to[pe] = i_line;
      } else {
        const RegulatorBank& reg = net.regulators()[e.element];
        for (Phase p : e.phases) {
          int i = phase_index(p);
          double a = fundamental.taps.empty() ? reg.ratio(reg.initial_taps[i])
                                              : reg.ratio(fundamental.taps[e.element][i]);
          vh[b][i] = a * vh[e.from][i];
        }
        Cx3 i_to = y_eq[b].mul(vh[b], e.phases);
        for (Phase p : e.phases) i_to[phase_index(p)] -= j_eq[b][phase_index(p)];
        ih_to[pe] = i_to;
      }
    }

    for (std::size_t li = 0; li < net.lines().size(); ++li) {
      std::size_t e = line_edge[li];
      std::size_t to = net.edges()[e].to;
      for (Phase p : net.edges()[e].phases) {
        int i = phase_index(p);
        res.magnitudes[li][oi].v_mag_pu[i] = std::abs(vh[to][i]) / v_base[to];
        res.magnitudes[li][oi].i_mag_a[i] = std::abs(ih_to[e][i]);
      }
    }
  }

  return res;
}

}  // namespace feedersim
