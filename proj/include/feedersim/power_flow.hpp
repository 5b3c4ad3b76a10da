#pragma once

#include <cmath>
#include <vector>

#include "feedersim/network.hpp"
#include "feedersim/phase.hpp"

namespace feedersim {

/// Per-bus per-phase complex power injections in kW + j*kvar. Generation is
/// positive, consumption negative. Capacitor banks are not part of the set:
/// the solver models them as voltage-dependent shunts from the switch states.
struct InjectionSet {
  std::vector<Cx3> net_kva;   // per bus
  std::vector<Cx3> load_kva;  // per load point, consumption positive (echo)
  std::vector<Cx3> pv_kva;    // per pv unit, injection positive (echo)

  static InjectionSet zeros(const Network& n) {
    InjectionSet s;
    s.net_kva.assign(n.buses().size(), Cx3{});
    return s;
  }

  void add(std::size_t bus, Phase p, Complex s_kva) { net_kva[bus][phase_index(p)] += s_kva; }
};

struct TapState {
  std::vector<PerPhase<int>> taps;  // per regulator bank

  static TapState initial(const Network& n) {
    TapState t;
    for (const RegulatorBank& r : n.regulators()) t.taps.push_back(r.initial_taps);
    return t;
  }
};

struct CapState {
  std::vector<PerPhase<bool>> on;  // per capacitor bank

  static CapState initial(const Network& n) {
    CapState c;
    for (const CapacitorBank& cap : n.capacitors()) {
      PerPhase<bool> st{false, false, false};
      bool on = cap.mode == CapacitorMode::fixed ? true : cap.initially_on;
      for (Phase p : cap.phases) st[phase_index(p)] = on;
      c.on.push_back(st);
    }
    return c;
  }
};

struct SolveOptions {
  double tol_pu = 1e-8;
  int max_iterations = 200;
};

/// Steady-state operating point of the whole feeder at one instant (or one
/// harmonic order). Voltages are per unit on each bus's own base; currents in
/// amperes at the downstream end of each series edge; powers in kVA.
struct Solution {
  bool converged = false;
  int iterations = 0;
  std::vector<Cx3> bus_v_pu;
  std::vector<Cx3> edge_i_amps;
  std::vector<Cx3> edge_s_from_kva;
  std::vector<Cx3> edge_s_to_kva;
  std::vector<PerPhase<double>> cap_q_kvar;  // actual injection per bank
  Cx3 slack_s_kva{};                          // net power entering at the source

  // Echo of the operating point that produced the solution.
  InjectionSet injections;
  std::vector<PerPhase<int>> taps;
  std::vector<PerPhase<bool>> caps_on;

  double v_mag_pu(std::size_t bus, Phase p) const {
    return std::abs(bus_v_pu[bus][phase_index(p)]);
  }
};

namespace detail {

/// Capacitor shunt susceptance in siemens at nominal bus voltage, per phase.
inline double cap_susceptance(const CapacitorBank& cap, Phase p, double v_base_volts) {
  double q_var = cap.kvar_per_phase[phase_index(p)] * 1000.0;
  return q_var / (v_base_volts * v_base_volts);
}

}  // namespace detail

/// Ladder (backward/forward sweep) solver for the radial network. Works in
/// volts and amperes internally and reports per unit on each bus's base, so
/// tap ratios never mix voltage bases.
inline Solution solve(const Network& net, const InjectionSet& injections, const TapState& taps,
                      const CapState& caps, const SolveOptions& opt = {}) {
  const std::size_t nbus = net.buses().size();
  const auto& order = net.downstream_order();

  for (const LineSegment& l : net.lines())
    for (Phase p : l.phases)
      if (std::abs(l.z_ohm.at(p, p)) < 1e-12)
        throw Error(ErrorCode::singular_segment,
                    "line '" + l.id + "' has a zero series impedance on phase " +
                        std::string(1, phase_letter(p)));

  std::vector<double> v_base(nbus);
  for (std::size_t i = 0; i < nbus; ++i) v_base[i] = net.buses()[i].base_kv_ln * 1000.0;

  // Per-bus shunt susceptance aggregated from capacitor banks that are on.
  std::vector<PerPhase<double>> shunt_b(nbus, PerPhase<double>{0, 0, 0});
  for (std::size_t c = 0; c < net.capacitors().size(); ++c) {
    const CapacitorBank& cap = net.capacitors()[c];
    std::size_t bus = net.capacitor_bus(c);
    for (Phase p : cap.phases)
      if (caps.on.at(c)[phase_index(p)])
        shunt_b[bus][phase_index(p)] += detail::cap_susceptance(cap, p, v_base[bus]);
  }

  // Flat start: source voltage propagated through the tap ratios.
  std::vector<Cx3> v(nbus, Cx3{});
  const Bus& src = net.buses()[net.source_bus()];
  for (Phase p : src.phases)
    v[net.source_bus()][phase_index(p)] =
        net.source_voltage_pu() * v_base[net.source_bus()] * phase_reference(p);
  for (std::size_t oi = 1; oi < order.size(); ++oi) {
    std::size_t b = order[oi];
    const SeriesEdge& e = net.edges()[*net.parent_edge(b)];
    for (Phase p : net.buses()[b].phases) {
      Complex up = v[e.from][phase_index(p)];
      if (e.kind == SeriesEdge::Kind::regulator) {
        const RegulatorBank& r = net.regulators()[e.element];
        up *= r.ratio(taps.taps.at(e.element)[phase_index(p)]);
      }
      v[b][phase_index(p)] = up;
    }
  }

  std::vector<Cx3> edge_i(net.edges().size(), Cx3{});  // current at the `to` side
  Cx3 src_accum{};

  auto injection_current = [&](std::size_t bus, Phase p) -> Complex {
    Complex s_va = injections.net_kva[bus][phase_index(p)] * 1000.0;
    Complex vb = v[bus][phase_index(p)];
    if (std::abs(vb) < 1e-6 * v_base[bus]) vb = v_base[bus] * phase_reference(p);
    return std::conj(s_va / vb);
  };

  auto backward = [&]() {
    std::vector<Cx3> down(nbus, Cx3{});  // current demanded from upstream
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::size_t b = *it;
      Cx3 acc{};
      for (Phase p : net.buses()[b].phases) {
        int i = phase_index(p);
        Complex shunt_i = Complex(0.0, shunt_b[b][i]) * v[b][i];
        acc[i] = down[b][i] + shunt_i - injection_current(b, p);
      }
      if (auto pe = net.parent_edge(b)) {
        const SeriesEdge& e = net.edges()[*pe];
        edge_i[*pe] = acc;
        Cx3 from_side = acc;
        if (e.kind == SeriesEdge::Kind::regulator) {
          const RegulatorBank& r = net.regulators()[e.element];
          for (Phase p : e.phases)
            from_side[phase_index(p)] *= r.ratio(taps.taps.at(e.element)[phase_index(p)]);
        }
        for (Phase p : e.phases) down[e.from][phase_index(p)] += from_side[phase_index(p)];
      } else {
        src_accum = acc;
      }
    }
  };

  auto forward = [&]() -> double {
    double max_dv = 0.0;
    for (std::size_t oi = 1; oi < order.size(); ++oi) {
      std::size_t b = order[oi];
      std::size_t pe = *net.parent_edge(b);
      const SeriesEdge& e = net.edges()[pe];
      Cx3 v_new{};
      if (e.kind == SeriesEdge::Kind::line) {
        const LineSegment& l = net.lines()[e.element];
        Cx3 drop = l.z_ohm.mul(edge_i[pe], e.phases);
        for (Phase p : e.phases)
          v_new[phase_index(p)] = v[e.from][phase_index(p)] - drop[phase_index(p)];
      } else {
        const RegulatorBank& r = net.regulators()[e.element];
        for (Phase p : e.phases)
          v_new[phase_index(p)] =
              v[e.from][phase_index(p)] * r.ratio(taps.taps.at(e.element)[phase_index(p)]);
      }
      for (Phase p : net.buses()[b].phases) {
        int i = phase_index(p);
        max_dv = std::max(max_dv, std::abs(v_new[i] - v[b][i]) / v_base[b]);
        v[b][i] = v_new[i];
      }
    }
    return max_dv;
  };

  Solution sol;
  bool converged = false;
  int iter = 0;
  while (iter < opt.max_iterations) {
    ++iter;
    backward();
    double max_dv = forward();
    if (max_dv < opt.tol_pu) {
      converged = true;
      break;
    }
  }
  backward();  // settle currents at the final voltages

  sol.converged = converged;
  sol.iterations = iter;
  sol.bus_v_pu.assign(nbus, Cx3{});
  for (std::size_t b = 0; b < nbus; ++b)
    for (Phase p : net.buses()[b].phases)
      sol.bus_v_pu[b][phase_index(p)] = v[b][phase_index(p)] / v_base[b];

  sol.edge_i_amps = edge_i;
  sol.edge_s_from_kva.assign(net.edges().size(), Cx3{});
  sol.edge_s_to_kva.assign(net.edges().size(), Cx3{});
  for (std::size_t ei = 0; ei < net.edges().size(); ++ei) {
    const SeriesEdge& e = net.edges()[ei];
    for (Phase p : e.phases) {
      int i = phase_index(p);
      Complex i_to = edge_i[ei][i];
      Complex i_from = i_to;
      if (e.kind == SeriesEdge::Kind::regulator) {
        const RegulatorBank& r = net.regulators()[e.element];
        i_from *= r.ratio(taps.taps.at(e.element)[i]);
      }
      sol.edge_s_from_kva[ei][i] = v[e.from][i] * std::conj(i_from) / 1000.0;
      sol.edge_s_to_kva[ei][i] = v[e.to][i] * std::conj(i_to) / 1000.0;
    }
  }

  sol.cap_q_kvar.assign(net.capacitors().size(), PerPhase<double>{0, 0, 0});
  for (std::size_t c = 0; c < net.capacitors().size(); ++c) {
    const CapacitorBank& cap = net.capacitors()[c];
    std::size_t bus = net.capacitor_bus(c);
    for (Phase p : cap.phases) {
      int i = phase_index(p);
      if (!caps.on.at(c)[i]) continue;
      double b_s = detail::cap_susceptance(cap, p, v_base[bus]);
      double vm = std::abs(v[bus][i]);
      sol.cap_q_kvar[c][i] = b_s * vm * vm / 1000.0;
    }
  }

  for (Phase p : src.phases) {
    int i = phase_index(p);
    // src_accum is the current drawn from the slack source (shunts and
    // injections at the source bus included).
    sol.slack_s_kva[i] = v[net.source_bus()][i] * std::conj(src_accum[i]) / 1000.0;
  }

  sol.injections = injections;
  sol.taps = taps.taps;
  sol.caps_on = caps.on;
  return sol;
}

/// Series losses over all edges: sum of (S_in - S_out). Regulator edges are
/// ideal and contribute nothing.
inline std::pair<double, double> total_losses(const Solution& sol) {
  if (!sol.converged)
    throw Error(ErrorCode::unconverged_solution, "losses requested from an unconverged solution");
  Complex loss{};
  for (std::size_t e = 0; e < sol.edge_s_from_kva.size(); ++e)
    for (int i = 0; i < 3; ++i) loss += sol.edge_s_from_kva[e][i] - sol.edge_s_to_kva[e][i];
  return {loss.real(), loss.imag()};
}

/// Residual of the complex power balance: slack + injections + cap - losses.
/// Near zero on every converged solution; used by tests and the acceptance
/// suite with a tolerance scaled by the total load.
inline std::pair<double, double> power_balance_residual(const Solution& sol) {
  Complex total{};
  for (int i = 0; i < 3; ++i) total += sol.slack_s_kva[i];
  for (std::size_t b = 0; b < sol.injections.net_kva.size(); ++b)
    for (int i = 0; i < 3; ++i) total += sol.injections.net_kva[b][i];
  for (std::size_t c = 0; c < sol.cap_q_kvar.size(); ++c)
    for (int i = 0; i < 3; ++i) total += Complex(0.0, sol.cap_q_kvar[c][i]);
  auto [p_loss, q_loss] = total_losses(sol);
  total -= Complex(p_loss, q_loss);
  return {total.real(), total.imag()};
}

}  // namespace feedersim
