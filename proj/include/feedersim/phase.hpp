#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

#include "feedersim/errors.hpp"

namespace feedersim {

using Complex = std::complex<double>;

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> all_phases{Phase::A, Phase::B, Phase::C};

constexpr int phase_index(Phase p) { return static_cast<int>(p); }
constexpr char phase_letter(Phase p) { return phase_index(p) == 0 ? 'A' : (phase_index(p) == 1 ? 'B' : 'C'); }

/// Subset of {A,B,C}. Iteration is always in A,B,C order.
class PhaseSet {
 public:
  constexpr PhaseSet() = default;

  static PhaseSet from_string(const std::string& s) {
    PhaseSet ps;
    for (char c : s) {
      switch (c) {
        case 'A': case 'a': ps.add(Phase::A); break;
        case 'B': case 'b': ps.add(Phase::B); break;
        case 'C': case 'c': ps.add(Phase::C); break;
        default:
          throw Error(ErrorCode::parse_error, "invalid phase letter '" + std::string(1, c) + "'");
      }
    }
    return ps;
  }

  static constexpr PhaseSet abc() {
    PhaseSet ps;
    ps.add(Phase::A);
    ps.add(Phase::B);
    ps.add(Phase::C);
    return ps;
  }

  std::string to_string() const {
    std::string s;
    for (Phase p : all_phases)
      if (contains(p)) s += phase_letter(p);
    return s;
  }

  constexpr bool contains(Phase p) const { return (bits_ & bit(p)) != 0; }
  constexpr void add(Phase p) { bits_ |= bit(p); }
  constexpr int count() const { return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool subset_of(PhaseSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr PhaseSet intersect(PhaseSet o) const {
    PhaseSet r;
    r.bits_ = bits_ & o.bits_;
    return r;
  }
  constexpr bool operator==(const PhaseSet&) const = default;

  struct iterator {
    std::uint8_t bits;
    int i;
    Phase operator*() const { return static_cast<Phase>(i); }
    iterator& operator++() {
      ++i;
      skip();
      return *this;
    }
    void skip() {
      while (i < 3 && ((bits >> i) & 1) == 0) ++i;
    }
    bool operator!=(const iterator& o) const { return i != o.i; }
  };
  iterator begin() const {
    iterator it{bits_, 0};
    it.skip();
    return it;
  }
  iterator end() const { return iterator{bits_, 3}; }

 private:
  static constexpr std::uint8_t bit(Phase p) { return static_cast<std::uint8_t>(1u << phase_index(p)); }
  std::uint8_t bits_ = 0;
};

template <typename T>
using PerPhase = std::array<T, 3>;

using Cx3 = PerPhase<Complex>;

/// Unit phasors of a balanced positive-sequence set: A at 0 deg, B at -120, C at +120.
inline Complex phase_reference(Phase p) {
  constexpr double third = 2.0 * std::numbers::pi / 3.0;
  switch (p) {
    case Phase::A: return {1.0, 0.0};
    case Phase::B: return std::polar(1.0, -third);
    default: return std::polar(1.0, third);
  }
}

/// Dense 3x3 complex matrix indexed by absolute phase; entries outside the
/// active phase set are kept at zero and ignored by the restricted operations.
struct PhaseMatrix {
  std::array<Cx3, 3> m{};

  Complex& at(Phase r, Phase c) { return m[phase_index(r)][phase_index(c)]; }
  const Complex& at(Phase r, Phase c) const { return m[phase_index(r)][phase_index(c)]; }

  static PhaseMatrix identity(PhaseSet ph) {
    PhaseMatrix id;
    for (Phase p : ph) id.at(p, p) = 1.0;
    return id;
  }

  Cx3 mul(const Cx3& v, PhaseSet ph) const {
    Cx3 out{};
    for (Phase r : ph)
      for (Phase c : ph) out[phase_index(r)] += at(r, c) * v[phase_index(c)];
    return out;
  }

  PhaseMatrix times(const PhaseMatrix& o, PhaseSet ph) const {
    PhaseMatrix out;
    for (Phase r : ph)
      for (Phase c : ph)
        for (Phase k : ph) out.at(r, c) += at(r, k) * o.at(k, c);
    return out;
  }

  PhaseMatrix plus(const PhaseMatrix& o, PhaseSet ph) const {
    PhaseMatrix out;
    for (Phase r : ph)
      for (Phase c : ph) out.at(r, c) = at(r, c) + o.at(r, c);
    return out;
  }

  /// Scale every active entry.
  PhaseMatrix scaled(Complex k, PhaseSet ph) const {
    PhaseMatrix out;
    for (Phase r : ph)
      for (Phase c : ph) out.at(r, c) = k * at(r, c);
    return out;
  }
};

namespace detail {

// Gaussian elimination with partial pivoting on the active-phase subspace.
// n <= 3, so no fancy factorization is warranted.
template <int NCOLS>
inline void solve_in_place(const PhaseMatrix& a_in, std::array<Cx3, NCOLS>& rhs, PhaseSet ph) {
  std::array<Phase, 3> idx{};
  int n = 0;
  for (Phase p : ph) idx[n++] = p;

  std::array<std::array<Complex, 3>, 3> a{};
  std::array<std::array<Complex, NCOLS>, 3> b{};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a[r][c] = a_in.at(idx[r], idx[c]);
    for (int k = 0; k < NCOLS; ++k) b[r][k] = rhs[k][phase_index(idx[r])];
  }

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300)
      throw Error(ErrorCode::singular_segment, "singular phase matrix");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < n; ++r) {
      Complex f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      for (int k = 0; k < NCOLS; ++k) b[r][k] -= f * b[col][k];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    for (int k = 0; k < NCOLS; ++k) {
      Complex s = b[col][k];
      for (int c = col + 1; c < n; ++c) s -= a[col][c] * b[c][k];
      b[col][k] = s / a[col][col];
    }
  }

  for (int k = 0; k < NCOLS; ++k) {
    rhs[k] = Cx3{};
    for (int r = 0; r < n; ++r) rhs[k][phase_index(idx[r])] = b[r][k];
  }
}

}  // namespace detail

/// Solve A x = b restricted to the active phases.
inline Cx3 solve_phases(const PhaseMatrix& a, const Cx3& b, PhaseSet ph) {
  std::array<Cx3, 1> rhs{b};
  detail::solve_in_place<1>(a, rhs, ph);
  return rhs[0];
}

/// Solve A X = B column-wise restricted to the active phases.
inline PhaseMatrix solve_phases(const PhaseMatrix& a, const PhaseMatrix& b, PhaseSet ph) {
  std::array<Cx3, 3> cols{};
  for (Phase c : ph)
    for (Phase r : ph) cols[phase_index(c)][phase_index(r)] = b.at(r, c);
  detail::solve_in_place<3>(a, cols, ph);
  PhaseMatrix out;
  for (Phase c : ph)
    for (Phase r : ph) out.at(r, c) = cols[phase_index(c)][phase_index(r)];
  return out;
}

}  // namespace feedersim
