#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "feedersim/errors.hpp"

namespace feedersim {

/// Piecewise-linear characteristic defined by (x, y) breakpoints with strictly
/// increasing x. Evaluation interpolates between bracketing breakpoints and
/// clamps to the end y-values outside [x_first, x_last].
class PiecewiseLinearCurve {
 public:
  using Point = std::pair<double, double>;

  PiecewiseLinearCurve() = default;

  explicit PiecewiseLinearCurve(std::vector<Point> breakpoints) : pts_(std::move(breakpoints)) {
    if (pts_.size() < 2)
      throw Error(ErrorCode::invalid_curve, "curve needs at least 2 breakpoints");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!std::isfinite(pts_[i].first) || !std::isfinite(pts_[i].second))
        throw Error(ErrorCode::invalid_curve, "non-finite breakpoint");
      if (i > 0 && !(pts_[i].first > pts_[i - 1].first))
        throw Error(ErrorCode::invalid_curve, "breakpoint x values must be strictly increasing");
    }
  }

  PiecewiseLinearCurve(std::initializer_list<Point> pts)
      : PiecewiseLinearCurve(std::vector<Point>(pts)) {}

  double operator()(double x) const {
    if (x <= pts_.front().first) return pts_.front().second;
    if (x >= pts_.back().first) return pts_.back().second;
    // Find the first breakpoint with bp.x >= x; exact hits return bp.y.
    std::size_t hi = 1;
    while (pts_[hi].first < x) ++hi;
    if (pts_[hi].first == x) return pts_[hi].second;
    const auto& [x0, y0] = pts_[hi - 1];
    const auto& [x1, y1] = pts_[hi];
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }

  const std::vector<Point>& breakpoints() const { return pts_; }
  bool valid() const { return pts_.size() >= 2; }

  /// Same shape shifted along the x axis (used to derive hysteresis pairs).
  PiecewiseLinearCurve shifted_x(double dx) const {
    std::vector<Point> pts = pts_;
    for (auto& p : pts) p.first += dx;
    return PiecewiseLinearCurve(std::move(pts));
  }

  double min_y() const {
    double m = pts_.front().second;
    for (const auto& p : pts_) m = std::min(m, p.second);
    return m;
  }
  double max_y() const {
    double m = pts_.front().second;
    for (const auto& p : pts_) m = std::max(m, p.second);
    return m;
  }

 private:
  std::vector<Point> pts_;
};

inline double evaluate_curve(const PiecewiseLinearCurve& curve, double x) { return curve(x); }

}  // namespace feedersim
