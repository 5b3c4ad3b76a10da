#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "feedersim/errors.hpp"

namespace feedersim {

/// Uniformly sampled series; index i is the value over [i*dt, (i+1)*dt).
struct ProfileSeries {
  double dt_s = 60.0;
  std::vector<double> values;

  double at(std::size_t t) const {
    if (t >= values.size())
      throw Error(ErrorCode::duration_mismatch, "profile shorter than the requested timestep");
    return values[t];
  }
  std::size_t size() const { return values.size(); }

  static ProfileSeries constant(double value, double dt_s, std::size_t steps) {
    ProfileSeries p;
    p.dt_s = dt_s;
    p.values.assign(steps, value);
    return p;
  }
};

namespace synth {

/// Fully specified uniform double in [0,1) from the raw engine output, so
/// generated fixtures do not depend on library distribution internals.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Clear-sky bell: zero outside [sunrise, sunset], raised cosine peaking at
/// solar noon.
inline double clear_sky_w_m2(double hour, double peak = 1000.0, double sunrise = 6.5,
                             double sunset = 19.5) {
  if (hour <= sunrise || hour >= sunset) return 0.0;
  double x = (hour - sunrise) / (sunset - sunrise);  // 0..1
  double s = std::sin(std::numbers::pi * x);
  return peak * s * s;
}

/// Synthetic cloudy-day irradiance: a clear-sky bell multiplied by a seeded
/// square-wave cloud pattern (random cloud/clear segment lengths and cloud
/// transmittance) plus small multiplicative noise. The window 12:30-13:30 is
/// kept clear so midday snapshots always see generation.
inline ProfileSeries cloudy_day_irradiance(std::uint64_t seed, double dt_s, std::size_t steps) {
  std::mt19937_64 rng(seed);
  ProfileSeries p;
  p.dt_s = dt_s;
  p.values.resize(steps);

  // Pre-draw the cloud segments covering the whole day.
  struct Segment {
    double until_hour;
    double transmittance;
  };
  std::vector<Segment> segments;
  const double total_hours = static_cast<double>(steps) * dt_s / 3600.0 + 1.0;
  double hour = 0.0;
  bool cloud = false;
  while (hour < total_hours) {
    double len_min = cloud ? uniform(rng, 2.0, 6.0) : uniform(rng, 3.0, 8.0);
    double trans = cloud ? uniform(rng, 0.08, 0.25) : 1.0;
    hour += len_min / 60.0;
    segments.push_back({hour, trans});
    cloud = !cloud;
  }

  std::size_t seg = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    double h = (static_cast<double>(t) + 0.5) * dt_s / 3600.0;
    double day_h = std::fmod(h, 24.0);
    while (seg + 1 < segments.size() && segments[seg].until_hour < h) ++seg;
    double trans = segments[seg].transmittance;
    bool cloudy_window = day_h >= 9.0 && day_h <= 17.0 && !(day_h >= 12.5 && day_h <= 13.5);
    if (!cloudy_window) trans = 1.0;
    double noise = 1.0 + 0.03 * (2.0 * uniform01(rng) - 1.0);
    p.values[t] = clear_sky_w_m2(day_h) * trans * noise;
  }
  return p;
}

/// Worst-case ramping pattern: irradiance alternates between near-full sun
/// and deep shadow on every timestep while the sun is up.
inline ProfileSeries adversarial_irradiance(double dt_s, std::size_t steps) {
  ProfileSeries p;
  p.dt_s = dt_s;
  p.values.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double h = std::fmod((static_cast<double>(t) + 0.5) * dt_s / 3600.0, 24.0);
    if (h < 6.0 || h > 20.0) {
      p.values[t] = 0.0;
    } else {
      p.values[t] = (t % 2 == 0) ? 1000.0 : 50.0;
    }
  }
  return p;
}

/// Smooth ambient temperature swing, 20 C overnight peaking 32 C mid-afternoon.
inline ProfileSeries daily_temperature(double dt_s, std::size_t steps) {
  ProfileSeries p;
  p.dt_s = dt_s;
  p.values.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double h = std::fmod((static_cast<double>(t) + 0.5) * dt_s / 3600.0, 24.0);
    p.values[t] = 26.0 - 6.0 * std::cos(2.0 * std::numbers::pi * (h - 3.0) / 24.0);
  }
  return p;
}

/// Diurnal load multiplier: light overnight, morning rise, evening peak.
inline ProfileSeries diurnal_load_multiplier(double dt_s, std::size_t steps) {
  // Breakpoints in hours; linear in between, wraps midnight flat.
  static constexpr double hrs[] = {0.0, 5.0, 9.0, 12.0, 15.0, 18.0, 19.5, 22.0, 24.0};
  static constexpr double mult[] = {0.58, 0.55, 0.80, 0.85, 0.82, 0.95, 1.00, 0.70, 0.58};
  ProfileSeries p;
  p.dt_s = dt_s;
  p.values.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double h = std::fmod((static_cast<double>(t) + 0.5) * dt_s / 3600.0, 24.0);
    std::size_t k = 1;
    while (hrs[k] < h) ++k;
    double f = (h - hrs[k - 1]) / (hrs[k] - hrs[k - 1]);
    p.values[t] = mult[k - 1] + f * (mult[k] - mult[k - 1]);
  }
  return p;
}

}  // namespace synth

}  // namespace feedersim
