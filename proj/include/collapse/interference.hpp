#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

/// A point emitter at transverse position y with its own absolute phase.
struct PointSource {
  double y = 0.0;      // meters
  double theta = 0.0;  // radians
};

struct InterferenceSpec {
  std::vector<PointSource> sources;
  double distance = 1.0;       // source plane to screen, meters
  double wavenumber = 1.0;     // radians/meter
  std::vector<double> screen;  // y' sample points, meters

  void validate() const {
    if (sources.empty())
      throw EmptySources("InterferenceSpec: at least one source required");
    if (!(distance > 0.0))
      throw std::invalid_argument("InterferenceSpec: distance must be > 0");
    if (!(wavenumber > 0.0))
      throw std::invalid_argument("InterferenceSpec: wavenumber must be > 0");
  }

  /// Far-field sanity: screen distance at least 100x the source extent.
  bool far_field_ok() const {
    double extent = 0.0;
    for (const auto& s : sources) extent = std::max(extent, std::abs(s.y));
    return distance >= 100.0 * extent;
  }
};

/// Symmetric screen grid: `points` samples spanning [-half_width, half_width].
inline std::vector<double> screen_grid(double half_width, std::size_t points) {
  if (points < 2 || !(half_width > 0.0))
    throw std::invalid_argument("screen_grid: need half_width > 0 and >= 2 points");
  std::vector<double> grid(points);
  const double step = 2.0 * half_width / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = -half_width + static_cast<double>(i) * step;
  return grid;
}

/// Far-field intensity on the screen:
///   I(y') = | sum_n exp(i(theta_n + k (y_n - y')^2 / (2D))) |^2.
/// A single unit source gives intensity 1 everywhere; a common offset added to
/// every theta_n leaves the pattern unchanged.
inline std::vector<double> interference_pattern(const InterferenceSpec& spec) {
  spec.validate();
  std::vector<double> intensity;
  intensity.reserve(spec.screen.size());
  for (double yp : spec.screen) {
    std::complex<double> amp{0.0, 0.0};
    for (const auto& src : spec.sources) {
      const double dy = src.y - yp;
      const double phase =
          src.theta + spec.wavenumber * dy * dy / (2.0 * spec.distance);
      amp += std::polar(1.0, phase);
    }
    intensity.push_back(std::norm(amp));
  }
  return intensity;
}

/// Same intensity with exact path lengths d_n = sqrt(D^2 + (y_n - y')^2); the
/// reference the far-field form is checked against.
inline std::vector<double> exact_path_pattern(const InterferenceSpec& spec) {
  spec.validate();
  std::vector<double> intensity;
  intensity.reserve(spec.screen.size());
  for (double yp : spec.screen) {
    std::complex<double> amp{0.0, 0.0};
    for (const auto& src : spec.sources) {
      const double dy = src.y - yp;
      const double path = std::sqrt(spec.distance * spec.distance + dy * dy);
      amp += std::polar(1.0, src.theta + spec.wavenumber * path);
    }
    intensity.push_back(std::norm(amp));
  }
  return intensity;
}

}  // namespace collapse
