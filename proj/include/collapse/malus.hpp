#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "collapse/model.hpp"
#include "collapse/rng.hpp"

namespace collapse {

/// Grid of polarizer angles and observation times for the transmission
/// deviation curve.
struct MalusSpec {
  std::vector<double> epsilon;  // radians, each strictly inside (0, pi/2)
  std::vector<double> t_grid;   // seconds, nonnegative and increasing
  double tau_r = 1.0;

  void validate() const {
    if (!(tau_r > 0.0))
      throw std::invalid_argument("MalusSpec: tau_r must be > 0");
    for (double e : epsilon)
      if (!(e > 0.0 && e < std::numbers::pi / 2.0))
        throw std::invalid_argument(
            "MalusSpec: angles must lie strictly inside (0, pi/2)");
    double prev = -1.0;
    for (double t : t_grid) {
      if (!(t >= 0.0) || t <= prev)
        throw std::invalid_argument(
            "MalusSpec: t_grid must be nonnegative and increasing");
      prev = t;
    }
  }
};

struct MalusRow {
  double epsilon;         // radians
  double t;               // seconds
  double expectation;     // <x>(epsilon, t)
  double ratio_to_malus;  // <x> / sin^2(epsilon)
};

/// Expected transmission under the collapse transient:
///   <x> = sin^2(e)/sqrt(1 + cot^2(e) e^{-t/tau}) + cos^2(e)/sqrt(1 + tan^2(e) e^{t/tau}).
/// Recovers Malus's law sin^2(e) as t -> infinity; at t = 0 it equals
/// sin^3(e) + cos^3(e). The cot/tan poles make epsilon = 0 and pi/2 formal
/// singularities; with allow_endpoints the physical limits 0 and 1 are
/// returned instead of throwing.
inline double malus_expectation(double eps, double t, double tau_r,
                                bool allow_endpoints = false) {
  if (!(tau_r > 0.0))
    throw std::invalid_argument("malus_expectation: tau_r must be > 0");
  if (!(t >= 0.0))
    throw std::invalid_argument("malus_expectation: t must be >= 0");
  if (!(eps >= 0.0 && eps <= std::numbers::pi / 2.0))
    throw std::invalid_argument("malus_expectation: eps must lie in [0, pi/2]");
  if (eps == 0.0 || eps == std::numbers::pi / 2.0) {
    if (!allow_endpoints)
      throw EndpointAngle("malus_expectation: formula diverges at the endpoint angles");
    return eps == 0.0 ? 0.0 : 1.0;
  }
  const double s2 = std::sin(eps) * std::sin(eps);
  const double c2 = std::cos(eps) * std::cos(eps);
  const double grow = s2 / std::sqrt(1.0 + (c2 / s2) * std::exp(-t / tau_r));
  const double decay = c2 / std::sqrt(1.0 + (s2 / c2) * std::exp(t / tau_r));
  return grow + decay;
}

/// Tabulate the transmission and its ratio to Malus's law over the grid.
inline std::vector<MalusRow> malus_deviation_curve(const MalusSpec& spec) {
  spec.validate();
  std::vector<MalusRow> rows;
  rows.reserve(spec.epsilon.size() * spec.t_grid.size());
  for (double eps : spec.epsilon) {
    const double malus = std::sin(eps) * std::sin(eps);
    for (double t : spec.t_grid) {
      const double expectation = malus_expectation(eps, t, spec.tau_r);
      rows.push_back({eps, t, expectation, expectation / malus});
    }
  }
  return rows;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t n = 0;
};

/// Monte Carlo transmission under the amplitude convention: the transmitted
/// branch starts at amplitude sin(eps) and grows (probability sin^2(eps)); the
/// blocked branch starts at amplitude cos(eps) and decays. The expectation of
/// this two-point draw is exactly malus_expectation.
inline MonteCarloEstimate malus_monte_carlo(double eps, double t, double tau_r,
                                            std::uint64_t n,
                                            std::uint64_t seed) {
  if (n == 0)
    throw std::invalid_argument("malus_monte_carlo: need at least one sample");
  if (!(eps > 0.0 && eps < std::numbers::pi / 2.0))
    throw EndpointAngle("malus_monte_carlo: eps must lie strictly inside (0, pi/2)");

  const double p_grow = std::sin(eps) * std::sin(eps);
  const double v_grow = closed_form_x(std::sin(eps), +1, t, tau_r);
  const double v_decay = closed_form_x(std::cos(eps), -1, t, tau_r);

  SplitMix64 stream{seed};
  std::uint64_t grew = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    if (stream.next_double() < p_grow) ++grew;

  const double nf = static_cast<double>(n);
  const double p_hat = static_cast<double>(grew) / nf;
  MonteCarloEstimate est;
  est.n = n;
  est.mean = p_hat * v_grow + (1.0 - p_hat) * v_decay;
  const double spread = v_grow - v_decay;
  est.standard_error = std::sqrt(p_hat * (1.0 - p_hat) * spread * spread / nf);
  return est;
}

}  // namespace collapse
