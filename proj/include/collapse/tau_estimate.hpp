#pragma once

#include <stdexcept>

#include "collapse/constants.hpp"

namespace collapse {

/// Reduction-time scale for a photon of the given wavelength: tau = hbar / E
/// with E = h c / lambda. The reported experimental upper bound rides along
/// for comparison; the two differ by about two orders of magnitude at 400 nm.
struct TauEstimate {
  double tau_s = 0.0;
  double photon_energy_j = 0.0;
  double reported_upper_bound_s = constants::kReductionTimeUpperBound;
};

inline TauEstimate estimate_tau(double lambda_m) {
  if (!(lambda_m > 0.0))
    throw std::invalid_argument("estimate_tau: wavelength must be > 0");
  TauEstimate est;
  est.photon_energy_j =
      constants::kPlanck * constants::kSpeedOfLight / lambda_m;
  est.tau_s = constants::kHbar / est.photon_energy_j;
  return est;
}

}  // namespace collapse
