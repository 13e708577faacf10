#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Weight/phase pair indexed by state (0-based; state "1" of the two-state
/// system is index 0).
using Pair = std::array<double, 2>;

enum class SamplingMode { Independent, CommonChaotic };
enum class AmplitudeConvention { Probability, Amplitude };

/// Frozen signs of the shifted initial phases, one per state. Each entry is
/// exactly -1 or +1; the degenerate cos = 0 case is rejected upstream.
struct BranchSigns {
  std::array<int, 2> alpha{+1, -1};
};

/// Full input of a two-state run: initial weights, reduction time and the
/// phase-sampling conventions.
struct TwoStateConfig {
  Pair x0{0.5, 0.5};
  double tau_r = 1.0;  // seconds
  SamplingMode sampling_mode = SamplingMode::Independent;
  AmplitudeConvention amplitude_convention = AmplitudeConvention::Probability;

  void validate() const {
    if (!(x0[0] >= 0.0 && x0[0] <= 1.0) || !(x0[1] >= 0.0 && x0[1] <= 1.0))
      throw std::invalid_argument("TwoStateConfig: weights must lie in [0,1]");
    if (std::abs(x0[0] + x0[1] - 1.0) > 1e-12)
      throw std::invalid_argument(
          "TwoStateConfig: initial weights must sum to 1 within 1e-12");
    if (!(tau_r > 0.0))
      throw std::invalid_argument("TwoStateConfig: tau_r must be positive");
  }
};

/// Instantaneous dynamical state: weights, phases, and (after measurement
/// onset) the frozen branch signs.
struct SystemState {
  double t = 0.0;  // seconds
  Pair x{0.5, 0.5};
  Pair theta{0.0, 0.0};  // radians, kept in [0, 2*pi)
  std::optional<BranchSigns> alpha;
};

/// Coupling function output: f[n] and the signed growth rate
/// rate[n] = f[n] * alpha[n]. For two states rate[n] is always -1 or +1.
struct CouplingResult {
  std::array<int, 2> f{};
  std::array<int, 2> rate{};
};

/// Heaviside step with the half-open convention: 0 at the origin, 1 for
/// strictly positive arguments.
inline int heaviside_plus(double v) { return v > 0.0 ? 1 : 0; }

/// Sign of cos(theta). Throws DegeneratePhase when |cos(theta)| < tol; the
/// caller is expected to resample.
inline int branch_sign(double theta, double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("branch_sign: tol must be > 0");
  const double c = std::cos(theta);
  if (std::abs(c) < tol)
    throw DegeneratePhase("branch_sign: cos(theta) vanishes within tolerance");
  return c > 0.0 ? +1 : -1;
}

/// Weight-dependent shift of a raw phase draw: theta/2 - beta with
/// beta = pi*(x0 - 1/2). The result is intentionally not reduced mod 2*pi;
/// it feeds branch_sign directly. The shift makes the measure of the
/// positive-cos arc equal to x0, which is what produces Born statistics.
inline double shift_phase(double theta_raw, double x0_n) {
  if (!(theta_raw >= 0.0 && theta_raw < kTwoPi))
    throw std::invalid_argument("shift_phase: theta_raw must be in [0, 2*pi)");
  if (!(x0_n >= 0.0 && x0_n <= 1.0))
    throw std::invalid_argument("shift_phase: weight must be in [0,1]");
  const double beta = std::numbers::pi * (x0_n - 0.5);
  return 0.5 * theta_raw - beta;
}

/// Coupling function for any number of states:
///   f_n = [1 - 2*S]*a_n + [1 - S]*H(T)*[1 - a_n]
/// with S = sum_{k != n} H(a_k), T = sum_{k != n} (1 - H(-a_k)) and H the
/// Heaviside step above. Only the two-state behaviour is exercised elsewhere.
inline std::vector<int> coupling_general(std::span<const int> alphas) {
  const std::size_t n_states = alphas.size();
  if (n_states < 2)
    throw std::invalid_argument("coupling_general: need at least two states");
  for (int a : alphas)
    if (a != -1 && a != +1)
      throw std::invalid_argument("coupling_general: signs must be -1 or +1");

  std::vector<int> f(n_states);
  for (std::size_t n = 0; n < n_states; ++n) {
    int sum_pos = 0;   // S
    int sum_nneg = 0;  // T
    for (std::size_t k = 0; k < n_states; ++k) {
      if (k == n) continue;
      sum_pos += heaviside_plus(alphas[k]);
      sum_nneg += 1 - heaviside_plus(-alphas[k]);
    }
    f[n] = (1 - 2 * sum_pos) * alphas[n] +
           (1 - sum_pos) * heaviside_plus(static_cast<double>(sum_nneg)) *
               (1 - alphas[n]);
  }
  return f;
}

/// Two-state coupling: f and the resulting growth rates.
inline CouplingResult coupling(const BranchSigns& signs) {
  const auto f = coupling_general(std::span<const int>(signs.alpha));
  CouplingResult out;
  out.f = {f[0], f[1]};
  out.rate = {f[0] * signs.alpha[0], f[1] * signs.alpha[1]};
  return out;
}

/// Closed-form weight trajectory
///   x(t) = 1 / sqrt(1 + ((1 - x0^2)/x0^2) * exp(-rate * t / tau_r)),
/// the exact solution of dx/dt = rate * x (1 - x^2) / (2 tau_r): tau_r is the
/// e-folding time of the approach to the stable endpoint. x = 0 and x = 1 are
/// fixed points.
inline double closed_form_x(double x0_n, int rate, double t, double tau_r) {
  if (rate != -1 && rate != +1)
    throw std::invalid_argument("closed_form_x: rate must be -1 or +1");
  if (!(t >= 0.0)) throw std::invalid_argument("closed_form_x: t must be >= 0");
  if (!(tau_r > 0.0))
    throw std::invalid_argument("closed_form_x: tau_r must be > 0");
  if (!(x0_n >= 0.0 && x0_n <= 1.0))
    throw std::invalid_argument("closed_form_x: weight must be in [0,1]");
  if (x0_n == 0.0) {
    if (rate > 0)
      throw InvalidInitialWeight(
          "closed_form_x: x0 = 0 is a fixed point and cannot grow");
    return 0.0;
  }
  const double ratio = (1.0 - x0_n * x0_n) / (x0_n * x0_n);
  return 1.0 / std::sqrt(1.0 + ratio * std::exp(-rate * t / tau_r));
}

/// Collapse observable q(t) = x1(t) - x2(t), each component evaluated with
/// closed_form_x under the rates implied by the branch signs. Anticorrelated
/// signs drive q to +1 or -1; correlated signs leave both components moving
/// the same way.
inline double q_of_t(const TwoStateConfig& config, const BranchSigns& signs,
                     double t) {
  config.validate();
  const auto rates = coupling(signs).rate;
  const double x1 = closed_form_x(config.x0[0], rates[0], t, config.tau_r);
  const double x2 = closed_form_x(config.x0[1], rates[1], t, config.tau_r);
  return x1 - x2;
}

}  // namespace collapse
