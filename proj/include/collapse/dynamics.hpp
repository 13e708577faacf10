#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "collapse/model.hpp"

namespace collapse {

enum class ChaosMode { None, CommonLogistic, IndependentLogistic };

/// Phase-evolution model: per-state free frequencies plus an optional chaotic
/// diagonal term, piecewise constant over windows of length step_period.
/// CommonLogistic shares one generator (seeds[0]) between both states;
/// IndependentLogistic gives each state its own stream.
struct PhaseModel {
  Pair omega{0.0, 0.0};  // radians/second
  ChaosMode chaos = ChaosMode::None;
  double amplitude = 0.0;    // scales the chaotic rate contribution
  double step_period = 1.0;  // seconds per chaotic window
  Pair seeds{0.3, 0.7};

  void validate() const {
    if (!(amplitude >= 0.0))
      throw std::invalid_argument("PhaseModel: amplitude must be >= 0");
    if (!(step_period > 0.0))
      throw std::invalid_argument("PhaseModel: step_period must be > 0");
  }
};

struct IntegratorSettings {
  double step = 1e-3;  // seconds
  double t_end = 0.0;  // seconds
  bool clamp = true;   // clamp x to [0,1] after each step

  void validate() const {
    if (!(step > 0.0))
      throw std::invalid_argument("IntegratorSettings: step must be > 0");
    if (!(t_end >= 0.0))
      throw std::invalid_argument("IntegratorSettings: t_end must be >= 0");
    if (t_end > 0.0 && step > t_end * (1.0 + 1e-12))
      throw std::invalid_argument("IntegratorSettings: step must be <= t_end");
  }
};

/// Time series of states with the matching q = x1 - x2 series.
struct Trajectory {
  std::vector<SystemState> samples;
  std::vector<double> q_series;
};

struct Derivatives {
  Pair dx{};
  Pair dtheta{};
};

/// One logistic-map update at r = 4: u <- 4u(1-u), emitting the phase-rate
/// contribution amplitude * 2*pi * u for the next window. Returns
/// {contribution, new_u}. Throws DegenerateSeed for states outside (0,1) or on
/// the pre-fixed points {0.25, 0.5, 0.75} of the map.
inline std::pair<double, double> chaotic_phase_next(double u,
                                                    double amplitude) {
  if (!(u > 0.0 && u < 1.0) || u == 0.25 || u == 0.5 || u == 0.75)
    throw DegenerateSeed(
        "chaotic_phase_next: seed must lie in (0,1) away from the map's "
        "fixed points {0.25, 0.5, 0.75}");
  double next = 4.0 * u * (1.0 - u);
  // Rounding can land exactly on an absorbing value (u near 0.5 maps to 1,
  // which maps to 0 forever); nudge back inside the open interval.
  if (next >= 1.0) next = 1.0 - 1e-15;
  if (next <= 0.0) next = 1e-15;
  if (next == 0.25 || next == 0.5 || next == 0.75)
    next = std::nextafter(next, 0.0);
  return {amplitude * kTwoPi * next, next};
}

/// Per-trajectory chaotic phase source. Queries must be time-monotone, which
/// integrate() guarantees; each window of length step_period holds one emitted
/// value.
class LogisticPhaseSource {
 public:
  LogisticPhaseSource(double seed, double amplitude, double step_period)
      : u_(seed), amplitude_(amplitude), period_(step_period) {
    if (!(step_period > 0.0))
      throw std::invalid_argument("LogisticPhaseSource: step_period must be > 0");
    // Validate the seed eagerly with the same rules as the update itself.
    (void)chaotic_phase_next(seed, amplitude);
  }

  double rate_at(double t) {
    const auto w = static_cast<std::int64_t>(std::floor(t / period_));
    while (window_ < w) {
      auto [contribution, next] = chaotic_phase_next(u_, amplitude_);
      current_ = contribution;
      u_ = next;
      ++window_;
    }
    return current_;
  }

 private:
  double u_;
  double amplitude_;
  double period_;
  std::int64_t window_ = -1;
  double current_ = 0.0;
};

/// Right-hand side of the coupled system after measurement onset:
///   dx_n/dt     = rate_n * x_n (1 - x_n^2) / (2 tau_r)
///   dtheta_n/dt = -omega_n + chaotic contribution
/// The weight equation registered the phase through the frozen signs and no
/// longer reads the evolving theta; closed_form_x is its exact solution.
inline Derivatives rhs(const SystemState& state, const BranchSigns& signs,
                       const PhaseModel& phase_model, double tau_r,
                       const Pair& chaos_rate = {0.0, 0.0}) {
  if (!(tau_r > 0.0)) throw std::invalid_argument("rhs: tau_r must be > 0");
  phase_model.validate();
  const auto rates = coupling(signs).rate;
  Derivatives d;
  for (int n = 0; n < 2; ++n) {
    const double x = state.x[n];
    d.dx[n] = rates[n] * x * (1.0 - x * x) / (2.0 * tau_r);
    d.dtheta[n] = -phase_model.omega[n] + chaos_rate[n];
  }
  return d;
}

namespace detail {

inline double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

// Classical RK4 step; the chaotic rate is looked up per substep time so
// window boundaries inside a step are honoured.
template <typename RateFn>
SystemState rk4_step(const SystemState& state, const BranchSigns& signs,
                     const PhaseModel& pm, double tau_r, double h,
                     RateFn&& rate_at, bool clamp) {
  const auto advance = [&](const Derivatives& k, double dt) {
    SystemState s = state;
    for (int n = 0; n < 2; ++n) {
      s.x[n] += dt * k.dx[n];
      s.theta[n] += dt * k.dtheta[n];
    }
    s.t = state.t + dt;
    return s;
  };

  const Derivatives k1 = rhs(state, signs, pm, tau_r, rate_at(state.t));
  const Derivatives k2 =
      rhs(advance(k1, 0.5 * h), signs, pm, tau_r, rate_at(state.t + 0.5 * h));
  const Derivatives k3 =
      rhs(advance(k2, 0.5 * h), signs, pm, tau_r, rate_at(state.t + 0.5 * h));
  const Derivatives k4 =
      rhs(advance(k3, h), signs, pm, tau_r, rate_at(state.t + h));

  SystemState out = state;
  out.t = state.t + h;
  out.alpha = signs;
  for (int n = 0; n < 2; ++n) {
    out.x[n] += h / 6.0 *
                (k1.dx[n] + 2.0 * k2.dx[n] + 2.0 * k3.dx[n] + k4.dx[n]);
    out.theta[n] += h / 6.0 * (k1.dtheta[n] + 2.0 * k2.dtheta[n] +
                               2.0 * k3.dtheta[n] + k4.dtheta[n]);
    if (clamp) out.x[n] = std::clamp(out.x[n], 0.0, 1.0);
    out.theta[n] = wrap_angle(out.theta[n]);
    if (!std::isfinite(out.x[n]) || !std::isfinite(out.theta[n]))
      throw NonFiniteState("step_rk4: non-finite component after step");
  }
  return out;
}

}  // namespace detail

/// Single RK4 step with a fixed chaotic rate (zero by default, i.e. the
/// chaos = None case or one window's holding value).
inline SystemState step_rk4(const SystemState& state, const BranchSigns& signs,
                            const PhaseModel& phase_model, double tau_r,
                            double h, const Pair& chaos_rate = {0.0, 0.0},
                            bool clamp = true) {
  if (!(h > 0.0)) throw std::invalid_argument("step_rk4: h must be > 0");
  return detail::rk4_step(
      state, signs, phase_model, tau_r, h,
      [&](double) { return chaos_rate; }, clamp);
}

/// Integrate the coupled system from t = 0 to settings.t_end with fixed-step
/// RK4. theta0 gives the dynamical phases at onset (they are passengers as far
/// as the weights are concerned). Timestamps are exact multiples of the step.
inline Trajectory integrate(const TwoStateConfig& config,
                            const BranchSigns& signs,
                            const PhaseModel& phase_model,
                            const IntegratorSettings& settings,
                            const Pair& theta0 = {0.0, 0.0}) {
  config.validate();
  phase_model.validate();
  settings.validate();

  std::vector<LogisticPhaseSource> sources;
  switch (phase_model.chaos) {
    case ChaosMode::None:
      break;
    case ChaosMode::CommonLogistic:
      sources.emplace_back(phase_model.seeds[0], phase_model.amplitude,
                           phase_model.step_period);
      break;
    case ChaosMode::IndependentLogistic:
      sources.emplace_back(phase_model.seeds[0], phase_model.amplitude,
                           phase_model.step_period);
      sources.emplace_back(phase_model.seeds[1], phase_model.amplitude,
                           phase_model.step_period);
      break;
  }
  const auto rate_at = [&](double t) -> Pair {
    switch (sources.size()) {
      case 1: {
        const double r = sources[0].rate_at(t);
        return {r, r};
      }
      case 2:
        return {sources[0].rate_at(t), sources[1].rate_at(t)};
      default:
        return {0.0, 0.0};
    }
  };

  SystemState state;
  state.t = 0.0;
  state.x = config.x0;
  state.theta = {detail::wrap_angle(theta0[0]), detail::wrap_angle(theta0[1])};
  state.alpha = signs;

  Trajectory traj;
  traj.samples.push_back(state);
  traj.q_series.push_back(state.x[0] - state.x[1]);
  if (settings.t_end == 0.0) return traj;

  const double h = settings.step;
  const auto n_full = static_cast<std::uint64_t>(
      std::floor(settings.t_end / h * (1.0 + 1e-12)));
  for (std::uint64_t k = 0; k < n_full; ++k) {
    state = detail::rk4_step(state, signs, phase_model, config.tau_r, h,
                             rate_at, settings.clamp);
    state.t = static_cast<double>(k + 1) * h;  // avoid accumulation drift
    traj.samples.push_back(state);
    traj.q_series.push_back(state.x[0] - state.x[1]);
  }
  const double remainder = settings.t_end - static_cast<double>(n_full) * h;
  if (remainder > 1e-12 * h) {
    state = detail::rk4_step(state, signs, phase_model, config.tau_r,
                             remainder, rate_at, settings.clamp);
    state.t = settings.t_end;
    traj.samples.push_back(state);
    traj.q_series.push_back(state.x[0] - state.x[1]);
  }
  return traj;
}

/// Formal off-diagonal interaction element
///   H_nm = rate_n * x_n (1 - x_n^2) / (tau_r * sqrt(x_n x_m) sin(theta_n - theta_m)).
/// Diagnostic only: substituting it back into the sine-sum form of the weight
/// equation yields -2 times rate_n * x_n(1 - x_n^2)/tau_r, not the postulated
/// right-hand side, and the element is singular whenever the phases align.
inline double offdiag_element(const SystemState& state, int n, int m,
                              double tau_r) {
  if (n == m || n < 0 || n > 1 || m < 0 || m > 1)
    throw std::invalid_argument("offdiag_element: indices must be distinct, 0 or 1");
  if (!(tau_r > 0.0))
    throw std::invalid_argument("offdiag_element: tau_r must be > 0");
  if (!state.alpha)
    throw std::invalid_argument("offdiag_element: state has no branch signs");
  const double sine = std::sin(state.theta[n] - state.theta[m]);
  const double geom = std::sqrt(state.x[n] * state.x[m]);
  if (std::abs(sine) < 1e-12)
    throw SingularDenominator("offdiag_element: sin(theta_n - theta_m) vanishes");
  if (!(geom > 0.0))
    throw SingularDenominator("offdiag_element: sqrt(x_n x_m) vanishes");
  const int rate = coupling(*state.alpha).rate[n];
  const double xn = state.x[n];
  return rate * xn * (1.0 - xn * xn) / (tau_r * geom * sine);
}

}  // namespace collapse
