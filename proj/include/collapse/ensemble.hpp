#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "collapse/dynamics.hpp"
#include "collapse/model.hpp"
#include "collapse/rng.hpp"

namespace collapse {

struct SamplingSpec {
  SamplingMode mode = SamplingMode::Independent;
  std::uint64_t n_trajectories = 1;
  std::uint64_t master_seed = 1;

  void validate() const {
    if (n_trajectories < 1)
      throw std::invalid_argument("SamplingSpec: need at least one trajectory");
  }
};

enum class OutcomeClass : int {
  CollapseTo1 = 0,
  CollapseTo2 = 1,
  BothDecay = 2,
  BothGrow = 3,
  Unresolved = 4,
};

inline constexpr std::array<OutcomeClass, 5> kAllOutcomeClasses = {
    OutcomeClass::CollapseTo1, OutcomeClass::CollapseTo2,
    OutcomeClass::BothDecay, OutcomeClass::BothGrow, OutcomeClass::Unresolved};

inline const char* to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::CollapseTo1: return "collapse_to_1";
    case OutcomeClass::CollapseTo2: return "collapse_to_2";
    case OutcomeClass::BothDecay: return "both_decay";
    case OutcomeClass::BothGrow: return "both_grow";
    case OutcomeClass::Unresolved: return "unresolved";
  }
  return "unknown";
}

inline const char* to_string(SamplingMode m) {
  return m == SamplingMode::Independent ? "independent" : "common_chaotic";
}

struct Outcome {
  OutcomeClass cls = OutcomeClass::Unresolved;
  /// Present exactly for the two collapse classes.
  std::optional<double> reduction_time;
};

/// Ensemble counts with provenance. Frequencies and binomial standard errors
/// are derived views of the counts.
struct OutcomeStats {
  std::array<std::uint64_t, 5> counts{};
  std::uint64_t n_trajectories = 0;
  std::uint64_t master_seed = 0;
  SamplingMode mode = SamplingMode::Independent;

  std::uint64_t count(OutcomeClass c) const {
    return counts[static_cast<int>(c)];
  }
  double frequency(OutcomeClass c) const {
    return static_cast<double>(count(c)) / static_cast<double>(n_trajectories);
  }
  double standard_error(OutcomeClass c) const {
    const double p = frequency(c);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_trajectories));
  }
};

/// Draw branch signs for one trajectory. Independent mode draws one uniform
/// phase per state; CommonChaotic draws a single shared phase, each state
/// applying its own weight shift. Degenerate draws (shifted phase on the
/// cos = 0 singularity) are resampled from the same stream, at most 64 times.
///
/// Rng needs only `double next_double()` returning values in [0, 1).
template <typename Rng>
BranchSigns sample_signs(const Pair& x0, SamplingMode mode, Rng& stream) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double theta1 = kTwoPi * stream.next_double();
    const double theta2 =
        mode == SamplingMode::Independent ? kTwoPi * stream.next_double()
                                          : theta1;
    try {
      BranchSigns signs;
      signs.alpha[0] = branch_sign(shift_phase(theta1, x0[0]));
      signs.alpha[1] = branch_sign(shift_phase(theta2, x0[1]));
      return signs;
    } catch (const DegeneratePhase&) {
      // resample
    }
  }
  throw ResampleExhausted("sample_signs: 64 degenerate draws in a row");
}

/// Classify a finished trajectory by its final weights. The reduction time is
/// the first sampled instant with |q| >= 1 - delta; if the thresholds are met
/// only marginally and |q| never crosses, the final time stands in so the
/// field is always present for collapse outcomes.
inline Outcome classify(const Trajectory& trajectory, double delta = 1e-3) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("classify: delta must lie in (0, 0.5)");
  if (trajectory.samples.empty())
    throw std::invalid_argument("classify: empty trajectory");

  const SystemState& fin = trajectory.samples.back();
  const bool hi1 = fin.x[0] >= 1.0 - delta;
  const bool lo1 = fin.x[0] <= delta;
  const bool hi2 = fin.x[1] >= 1.0 - delta;
  const bool lo2 = fin.x[1] <= delta;

  Outcome out;
  if (hi1 && lo2) out.cls = OutcomeClass::CollapseTo1;
  else if (lo1 && hi2) out.cls = OutcomeClass::CollapseTo2;
  else if (lo1 && lo2) out.cls = OutcomeClass::BothDecay;
  else if (hi1 && hi2) out.cls = OutcomeClass::BothGrow;
  else out.cls = OutcomeClass::Unresolved;

  if (out.cls == OutcomeClass::CollapseTo1 ||
      out.cls == OutcomeClass::CollapseTo2) {
    out.reduction_time = fin.t;
    for (std::size_t i = 0; i < trajectory.q_series.size(); ++i) {
      if (std::abs(trajectory.q_series[i]) >= 1.0 - delta) {
        out.reduction_time = trajectory.samples[i].t;
        break;
      }
    }
  }
  return out;
}

namespace detail {

// Outcome class of one trajectory evaluated on the exact solution; agrees
// with classify() over RK4 output (covered by tests) and keeps large
// ensembles cheap.
inline OutcomeClass closed_form_outcome(const TwoStateConfig& config,
                                        const BranchSigns& signs, double t_end,
                                        double delta) {
  const auto rates = coupling(signs).rate;
  const double x1 = closed_form_x(config.x0[0], rates[0], t_end, config.tau_r);
  const double x2 = closed_form_x(config.x0[1], rates[1], t_end, config.tau_r);
  const bool hi1 = x1 >= 1.0 - delta, lo1 = x1 <= delta;
  const bool hi2 = x2 >= 1.0 - delta, lo2 = x2 <= delta;
  if (hi1 && lo2) return OutcomeClass::CollapseTo1;
  if (lo1 && hi2) return OutcomeClass::CollapseTo2;
  if (lo1 && lo2) return OutcomeClass::BothDecay;
  if (hi1 && hi2) return OutcomeClass::BothGrow;
  return OutcomeClass::Unresolved;
}

}  // namespace detail

/// Run n_trajectories independent collapses and tally the outcome classes.
/// Each trajectory draws its signs from a stream seeded by
/// child_seed(master_seed, index), so the result is a pure function of
/// (config, sampling, settings, delta) independent of the thread count.
/// threads = 0 picks the hardware concurrency.
inline OutcomeStats run_ensemble(const TwoStateConfig& config,
                                 const SamplingSpec& sampling,
                                 const IntegratorSettings& settings,
                                 double delta = 1e-3, unsigned threads = 0) {
  config.validate();
  sampling.validate();
  settings.validate();
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("run_ensemble: delta must lie in (0, 0.5)");

  const std::uint64_t n = sampling.n_trajectories;
  unsigned n_workers = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  n_workers = static_cast<unsigned>(
      std::min<std::uint64_t>(n_workers, n));

  const auto tally_range = [&](std::uint64_t begin, std::uint64_t end,
                               std::array<std::uint64_t, 5>& counts) {
    for (std::uint64_t i = begin; i < end; ++i) {
      SplitMix64 stream{child_seed(sampling.master_seed, i)};
      const BranchSigns signs = sample_signs(config.x0, sampling.mode, stream);
      const OutcomeClass cls =
          detail::closed_form_outcome(config, signs, settings.t_end, delta);
      ++counts[static_cast<int>(cls)];
    }
  };

  std::vector<std::array<std::uint64_t, 5>> partial(n_workers);
  if (n_workers == 1) {
    partial[0] = {};
    tally_range(0, n, partial[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_workers);
    pool.reserve(n_workers);
    const std::uint64_t chunk = (n + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
      const std::uint64_t end = std::min(n, begin + chunk);
      partial[w] = {};
      pool.emplace_back([&, begin, end, w] {
        try {
          tally_range(begin, end, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  OutcomeStats stats;
  stats.n_trajectories = n;
  stats.master_seed = sampling.master_seed;
  stats.mode = sampling.mode;
  for (const auto& counts : partial)
    for (int c = 0; c < 5; ++c) stats.counts[c] += counts[c];
  return stats;
}

/// Born z-scores for the marginal "component n grows" events, whose expected
/// probabilities are the initial weights. flagged marks components whose
/// expected binomial variance is zero but whose observed frequency deviates.
struct BornReport {
  Pair z{};
  std::array<bool, 2> flagged{false, false};
};

inline BornReport born_report(const OutcomeStats& stats, const Pair& x0) {
  if (stats.n_trajectories == 0)
    throw ZeroVariance("born_report: empty ensemble");
  const double n = static_cast<double>(stats.n_trajectories);
  const std::array<double, 2> grow_freq = {
      static_cast<double>(stats.count(OutcomeClass::CollapseTo1) +
                          stats.count(OutcomeClass::BothGrow)) / n,
      static_cast<double>(stats.count(OutcomeClass::CollapseTo2) +
                          stats.count(OutcomeClass::BothGrow)) / n,
  };
  BornReport report;
  for (int c = 0; c < 2; ++c) {
    const double expected = x0[c];
    const double se = std::sqrt(expected * (1.0 - expected) / n);
    const double diff = grow_freq[c] - expected;
    if (se == 0.0) {
      report.z[c] = diff == 0.0 ? 0.0
                                : std::copysign(
                                      std::numeric_limits<double>::infinity(),
                                      diff);
      report.flagged[c] = diff != 0.0;
    } else {
      report.z[c] = diff / se;
    }
  }
  return report;
}

}  // namespace collapse
