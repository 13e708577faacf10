#pragma once

namespace collapse::constants {

// CODATA / SI-2019 values, 12 significant digits where not exact.
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s (exact)
inline constexpr double kPlanck = 6.62607015e-34;        // J s (exact)
inline constexpr double kHbar = 1.05457181765e-34;       // J s

/// Reported experimental upper bound on the reduction time, seconds.
inline constexpr double kReductionTimeUpperBound = 1e-14;

}  // namespace collapse::constants
