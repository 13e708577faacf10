#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace collapse {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |cos(theta)| fell below tolerance: the branch sign is undefined and the
/// caller must resample the phase.
struct DegeneratePhase : Error {
  using Error::Error;
};

/// closed_form_x(0, +1, ...) — a zero weight cannot grow.
struct InvalidInitialWeight : Error {
  using Error::Error;
};

/// An integrator step produced a non-finite component.
struct NonFiniteState : Error {
  using Error::Error;
};

/// Logistic-map seed outside (0,1) or on a pre-fixed point of the map.
struct DegenerateSeed : Error {
  using Error::Error;
};

/// The formal off-diagonal element has a vanishing denominator.
struct SingularDenominator : Error {
  using Error::Error;
};

/// 64 consecutive degenerate phase draws; the stream is unusable.
struct ResampleExhausted : Error {
  using Error::Error;
};

/// Born z-scores are undefined for an empty ensemble.
struct ZeroVariance : Error {
  using Error::Error;
};

/// Malus formula poles at epsilon = 0 or pi/2.
struct EndpointAngle : Error {
  using Error::Error;
};

/// A CHSH observable is not Hermitian within tolerance.
struct NonHermitian : Error {
  using Error::Error;
};

/// Interference spec without sources.
struct EmptySources : Error {
  using Error::Error;
};

/// Could not read or write a file.
struct IoFailure : Error {
  using Error::Error;
};

struct FileNotFound : IoFailure {
  using IoFailure::IoFailure;
};

/// Config parsing/validation failure; carries every issue found, not just
/// the first one.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& s : issues) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace collapse
