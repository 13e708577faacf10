#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "collapse/errors.hpp"
#include "collapse/rng.hpp"

namespace collapse {

using Complex = std::complex<double>;

/// 2x2 complex observable, row-major storage.
struct Observable {
  std::array<Complex, 4> m{};

  Complex at(int row, int col) const { return m[2 * row + col]; }

  bool is_hermitian(double tol = 1e-12) const {
    return std::abs(m[0].imag()) <= tol && std::abs(m[3].imag()) <= tol &&
           std::abs(m[1] - std::conj(m[2])) <= tol;
  }

  /// Largest absolute eigenvalue; assumes Hermiticity.
  double spectral_radius() const {
    const double a = m[0].real();
    const double d = m[3].real();
    const double half_trace = 0.5 * (a + d);
    const double radius =
        std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m[1]));
    return std::max(std::abs(half_trace + radius),
                    std::abs(half_trace - radius));
  }

  friend Observable operator+(const Observable& lhs, const Observable& rhs) {
    Observable out;
    for (int i = 0; i < 4; ++i) out.m[i] = lhs.m[i] + rhs.m[i];
    return out;
  }
  friend Observable operator-(const Observable& lhs, const Observable& rhs) {
    Observable out;
    for (int i = 0; i < 4; ++i) out.m[i] = lhs.m[i] - rhs.m[i];
    return out;
  }
  friend Observable operator*(double scale, const Observable& rhs) {
    Observable out;
    for (int i = 0; i < 4; ++i) out.m[i] = scale * rhs.m[i];
    return out;
  }
};

inline Observable pauli_x() { return {{Complex{0, 0}, {1, 0}, {1, 0}, {0, 0}}}; }
inline Observable pauli_y() { return {{Complex{0, 0}, {0, -1}, {0, 1}, {0, 0}}}; }
inline Observable pauli_z() { return {{Complex{1, 0}, {0, 0}, {0, 0}, {-1, 0}}}; }
inline Observable identity2() { return {{Complex{1, 0}, {0, 0}, {0, 0}, {1, 0}}}; }

/// The four local settings of a CHSH experiment. Observables must be Hermitian
/// within 1e-12 with spectral radius at most 1 + 1e-12 (outcomes in [-1, 1]).
struct ChshSetting {
  Observable a, a_prime, b, b_prime;

  void validate() const {
    for (const Observable* obs : {&a, &a_prime, &b, &b_prime}) {
      if (!obs->is_hermitian())
        throw NonHermitian("ChshSetting: observable is not Hermitian within 1e-12");
      if (obs->spectral_radius() > 1.0 + 1e-12)
        throw std::invalid_argument(
            "ChshSetting: observable spectral radius exceeds 1");
    }
  }

  /// A measures z then x; B measures the same pair rotated by 45 degrees.
  /// This is the setting that saturates the quantum bound.
  static ChshSetting rotated_45() {
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    ChshSetting s;
    s.a = pauli_z();
    s.a_prime = pauli_x();
    s.b = -inv_sqrt2 * (pauli_z() + pauli_x());
    s.b_prime = inv_sqrt2 * (pauli_z() - pauli_x());
    return s;
  }
};

/// <phi| A (x) B |phi> for the spin singlet phi = (|01> - |10>)/sqrt(2),
/// evaluated by explicit 4-dimensional linear algebra. Hermitian inputs give a
/// real correlation in [-1, 1] when the spectral radii are bounded by 1.
inline double singlet_correlation(const Observable& op_a,
                                  const Observable& op_b) {
  if (!op_a.is_hermitian() || !op_b.is_hermitian())
    throw NonHermitian("singlet_correlation: observables must be Hermitian");

  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  std::array<Complex, 4> phi{Complex{0, 0}, {inv_sqrt2, 0}, {-inv_sqrt2, 0}, {0, 0}};

  std::array<Complex, 4> image{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          image[2 * i + j] += op_a.at(i, k) * op_b.at(j, l) * phi[2 * k + l];

  Complex corr{0, 0};
  for (int i = 0; i < 4; ++i) corr += std::conj(phi[i]) * image[i];
  return corr.real();
}

/// CHSH functional
///   F = max( |C(a,b) + C(a,b')| + |C(a',b) - C(a',b')|,
///            |C(a,b) - C(a,b')| + |C(a',b) + C(a',b')| ).
/// Maximizing over the two sign patterns makes F independent of the b/b'
/// labelling.
inline double chsh_value(const ChshSetting& setting) {
  setting.validate();
  const double cab = singlet_correlation(setting.a, setting.b);
  const double cabp = singlet_correlation(setting.a, setting.b_prime);
  const double capb = singlet_correlation(setting.a_prime, setting.b);
  const double capbp = singlet_correlation(setting.a_prime, setting.b_prime);
  return std::max(std::abs(cab + cabp) + std::abs(capb - capbp),
                  std::abs(cab - cabp) + std::abs(capb + capbp));
}

/// Maximum of the CHSH functional over local deterministic strategies, i.e.
/// fixed outcome signs per setting with C(x, y) = A(x)B(y). The exhaustive
/// sweep covers all 16 assignments (whose maximum is exactly 2); n_strategies
/// additional assignments are drawn at random from `seed`.
inline double chsh_lhv_max(std::uint64_t n_strategies, std::uint64_t seed,
                           bool exhaustive = true) {
  if (!exhaustive && n_strategies == 0)
    throw std::invalid_argument("chsh_lhv_max: no strategies to evaluate");

  const auto value = [](int aa, int aap, int bb, int bbp) {
    const double cab = aa * bb, cabp = aa * bbp;
    const double capb = aap * bb, capbp = aap * bbp;
    return std::max(std::abs(cab + cabp) + std::abs(capb - capbp),
                    std::abs(cab - cabp) + std::abs(capb + capbp));
  };
  const auto sign_of_bit = [](std::uint64_t bits, int i) {
    return (bits >> i) & 1u ? +1 : -1;
  };

  double best = 0.0;
  if (exhaustive)
    for (std::uint64_t bits = 0; bits < 16; ++bits)
      best = std::max(best, value(sign_of_bit(bits, 0), sign_of_bit(bits, 1),
                                  sign_of_bit(bits, 2), sign_of_bit(bits, 3)));
  SplitMix64 stream{seed};
  for (std::uint64_t i = 0; i < n_strategies; ++i) {
    const std::uint64_t bits = stream.next();
    best = std::max(best, value(sign_of_bit(bits, 0), sign_of_bit(bits, 1),
                                sign_of_bit(bits, 2), sign_of_bit(bits, 3)));
  }
  return best;
}

/// Quantum ceiling of the CHSH functional.
inline constexpr double kTsirelsonBound = 2.0 * std::numbers::sqrt2;

/// Reported measurements of F, kept as reference constants (not reproducible
/// at desk scale).
struct ChshReference {
  const char* label;
  double value;
  double uncertainty;
};

inline constexpr std::array<ChshReference, 2> kChshReferences{{
    {"aspect_1982", 2.697, 0.015},
    {"rowe_2001", 2.25, 0.03},
}};

}  // namespace collapse
