#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace aitk {

/// Inputs violate a precondition of the operation (bad parameters, off-curve
/// points, degenerate configurations).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested case has no supporting algorithm (e.g. persistence regions
/// for general b != 0, Delta != 0).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iteration failed: no convergence, negative radicand, singular system,
/// or non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kDiscriminantTol = 1e-10;
inline constexpr double kAmbiguousSymbolTol = 1e-12;

/// Deterministic uniform in [0,1) built from the raw 64-bit stream, so results
/// do not depend on the standard library's distribution implementation.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

}  // namespace aitk
