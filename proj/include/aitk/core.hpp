#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aitk/common.hpp"

namespace aitk {

/// Coefficients (a,b,c) of the quadratic form Q(x,y) = ax^2 + bxy + cy^2 under
/// the normalization a + b + c = 1 (enforced at construction to 1e-12).
class StructuralParams {
 public:
  StructuralParams(double a, double b, double c);

  /// Degenerate-conic parameterization (1, -2m, m^2)/(1-m)^2 by the line
  /// slope m; the discriminant vanishes identically. m = 1 is rejected.
  static StructuralParams from_slope(double m);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

  /// Discriminant b^2 - 4ac of Q.
  double discriminant() const { return b_ * b_ - 4.0 * a_ * c_; }

  /// Line slope -b/(2a) of the degenerate (parallel-lines) case.
  double slope() const;

  /// Coefficients with a and c exchanged (time reversal of the correspondence).
  StructuralParams swapped() const { return StructuralParams(c_, b_, a_); }

 private:
  double a_, b_, c_;
};

enum class ConicClass { ParallelLines, Ellipse, Hyperbola };

/// Classifies the level set Q = 1 by the sign of the discriminant, with
/// absolute tolerance kDiscriminantTol around zero.
ConicClass classify(const StructuralParams& p);

const char* to_string(ConicClass c);

/// Unfolding parameters (sigma, delta, epsilon >= 0). alpha = -1/eps^2 is
/// derived, never stored.
class UnfoldingParams {
 public:
  UnfoldingParams(double sigma, double delta, double epsilon);

  double sigma() const { return sigma_; }
  double delta() const { return delta_; }
  double epsilon() const { return epsilon_; }

  /// alpha = -1/eps^2; undefined at eps = 0.
  double alpha() const;

  /// gamma = |eps| (1 + |sigma| + |delta|), the lumped perturbation size.
  double gamma() const;

  UnfoldingParams with_epsilon(double eps) const {
    return UnfoldingParams(sigma_, delta_, eps);
  }

 private:
  double sigma_, delta_, epsilon_;
};

struct State3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

/// Q(x,y) = ax^2 + bxy + cy^2.
double quadratic_form(const StructuralParams& p, double x, double y);

/// Slopes (m+, m-) of the asymptotes of Q = 1, (-b +- sqrt(Delta))/(2a).
/// Requires a != 0 and Delta >= 0 (Delta within tolerance of 0 gives the
/// repeated root).
std::pair<double, double> asymptote_slopes(const StructuralParams& p);

/// One step of the three-dimensional map (x,y,z) -> (delta z + G(x,y), x, y)
/// with G(x,y) = alpha - sigma y + Q(x,y). The epsilon in `u` is unused; alpha
/// is an explicit input for fixed-alpha workflows.
State3 map_step(const StructuralParams& p, const UnfoldingParams& u,
                double alpha, const State3& s);

/// Residual of the rescaled third-order difference equation,
///   Q(xi_t, xi_{t-1}) - 1 - eps (xi_{t+1} + sigma xi_{t-1} - delta xi_{t-2}).
double residual_L(const StructuralParams& p, const UnfoldingParams& u,
                  double xi_next, double xi_t, double xi_prev, double xi_prev2);

namespace detail {
/// Same residual with a raw epsilon (continuation needs transient eps < 0).
double residual_raw(const StructuralParams& p, double sigma, double delta,
                    double eps, double xi_next, double xi_t, double xi_prev,
                    double xi_prev2);
}  // namespace detail

/// Periodic word over {-1,+1}; index arithmetic is cyclic.
class SymbolSequence {
 public:
  SymbolSequence() : word_{1} {}
  explicit SymbolSequence(std::vector<int> word);

  /// Parses a word given as '-'/'+' characters, e.g. "-++".
  static SymbolSequence parse(std::string_view text);

  /// Uniform random word of the given period from a 64-bit seed.
  static SymbolSequence random(int period, std::uint64_t seed);

  int period() const { return static_cast<int>(word_.size()); }
  int at(long long t) const { return word_[wrap(t)]; }
  const std::vector<int>& word() const { return word_; }

  std::string to_string() const;

  SymbolSequence negated() const;

  bool operator==(const SymbolSequence& o) const { return word_ == o.word_; }

 private:
  std::size_t wrap(long long t) const {
    const long long n = static_cast<long long>(word_.size());
    return static_cast<std::size_t>(((t % n) + n) % n);
  }
  std::vector<int> word_;
};

/// One period of a periodic real sequence; index arithmetic is cyclic.
class OrbitSequence {
 public:
  OrbitSequence() : values_{0.0} {}
  explicit OrbitSequence(std::vector<double> values);

  int period() const { return static_cast<int>(values_.size()); }
  double at(long long t) const { return values_[wrap(t)]; }
  void set(long long t, double v) { values_[wrap(t)] = v; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const OrbitSequence& o) const { return values_ == o.values_; }

 private:
  std::size_t wrap(long long t) const {
    const long long n = static_cast<long long>(values_.size());
    return static_cast<std::size_t>(((t % n) + n) % n);
  }
  std::vector<double> values_;
};

/// xi = eps * x elementwise.
OrbitSequence scale_orbit(const OrbitSequence& x, double epsilon);

/// x = xi / eps elementwise; eps = 0 is rejected.
OrbitSequence unscale_orbit(const OrbitSequence& xi, double epsilon);

/// Iterates the 3D map with (a,b,c) = (1,0,0), delta = 0 alongside the planar
/// quadratic map (x',y') = (y - k + x^2, -dh x) with k = -alpha, dh = sigma,
/// identified through (xi, eta) = (x, -sigma y). Returns the maximum
/// coordinate discrepancy over n_steps. Nonzero b, c, or delta is rejected.
double henon_embed_check(const StructuralParams& p, double sigma, double delta,
                         double alpha, int n_steps, const State3& seed);

/// No-bifurcation bound for the embedded planar map:
/// 2 sqrt(1 - 2/sqrt(5)) / (1 + 2|sigma|).
double henon_no_bifurcation_bound(double sigma);

}  // namespace aitk
