#pragma once

#include <array>
#include <optional>

#include "aitk/ai_limit.hpp"
#include "aitk/core.hpp"

namespace aitk {

enum class PersistenceKind { GeneralT, VanishingB, ParallelLines };

const char* to_string(PersistenceKind k);

/// Bundle describing one solve: which contraction operator applies, the
/// parameters, and the cube expansion M. VanishingB works on the cube
/// ||xi - s||_inf <= M, ParallelLines on ||xi||_inf <= x* + M.
struct PersistenceCase {
  PersistenceKind kind;
  StructuralParams p;
  UnfoldingParams u;
  double M = 0.0;
  double x_star = 1.0;
};

/// Chooses the case for the given parameters: vanishing b wins when both the
/// b = 0 and Delta = 0 conditions hold, since only its bounds are sharp there;
/// otherwise parallel lines when Delta vanishes, and the general operator as
/// the fallback (no region theory).
PersistenceCase make_persistence_case(const StructuralParams& p,
                                      const UnfoldingParams& u, double M);

/// gamma = |eps| (1 + |sigma| + |delta|).
double gamma(const UnfoldingParams& u);

/// Componentwise solve of the difference equation for xi_t:
/// (-b xi_{t-1} + s_t sqrt(Delta xi_{t-1}^2 + 4a [1 + eps(xi_{t+1} + sigma
/// xi_{t-1} - delta xi_{t-2})])) / (2a). Works for any coefficients with
/// a != 0; reduces to the limit branch maps at eps = 0.
OrbitSequence operator_T(const PersistenceCase& pc, const SymbolSequence& s,
                         const OrbitSequence& xi);

/// b = 0 specialization: s_t sqrt((1 - c xi_{t-1}^2 + eps(...)) / a).
OrbitSequence operator_T0(const PersistenceCase& pc, const SymbolSequence& s,
                          const OrbitSequence& xi);

/// Degenerate-conic specialization by slope m:
/// m xi_{t-1} + s_t (1-m) sqrt(1 + eps(...)).
OrbitSequence operator_Tpar(const PersistenceCase& pc, const SymbolSequence& s,
                            const OrbitSequence& xi);

enum class PersistenceBound {
  SelfMapUpper,     // image stays below the cube ceiling
  SelfMapLower,     // image stays above the cube floor
  DerivativeBound,  // operator derivative norm below one
  RadicandReal,     // gamma (x* + M) < 1 keeps the radicand positive
};

const char* to_string(PersistenceBound b);

struct RegionMVerdict {
  bool in_region = false;
  /// Supremum of admissible gamma at this M (minimum of the case's bounds).
  double gamma_bound = 0.0;
  PersistenceBound binding_constraint = PersistenceBound::SelfMapUpper;
};

/// Upper bounds on gamma for the given case and M, ordered as the
/// PersistenceBound enum. VanishingB has three entries, ParallelLines four
/// (the derivative slot holds the positive root of its quadratic condition).
std::array<double, 4> gamma_bounds(const PersistenceCase& pc);

/// in_region = gamma(u) < min of the case's bounds. GeneralT is rejected.
RegionMVerdict region_M_check(const PersistenceCase& pc);

/// Superseded self-mapping bound kept for comparison only: for a = 1 it
/// admits no positive epsilon.
double vanishing_b_bound_main_text(const StructuralParams& p, double M);

struct EpsilonNResult {
  double epsilon_n = 0.0;
  double optimal_M = 0.0;
  double gamma_bound = 0.0;
  PersistenceBound binding = PersistenceBound::SelfMapUpper;
  PersistenceKind kind = PersistenceKind::GeneralT;
};

/// Largest eps below which every word continues to a unique orbit: maximizes
/// the admissible gamma over M (1000-point grid scan plus golden-section
/// refinement to 1e-6) and divides by 1 + |sigma| + |delta|. Returns 0 when
/// no M is feasible; general coefficients are rejected.
EpsilonNResult epsilon_N(const StructuralParams& p, double sigma, double delta);

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  /// Solve even when region_M_check fails or no region theory applies.
  bool force = false;
};

/// Iterates the case operator from the limit state of the word until
/// successive iterates differ by less than tol, then audits the residual.
OrbitSequence solve_orbit_contraction(const PersistenceCase& pc,
                                      const SymbolSequence& s,
                                      const SolveOptions& opts = {});

/// Same, from a caller-supplied initial sequence.
OrbitSequence solve_orbit_contraction_from(const PersistenceCase& pc,
                                           const SymbolSequence& s,
                                           const OrbitSequence& initial,
                                           const SolveOptions& opts = {});

/// Uniform random sequence inside the case's cube (test/diagnostic helper).
OrbitSequence random_orbit_in_cube(const PersistenceCase& pc,
                                   const SymbolSequence& s,
                                   std::uint64_t seed);

}  // namespace aitk
