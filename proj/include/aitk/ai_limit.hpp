#pragma once

#include "aitk/core.hpp"

namespace aitk {

enum class Direction { Forward, Backward };

/// Single-valued branches of the two-valued correspondence Q = 1. Forward
/// solves for xi_t given xi_{t-1} (needs a != 0); Backward solves for xi_{t-1}
/// given xi_t (needs c != 0) and equals the Forward maps of the a<->c swapped
/// coefficients.
struct BranchMaps {
  BranchMaps(StructuralParams params, Direction direction);
  StructuralParams params;
  Direction direction;
};

/// f_s(xi) = (-b xi + s sqrt(Delta xi^2 + 4a)) / (2a) for s in {-1,+1}, routed
/// through the vanishing-b and parallel-lines specializations so the limit
/// operators reduce to it exactly.
double branch_map(const BranchMaps& bm, int s, double xi);

/// d/dxi of branch_map; requires a strictly positive radicand.
double branch_derivative(const BranchMaps& bm, int s, double xi);

/// Half-width of the self-mapped interval [-x*, x*]: 1 for b <= 0 and
/// 1/sqrt(1-2b) for 0 < b < 1/2 (lines and hyperbolae), 2 sqrt(c/|Delta|) for
/// ellipses (which needs 0 < c < a).
double x_star(const StructuralParams& p);

/// Self-mapped interval together with its downstream expansion amount.
struct TrustInterval {
  double x_star;
  double M;
};

TrustInterval make_trust_interval(const StructuralParams& p, double M);

enum class Region { RPlus, RMinus, Neither };

struct RegionVerdict {
  bool in_region = false;
  Region which = Region::Neither;
  /// Smallest slack among the active inequalities (positive iff in_region);
  /// for Neither, the less negative of the forward/backward margins.
  double margin = 0.0;
};

/// Tests the case-appropriate contraction inequalities for the forward
/// branches; on failure retries with a and c exchanged (backward branches).
RegionVerdict region_check(const StructuralParams& p);

struct AiOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  /// Iterate even when region_check returns Neither (no guarantee).
  bool force = false;
};

/// Solves for the limit state of a symbol word by iterating the map
/// F_t(xi) = f_{s_t}(xi_{t-1}) from xi0 = s (clipped to [-x*, x*]) until
/// successive iterates differ by less than tol. For RMinus parameters the
/// word indexes the backward branches and the iteration runs in reversed
/// index order.
OrbitSequence ai_state(const StructuralParams& p, const SymbolSequence& s,
                       const AiOptions& opts = {});

/// Same, from a caller-supplied initial sequence.
OrbitSequence ai_state_from(const StructuralParams& p, const SymbolSequence& s,
                            const OrbitSequence& initial,
                            const AiOptions& opts = {});

/// Recovers the branch word of an orbit: s_t = sign(2a xi_t + b xi_{t-1}).
/// An argument within 1e-12 of zero is reported as ambiguous.
SymbolSequence extract_symbols(const StructuralParams& p,
                               const OrbitSequence& xi);

namespace detail {
// Shared kernels; the persistence operators evaluate these with a nonzero
// epsilon lift so their eps = 0 reduction is bit-identical to branch_map.
double general_branch_kernel(double a, double b, double disc, int s, double xi,
                             double lift);
double vanishing_b_kernel(double a, double c, int s, double xi, double lift);
double parallel_kernel(double m, int s, double xi, double lift);

enum class BranchRoute { General, VanishingB, ParallelLines };
BranchRoute branch_route(const StructuralParams& p);
}  // namespace detail

}  // namespace aitk
