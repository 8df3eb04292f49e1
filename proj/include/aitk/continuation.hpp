#pragma once

#include <complex>
#include <optional>
#include <string>

#include "aitk/core.hpp"
#include "aitk/linalg.hpp"

namespace aitk {

/// Zero problem for period-n orbits: component t of G(xi, eps) is the
/// difference-equation residual at index t with cyclic indices, so
/// G : R^n x R -> R^n.
struct ResidualSystem {
  StructuralParams p;
  double sigma = 0.0;
  double delta = 0.0;
  int n = 1;
};

std::vector<double> residual(const ResidualSystem& sys, const OrbitSequence& xi,
                             double eps);

/// Analytic n x (n+1) Jacobian of G; stencil entries are accumulated so the
/// collapsed columns of small periods (n <= 3) come out right. The last
/// column is dG/d(eps).
linalg::Matrix jacobian(const ResidualSystem& sys, const OrbitSequence& xi,
                        double eps);

struct Tangent {
  std::vector<double> xi_dot;
  double eps_dot = 0.0;
};

/// Unit tangent at the start of a branch: fixes d(eps) = 0.005, solves the
/// first n rows of the bordered tangent system, and normalizes.
Tangent initial_tangent(const ResidualSystem& sys, const OrbitSequence& xi0);

struct BranchPoint {
  double epsilon = 0.0;
  OrbitSequence xi;
  Tangent tangent;
  /// Monodromy multipliers; empty at eps = 0 or when tracking is off.
  std::vector<std::complex<double>> multipliers;
  bool converged = false;
  bool fold_flag = false;
  bool pd_flag = false;
};

enum class TerminationReason {
  EpsAboveMax,
  EpsBelowZero,
  StepUnderflow,
  MaxPoints,
};

const char* to_string(TerminationReason r);

struct BranchOptions {
  double eps_max = 2.0;
  double ell0 = 0.01;          // arclength step, reset after each success
  double ell_min = 1e-10;      // halving below this terminates the branch
  double corrector_tol = 1e-12;
  int max_broyden = 150;
  double jump_cap_factor = 10.0;  // reject steps with ||xi - xi_pred|| > cap*ell
  int refactor_period = 30;       // scheduled refactorization of the Broyden factors
  int max_points = 200000;
  /// Multipliers over/underflow doubles for long orbits; track only below this.
  int multiplier_period_limit = 128;
  bool force = false;  // start outside the contraction region
};

struct BifurcationEvent {
  enum class Kind { SaddleNode, PeriodDoubling };
  Kind kind = Kind::SaddleNode;
  double epsilon = 0.0;
  OrbitSequence orbit;
  /// Saddle-node: word of the colliding orbit (sheet past the fold);
  /// period-doubling: word of the doubled-period orbit when recoverable.
  std::optional<SymbolSequence> partner_word;
  /// Word of the sheet approaching the event.
  std::optional<SymbolSequence> approach_word;
  /// Fold whose departure sheet is a rotation of the approach sheet: the
  /// apex of a doubled-period branch, i.e. a period-doubling seen from the
  /// child side.
  bool subharmonic_apex = false;
  /// Smallest singular value of the state Jacobian at a refined fold.
  double sigma_min = -1.0;
  /// Real multiplier at a refined period-doubling.
  double multiplier = 0.0;
  bool refined = false;
  /// Index of the accepted point just before the event.
  int bracket_index = -1;
};

const char* to_string(BifurcationEvent::Kind k);

struct BranchRecord {
  ResidualSystem sys;
  SymbolSequence word;
  BranchOptions opts;
  std::vector<BranchPoint> points;
  TerminationReason termination = TerminationReason::MaxPoints;
  std::string termination_detail;
  std::vector<BifurcationEvent> events;

  double max_epsilon() const;
};

/// Traces the branch of the word's limit state from eps = 0 while eps stays
/// in [0, eps_max]: unit-tangent predictor, Broyden corrector seeded with the
/// analytic bordered Jacobian (QR-factored, rank-one updated, refactored on
/// schedule or stall), step halving on failure. Events are left empty; run
/// detect_bifurcations for them.
BranchRecord continue_branch(const ResidualSystem& sys,
                             const SymbolSequence& word,
                             const BranchOptions& opts = {});

/// Traces a branch from an arbitrary on-branch point and unit tangent
/// (doubled-period arms, reseeded runs). first_ell is the first predictor
/// distance.
BranchRecord continue_branch_from(const ResidualSystem& sys,
                                  const SymbolSequence& word,
                                  const OrbitSequence& xi0, double eps0,
                                  const Tangent& t0, double first_ell,
                                  const BranchOptions& opts = {});

/// Eigenvalues of the product over one period of the transfer matrices
///   A_t = [[(2a xi_t + b xi_{t-1})/eps, (b xi_t + 2c xi_{t-1})/eps - sigma,
///           delta], [1,0,0], [0,1,0]].
/// Undefined at eps = 0. Values beyond double range come back as infinities;
/// see monodromy_log_det_gap for the long-orbit determinant identity.
std::array<std::complex<double>, 3> multipliers(const ResidualSystem& sys,
                                                const OrbitSequence& xi,
                                                double eps);

/// | log|det of the accumulated monodromy| - n log|delta| |, evaluated with
/// running rescaling so it stays meaningful for long orbits. Requires
/// delta != 0 and eps > 0.
double monodromy_log_det_gap(const ResidualSystem& sys, const OrbitSequence& xi,
                             double eps);

/// Scans consecutive accepted points for tangent eps-component sign changes
/// (folds) and real multipliers crossing -1 (period doublings), refining each
/// by bisection with re-correction to 1e-6 in eps.
std::vector<BifurcationEvent> detect_bifurcations(const BranchRecord& branch);

/// Closed form for the period-doubling of the (-)-fixed point:
/// eps = 2(a-c)/sqrt((1+s+d)(a(3+3s-d) + b(1+s+d) + c(-1-s+3d))).
double pd_fixed_point_formula(const StructuralParams& p, double sigma,
                              double delta);

/// Fixed points of the difference equation:
/// xi = ((1+sigma-delta) eps +- sqrt(4 + (1+sigma-delta)^2 eps^2)) / 2.
double fixed_point_closed_form(double sigma, double delta, double eps, int sign);

struct SnObservation {
  SymbolSequence source_word;
  /// False when the witnessing branch segment lies past an earlier fold, so
  /// the source word no longer names the sheet.
  bool label_known = true;
  double epsilon = 0.0;
  OrbitSequence orbit;
};

struct SnPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double epsilon = 0.0;
  int hamming = 0;
};

struct PairingReport {
  std::vector<SnPair> pairs;
  std::vector<std::size_t> unpaired;
};

/// Pairs saddle-node observations whose eps agree within 1e-4 and whose fold
/// orbits coincide to 1e-4 (cyclic alignment); self-pairing is excluded and
/// leftover events are reported, not fatal.
PairingReport saddle_node_pairing(const std::vector<SnObservation>& obs);

/// Word of the doubled-period branch at a detected period-doubling, found by
/// tracing the child branch from the apex (seeded along the -1 eigenvector
/// with a 1e-4 first step) down to eps ~ 0 and reading the word there.
std::optional<SymbolSequence> child_word_for_pd(const ResidualSystem& sys,
                                                const BifurcationEvent& pd,
                                                const BranchOptions& opts = {});

}  // namespace aitk
