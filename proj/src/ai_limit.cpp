#include "aitk/ai_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aitk {

namespace detail {

BranchRoute branch_route(const StructuralParams& p) {
  if (std::abs(p.b()) <= 1e-12) return BranchRoute::VanishingB;
  if (std::abs(p.discriminant()) <= kDiscriminantTol) {
    return BranchRoute::ParallelLines;
  }
  return BranchRoute::General;
}

double general_branch_kernel(double a, double b, double disc, int s, double xi,
                             double lift) {
  const double rad = disc * xi * xi + 4.0 * a * lift;
  if (rad < 0.0) throw NumericalError("negative radicand: point off the curve");
  return (-b * xi + s * std::sqrt(rad)) / (2.0 * a);
}

double vanishing_b_kernel(double a, double c, int s, double xi, double lift) {
  const double rad = (lift - c * xi * xi) / a;
  if (rad < 0.0) throw NumericalError("negative radicand: point off the curve");
  return s * std::sqrt(rad);
}

double parallel_kernel(double m, int s, double xi, double lift) {
  if (lift < 0.0) throw NumericalError("negative radicand: point off the curve");
  return m * xi + s * (1.0 - m) * std::sqrt(lift);
}

}  // namespace detail

BranchMaps::BranchMaps(StructuralParams params_, Direction direction_)
    : params(params_), direction(direction_) {
  if (direction == Direction::Forward && params.a() == 0.0) {
    throw DomainError("forward branches need a != 0");
  }
  if (direction == Direction::Backward && params.c() == 0.0) {
    throw DomainError("backward branches need c != 0");
  }
}

namespace {

double forward_branch(const StructuralParams& p, int s, double xi) {
  switch (detail::branch_route(p)) {
    case detail::BranchRoute::VanishingB:
      return detail::vanishing_b_kernel(p.a(), p.c(), s, xi, 1.0);
    case detail::BranchRoute::ParallelLines:
      return detail::parallel_kernel(p.slope(), s, xi, 1.0);
    case detail::BranchRoute::General:
      return detail::general_branch_kernel(p.a(), p.b(), p.discriminant(), s,
                                           xi, 1.0);
  }
  throw DomainError("unreachable");
}

double forward_derivative(const StructuralParams& p, int s, double xi) {
  switch (detail::branch_route(p)) {
    case detail::BranchRoute::ParallelLines:
      return p.slope();
    case detail::BranchRoute::VanishingB: {
      const double rad = (1.0 - p.c() * xi * xi) / p.a();
      if (rad <= 0.0) throw NumericalError("derivative needs a positive radicand");
      return -s * p.c() * xi / (p.a() * std::sqrt(rad));
    }
    case detail::BranchRoute::General: {
      const double d = p.discriminant();
      const double rad = 4.0 * p.a() + d * xi * xi;
      if (rad <= 0.0) throw NumericalError("derivative needs a positive radicand");
      return -p.b() / (2.0 * p.a()) + s * d * xi / (2.0 * p.a() * std::sqrt(rad));
    }
  }
  throw DomainError("unreachable");
}

}  // namespace

double branch_map(const BranchMaps& bm, int s, double xi) {
  if (s != 1 && s != -1) throw DomainError("symbol must be -1 or +1");
  const StructuralParams p = bm.direction == Direction::Forward
                                 ? bm.params
                                 : bm.params.swapped();
  return forward_branch(p, s, xi);
}

double branch_derivative(const BranchMaps& bm, int s, double xi) {
  if (s != 1 && s != -1) throw DomainError("symbol must be -1 or +1");
  const StructuralParams p = bm.direction == Direction::Forward
                                 ? bm.params
                                 : bm.params.swapped();
  return forward_derivative(p, s, xi);
}

double x_star(const StructuralParams& p) {
  if (classify(p) == ConicClass::Ellipse) {
    if (!(p.c() > 0.0 && p.c() < p.a())) {
      throw DomainError("elliptic interval needs 0 < c < a");
    }
    return 2.0 * std::sqrt(p.c() / std::abs(p.discriminant()));
  }
  if (p.b() <= 0.0) return 1.0;
  if (p.b() < 0.5) return 1.0 / std::sqrt(1.0 - 2.0 * p.b());
  throw DomainError("no self-mapped interval for b >= 1/2");
}

TrustInterval make_trust_interval(const StructuralParams& p, double M) {
  if (M < 0.0) throw DomainError("expansion M must be nonnegative");
  return TrustInterval{x_star(p), M};
}

namespace {

constexpr double kRegionSlack = 1e-12;
constexpr double kFail = -std::numeric_limits<double>::infinity();

double elliptic_upper(double a) {
  const double split = 0.5 * (std::sqrt(5.0) - 1.0);
  const double piece1 =
      (1.0 - a + 2.0 * std::sqrt(16.0 * a * a - 11.0 * a + 2.0)) / 7.0;
  const double piece2 = a + 3.0 - 2.0 * std::sqrt(a + 2.0);
  if (a < split) return piece1;
  if (a > split) return piece2;
  return std::min(piece1, piece2);
}

// Raw margin of the forward contraction inequalities; -inf when a hard
// precondition fails.
double forward_margin(const StructuralParams& p) {
  const double a = p.a();
  const double c = p.c();
  switch (classify(p)) {
    case ConicClass::ParallelLines: {
      if (a == 0.0) return kFail;
      return 1.0 - std::abs(p.slope());
    }
    case ConicClass::Ellipse: {
      if (a <= 0.0) return kFail;
      const double lower = a - 2.0 * std::sqrt(a) + 1.0;
      // c > 0 and c < a (range inside domain) are implied by the bounds on
      // the region itself but keep the margin finite outside it.
      return std::min({c - lower, elliptic_upper(a) - c, c, a - c});
    }
    case ConicClass::Hyperbola: {
      if (a <= 0.0) return kFail;
      const double upper = a - 2.0 * std::sqrt(a) + 1.0;
      return std::min(c - (0.5 - a), upper - c);
    }
  }
  return kFail;
}

}  // namespace

RegionVerdict region_check(const StructuralParams& p) {
  const double fwd = forward_margin(p) - kRegionSlack;
  if (fwd > 0.0) return {true, Region::RPlus, fwd};
  const double bwd = forward_margin(p.swapped()) - kRegionSlack;
  if (bwd > 0.0) return {true, Region::RMinus, bwd};
  return {false, Region::Neither, std::max(fwd, bwd)};
}

namespace {

OrbitSequence iterate_forward(const StructuralParams& p,
                              const SymbolSequence& s,
                              const std::vector<double>& initial,
                              const AiOptions& opts) {
  const BranchMaps bm(p, Direction::Forward);
  const int n = s.period();
  std::vector<double> cur = initial;
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);
  bool converged = false;
  for (int it = 0; it < opts.max_iter && !converged; ++it) {
    double diff = 0.0;
    for (int t = 0; t < n; ++t) {
      const int prev = (t + n - 1) % n;
      next[t] = branch_map(bm, s.at(t), cur[prev]);
      diff = std::max(diff, std::abs(next[t] - cur[t]));
    }
    cur.swap(next);
    converged = diff < opts.tol;
  }
  if (!converged) {
    throw NumericalError("limit-state iteration did not converge in " +
                         std::to_string(opts.max_iter) + " iterations");
  }
  for (int t = 0; t < n; ++t) {
    const int prev = (t + n - 1) % n;
    const double res = quadratic_form(p, cur[t], cur[prev]) - 1.0;
    if (std::abs(res) >= 10.0 * opts.tol) {
      throw NumericalError("converged iterate left the curve at index " +
                           std::to_string(t));
    }
  }
  return OrbitSequence(std::move(cur));
}

OrbitSequence solve_state(const StructuralParams& p, const SymbolSequence& s,
                          const std::vector<double>& initial,
                          const AiOptions& opts, Direction dir) {
  if (dir == Direction::Forward) {
    return iterate_forward(p, s, initial, opts);
  }
  // Backward states satisfy xi_{t-1} = g_{s_t}(xi_t). In reversed time with
  // a and c exchanged this is a forward problem for the word w_v = s_{1-v};
  // the result maps back through xi_t = eta_{-t-1}.
  const int n = s.period();
  const StructuralParams q = p.swapped();
  std::vector<int> w(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) w[v] = s.at(1 - v);
  std::vector<double> init_rev(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    init_rev[u] = initial[static_cast<std::size_t>(
        ((-u - 1) % n + n) % n)];
  }
  const OrbitSequence eta =
      iterate_forward(q, SymbolSequence(std::move(w)), init_rev, opts);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) out[t] = eta.at(-t - 1);
  return OrbitSequence(std::move(out));
}

Direction pick_direction(const StructuralParams& p, bool force) {
  const RegionVerdict v = region_check(p);
  if (v.which == Region::RPlus) return Direction::Forward;
  if (v.which == Region::RMinus) return Direction::Backward;
  if (force) return Direction::Forward;
  throw UnsupportedError(
      "parameters lie outside the contraction region (pass force to try "
      "anyway)");
}

std::vector<double> word_initial(const StructuralParams& p,
                                 const SymbolSequence& s, Direction dir) {
  double half = 1.0;
  try {
    half = x_star(dir == Direction::Forward ? p : p.swapped());
  } catch (const DomainError&) {
    half = 1.0;  // forced solves outside the region: best effort
  }
  std::vector<double> init(static_cast<std::size_t>(s.period()));
  for (int t = 0; t < s.period(); ++t) {
    init[t] = std::clamp(static_cast<double>(s.at(t)), -half, half);
  }
  return init;
}

}  // namespace

OrbitSequence ai_state(const StructuralParams& p, const SymbolSequence& s,
                       const AiOptions& opts) {
  const Direction dir = pick_direction(p, opts.force);
  return solve_state(p, s, word_initial(p, s, dir), opts, dir);
}

OrbitSequence ai_state_from(const StructuralParams& p, const SymbolSequence& s,
                            const OrbitSequence& initial,
                            const AiOptions& opts) {
  if (initial.period() != s.period()) {
    throw DomainError("initial sequence period must match the word period");
  }
  const Direction dir = pick_direction(p, opts.force);
  return solve_state(p, s, initial.values(), opts, dir);
}

SymbolSequence extract_symbols(const StructuralParams& p,
                               const OrbitSequence& xi) {
  if (p.a() == 0.0) throw DomainError("symbol extraction needs a != 0");
  const int n = xi.period();
  std::vector<int> w(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const double arg = 2.0 * p.a() * xi.at(t) + p.b() * xi.at(t - 1);
    if (std::abs(arg) < kAmbiguousSymbolTol) {
      throw DomainError("ambiguous symbol at index " + std::to_string(t));
    }
    w[t] = arg > 0.0 ? 1 : -1;
  }
  return SymbolSequence(std::move(w));
}

}  // namespace aitk
