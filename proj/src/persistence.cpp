#include "aitk/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aitk {

const char* to_string(PersistenceKind k) {
  switch (k) {
    case PersistenceKind::GeneralT:
      return "general";
    case PersistenceKind::VanishingB:
      return "vanishing-b";
    case PersistenceKind::ParallelLines:
      return "parallel-lines";
  }
  return "?";
}

const char* to_string(PersistenceBound b) {
  switch (b) {
    case PersistenceBound::SelfMapUpper:
      return "self-map-upper";
    case PersistenceBound::SelfMapLower:
      return "self-map-lower";
    case PersistenceBound::DerivativeBound:
      return "derivative";
    case PersistenceBound::RadicandReal:
      return "radicand-real";
  }
  return "?";
}

PersistenceCase make_persistence_case(const StructuralParams& p,
                                      const UnfoldingParams& u, double M) {
  if (M < 0.0) throw DomainError("expansion M must be nonnegative");
  PersistenceKind kind = PersistenceKind::GeneralT;
  if (std::abs(p.b()) <= 1e-12) {
    kind = PersistenceKind::VanishingB;
    if (M >= 1.0) {
      throw DomainError("vanishing-b cube needs M < 1");
    }
  } else if (std::abs(p.discriminant()) <= kDiscriminantTol) {
    kind = PersistenceKind::ParallelLines;
  }
  double xs = 1.0;
  try {
    xs = x_star(p);
  } catch (const DomainError&) {
    xs = 1.0;  // general case without an interval; cube data unused
  }
  return PersistenceCase{kind, p, u, M, xs};
}

double gamma(const UnfoldingParams& u) { return u.gamma(); }

namespace {

using detail::general_branch_kernel;
using detail::parallel_kernel;
using detail::vanishing_b_kernel;

enum class OpKind { General, VanishingB, Parallel };

OrbitSequence apply_operator(const PersistenceCase& pc,
                             const SymbolSequence& s, const OrbitSequence& xi,
                             OpKind op) {
  if (s.period() != xi.period()) {
    throw DomainError("word and orbit periods must match");
  }
  const int n = xi.period();
  const double eps = pc.u.epsilon();
  const double sg = pc.u.sigma();
  const double dl = pc.u.delta();
  const StructuralParams& p = pc.p;
  const double m = op == OpKind::Parallel ? p.slope() : 0.0;

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const double drive = xi.at(t + 1) + sg * xi.at(t - 1) - dl * xi.at(t - 2);
    const double lift = 1.0 + eps * drive;
    try {
      switch (op) {
        case OpKind::General:
          out[t] = general_branch_kernel(p.a(), p.b(), p.discriminant(),
                                         s.at(t), xi.at(t - 1), lift);
          break;
        case OpKind::VanishingB:
          out[t] = vanishing_b_kernel(p.a(), p.c(), s.at(t), xi.at(t - 1), lift);
          break;
        case OpKind::Parallel:
          out[t] = parallel_kernel(m, s.at(t), xi.at(t - 1), lift);
          break;
      }
    } catch (const NumericalError&) {
      throw NumericalError("negative radicand at index " + std::to_string(t));
    }
  }
  return OrbitSequence(std::move(out));
}

}  // namespace

OrbitSequence operator_T(const PersistenceCase& pc, const SymbolSequence& s,
                         const OrbitSequence& xi) {
  if (pc.p.a() == 0.0) throw DomainError("operator needs a != 0");
  return apply_operator(pc, s, xi, OpKind::General);
}

OrbitSequence operator_T0(const PersistenceCase& pc, const SymbolSequence& s,
                          const OrbitSequence& xi) {
  if (std::abs(pc.p.b()) > 1e-12) {
    throw DomainError("vanishing-b operator needs b = 0");
  }
  if (pc.p.a() <= 0.0) throw DomainError("vanishing-b operator needs a > 0");
  return apply_operator(pc, s, xi, OpKind::VanishingB);
}

OrbitSequence operator_Tpar(const PersistenceCase& pc, const SymbolSequence& s,
                            const OrbitSequence& xi) {
  if (std::abs(pc.p.discriminant()) > kDiscriminantTol) {
    throw DomainError("parallel-lines operator needs a vanishing discriminant");
  }
  if (pc.p.a() == 0.0) throw DomainError("operator needs a != 0");
  return apply_operator(pc, s, xi, OpKind::Parallel);
}

std::array<double, 4> gamma_bounds(const PersistenceCase& pc) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double M = pc.M;
  const double a = std::abs(pc.p.a());
  const double c = std::abs(pc.p.c());
  switch (pc.kind) {
    case PersistenceKind::VanishingB: {
      const double up = (1.0 + M);
      const double b1 = ((a - c) * up * up - 1.0) / up;
      const double b2 = (1.0 - a * (1.0 - M) * (1.0 - M) - c * up * up) / up;
      const double b3 = 2.0 * a * (1.0 - M) - 2.0 * c * up;
      return {b1, b2, b3, inf};
    }
    case PersistenceKind::ParallelLines: {
      const double m = pc.p.slope();
      const double u = pc.x_star + M;
      const double s1 = (1.0 - std::abs(m)) * (1.0 - std::abs(m));
      const double s2 = (1.0 - m) * (1.0 - m);
      const double b1 = (s1 * u * u - s2) / (s2 * u);
      const double root =
          (-2.0 * s1 * u +
           2.0 * std::sqrt(s1) * std::sqrt(s1 * u * u + s2)) /
          s2;
      return {b1, inf, root, 1.0 / u};
    }
    case PersistenceKind::GeneralT:
      throw UnsupportedError(
          "no contraction bounds for general coefficients");
  }
  throw DomainError("unreachable");
}

RegionMVerdict region_M_check(const PersistenceCase& pc) {
  const std::array<double, 4> bounds = gamma_bounds(pc);
  RegionMVerdict v;
  v.gamma_bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    if (bounds[static_cast<std::size_t>(i)] < v.gamma_bound) {
      v.gamma_bound = bounds[static_cast<std::size_t>(i)];
      v.binding_constraint = static_cast<PersistenceBound>(i);
    }
  }
  v.in_region = pc.u.gamma() < v.gamma_bound;
  return v;
}

double vanishing_b_bound_main_text(const StructuralParams& p, double M) {
  const double a = p.a();
  const double up = 1.0 + M;
  return std::min(a - 1.0, 1.0 - a * (1.0 - M) * (1.0 - M)) / up -
         std::abs(1.0 - a) * up;
}

namespace {

double admissible_gamma(const StructuralParams& p, double sigma, double delta,
                        PersistenceKind kind, double M) {
  const UnfoldingParams u(sigma, delta, 0.0);
  const PersistenceCase pc{kind, p, u, M,
                           [&] {
                             try {
                               return x_star(p);
                             } catch (const DomainError&) {
                               return 1.0;
                             }
                           }()};
  const auto bounds = gamma_bounds(pc);
  double g = std::numeric_limits<double>::infinity();
  for (double b : bounds) g = std::min(g, b);
  return g;
}

}  // namespace

EpsilonNResult epsilon_N(const StructuralParams& p, double sigma,
                         double delta) {
  PersistenceKind kind;
  if (std::abs(p.b()) <= 1e-12) {
    kind = PersistenceKind::VanishingB;
  } else if (std::abs(p.discriminant()) <= kDiscriminantTol) {
    kind = PersistenceKind::ParallelLines;
  } else {
    throw UnsupportedError(
        "no persistence bound for general coefficients (b != 0 and "
        "discriminant != 0)");
  }

  const double m_hi = kind == PersistenceKind::VanishingB ? 1.0 - 1e-9 : 20.0;
  auto g = [&](double M) {
    return admissible_gamma(p, sigma, delta, kind, M);
  };

  // Grid pre-scan guards against non-unimodal bound envelopes.
  const int grid = 1000;
  int best_i = -1;
  double best_g = 0.0;
  for (int i = 1; i < grid; ++i) {
    const double M = m_hi * i / grid;
    const double gi = g(M);
    if (gi > best_g) {
      best_g = gi;
      best_i = i;
    }
  }
  EpsilonNResult res;
  res.kind = kind;
  if (best_i < 0) return res;  // no feasible M

  double lo = m_hi * (best_i - 1) / grid;
  double hi = m_hi * (best_i + 1) / grid;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  while (hi - lo > 1e-6) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = g(x1);
    }
  }
  const double m_opt = 0.5 * (lo + hi);
  const double gb = g(m_opt);
  if (gb <= 0.0) return res;

  res.optimal_M = m_opt;
  res.gamma_bound = gb;
  res.epsilon_n = gb / (1.0 + std::abs(sigma) + std::abs(delta));
  const PersistenceCase pc{kind, p, UnfoldingParams(sigma, delta, 0.0), m_opt,
                           [&] {
                             try {
                               return x_star(p);
                             } catch (const DomainError&) {
                               return 1.0;
                             }
                           }()};
  const auto bounds = gamma_bounds(pc);
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    if (bounds[static_cast<std::size_t>(i)] < mn) {
      mn = bounds[static_cast<std::size_t>(i)];
      res.binding = static_cast<PersistenceBound>(i);
    }
  }
  return res;
}

namespace {

OrbitSequence iterate_case(const PersistenceCase& pc, const SymbolSequence& s,
                           OrbitSequence cur, const SolveOptions& opts) {
  const OpKind op = pc.kind == PersistenceKind::VanishingB ? OpKind::VanishingB
                    : pc.kind == PersistenceKind::ParallelLines
                        ? OpKind::Parallel
                        : OpKind::General;
  bool converged = false;
  for (int it = 0; it < opts.max_iter && !converged; ++it) {
    OrbitSequence next = apply_operator(pc, s, cur, op);
    double diff = 0.0;
    for (int t = 0; t < cur.period(); ++t) {
      diff = std::max(diff, std::abs(next.at(t) - cur.at(t)));
    }
    cur = std::move(next);
    converged = diff < opts.tol;
  }
  if (!converged) {
    throw NumericalError("contraction iteration did not converge in " +
                         std::to_string(opts.max_iter) + " iterations");
  }
  for (int t = 0; t < cur.period(); ++t) {
    const double r = residual_L(pc.p, pc.u, cur.at(t + 1), cur.at(t),
                                cur.at(t - 1), cur.at(t - 2));
    if (std::abs(r) >= 10.0 * opts.tol) {
      throw NumericalError("fixed point failed the residual audit at index " +
                           std::to_string(t));
    }
  }
  return cur;
}

void check_region_or_force(const PersistenceCase& pc, const SolveOptions& opts) {
  if (pc.kind == PersistenceKind::GeneralT) {
    if (!opts.force) {
      throw UnsupportedError(
          "no contraction guarantee for general coefficients (pass force to "
          "acknowledge)");
    }
    return;
  }
  if (!opts.force && !region_M_check(pc).in_region) {
    throw UnsupportedError(
        "parameters lie outside the contraction region (pass force to try "
        "anyway)");
  }
}

}  // namespace

OrbitSequence solve_orbit_contraction(const PersistenceCase& pc,
                                      const SymbolSequence& s,
                                      const SolveOptions& opts) {
  check_region_or_force(pc, opts);
  AiOptions ai;
  ai.tol = opts.tol;
  ai.max_iter = opts.max_iter;
  ai.force = opts.force;
  OrbitSequence xi0 = ai_state(pc.p, s, ai);
  if (pc.u.epsilon() == 0.0) return xi0;
  return iterate_case(pc, s, std::move(xi0), opts);
}

OrbitSequence solve_orbit_contraction_from(const PersistenceCase& pc,
                                           const SymbolSequence& s,
                                           const OrbitSequence& initial,
                                           const SolveOptions& opts) {
  check_region_or_force(pc, opts);
  return iterate_case(pc, s, initial, opts);
}

OrbitSequence random_orbit_in_cube(const PersistenceCase& pc,
                                   const SymbolSequence& s,
                                   std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int n = s.period();
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    if (pc.kind == PersistenceKind::ParallelLines) {
      const double half = pc.x_star + pc.M;
      v[t] = uniform(gen, -half, half);
    } else {
      v[t] = s.at(t) + uniform(gen, -pc.M, pc.M);
    }
  }
  return OrbitSequence(std::move(v));
}

}  // namespace aitk
