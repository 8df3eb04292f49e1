#include "aitk/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aitk/ai_limit.hpp"
#include "aitk/words.hpp"

namespace aitk {

namespace {

int wrap(int t, int n) { return ((t % n) + n) % n; }

std::vector<double> pack(const OrbitSequence& xi, double eps) {
  std::vector<double> x(xi.values());
  x.push_back(eps);
  return x;
}

OrbitSequence unpack_orbit(const std::vector<double>& x) {
  return OrbitSequence(std::vector<double>(x.begin(), x.end() - 1));
}

std::vector<double> tangent_vec(const Tangent& t) {
  std::vector<double> v(t.xi_dot);
  v.push_back(t.eps_dot);
  return v;
}

Tangent tangent_from_vec(std::vector<double> v) {
  Tangent t;
  t.eps_dot = v.back();
  v.pop_back();
  t.xi_dot = std::move(v);
  return t;
}

void normalize(std::vector<double>& v) {
  const double nrm = linalg::two_norm(v);
  if (nrm == 0.0 || !std::isfinite(nrm)) {
    throw NumericalError("cannot normalize a zero or non-finite tangent");
  }
  for (double& x : v) x /= nrm;
}

std::vector<double> residual_at(const ResidualSystem& sys,
                                std::span<const double> x) {
  const int n = sys.n;
  const double eps = x[n];
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    g[t] = detail::residual_raw(sys.p, sys.sigma, sys.delta, eps,
                                x[wrap(t + 1, n)], x[wrap(t, n)],
                                x[wrap(t - 1, n)], x[wrap(t - 2, n)]);
  }
  return g;
}

linalg::Matrix jacobian_at(const ResidualSystem& sys,
                           std::span<const double> x) {
  const int n = sys.n;
  const double eps = x[n];
  const double a = sys.p.a(), b = sys.p.b(), c = sys.p.c();
  linalg::Matrix j(n, n + 1);
  for (int t = 0; t < n; ++t) {
    const double xt = x[wrap(t, n)];
    const double xm1 = x[wrap(t - 1, n)];
    const double xp1 = x[wrap(t + 1, n)];
    const double xm2 = x[wrap(t - 2, n)];
    j(t, wrap(t + 1, n)) += -eps;
    j(t, wrap(t, n)) += 2.0 * a * xt + b * xm1;
    j(t, wrap(t - 1, n)) += b * xt + 2.0 * c * xm1 - eps * sys.sigma;
    j(t, wrap(t - 2, n)) += eps * sys.delta;
    j(t, n) = -(xp1 + sys.sigma * xm1 - sys.delta * xm2);
  }
  return j;
}

linalg::Matrix bordered_at(const ResidualSystem& sys, std::span<const double> x,
                           std::span<const double> row) {
  const int n = sys.n;
  const linalg::Matrix j = jacobian_at(sys, x);
  linalg::Matrix b(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k <= n; ++k) b(i, k) = j(i, k);
  }
  for (int k = 0; k <= n; ++k) b(n, k) = row[k];
  return b;
}

Tangent next_tangent(const ResidualSystem& sys, std::span<const double> x,
                     const Tangent& prev) {
  const std::vector<double> row = tangent_vec(prev);
  const linalg::Matrix b = bordered_at(sys, x, row);
  std::vector<double> rhs(static_cast<std::size_t>(sys.n + 1), 0.0);
  rhs.back() = 1.0;
  std::vector<double> t = linalg::solve(linalg::qr_factor(b), rhs);
  normalize(t);
  return tangent_from_vec(std::move(t));
}

struct CorrectorOutcome {
  bool ok = false;
  std::vector<double> x;
  double residual_inf = 0.0;
  int iterations = 0;
  std::string why;
};

// Solves G(xi, eps) = 0 together with the linear constraint row . x = rhs by
// Broyden iteration on QR factors, seeded with the analytic bordered Jacobian
// at the start point. Refactors on schedule, on degraded updates, and once on
// stall.
CorrectorOutcome correct(const ResidualSystem& sys, std::vector<double> x,
                         std::span<const double> row, double rhs,
                         const BranchOptions& opts) {
  const int n = sys.n;
  CorrectorOutcome out;

  auto eval = [&](std::span<const double> xv) {
    std::vector<double> f = residual_at(sys, xv);
    f.push_back(linalg::dot(row, xv) - rhs);
    return f;
  };
  auto g_norm = [&](const std::vector<double>& f) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(f[i]));
    return m;
  };

  linalg::QRFactors qr;
  auto refactor = [&]() -> bool {
    try {
      qr = linalg::qr_factor(bordered_at(sys, x, row));
      return true;
    } catch (const std::exception&) {
      return false;
    }
  };
  if (!refactor()) {
    out.why = "singular bordered system at the predictor";
    return out;
  }

  std::vector<double> f = eval(x);
  double best = g_norm(f);
  int since_best = 0;
  int refactors_left = 3;

  for (int it = 0; it <= opts.max_broyden; ++it) {
    const double gn = g_norm(f);
    const double cn = std::abs(f[n]);
    if (gn < opts.corrector_tol && cn < 1e-9 * (1.0 + std::abs(rhs))) {
      out.ok = true;
      out.x = std::move(x);
      out.residual_inf = gn;
      out.iterations = it;
      return out;
    }
    if (it == opts.max_broyden) break;

    std::vector<double> dx;
    try {
      std::vector<double> rhsv(f);
      for (double& v : rhsv) v = -v;
      dx = linalg::solve(qr, rhsv);
    } catch (const NumericalError&) {
      if (refactors_left-- > 0 && refactor()) continue;
      out.why = "singular corrector system";
      return out;
    }
    for (int i = 0; i <= n; ++i) x[i] += dx[i];
    std::vector<double> f_new = eval(x);
    for (double v : f_new) {
      if (!std::isfinite(v)) {
        out.why = "non-finite residual during correction";
        return out;
      }
    }

    std::vector<double> df(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) df[i] = f_new[i] - f[i];
    try {
      qr = linalg::broyden_update(std::move(qr), dx, df);
    } catch (const DomainError&) {
      out.why = "zero correction step";
      return out;
    }

    const double gnew = g_norm(f_new);
    if (gnew < best * 0.5) {
      best = gnew;
      since_best = 0;
    } else {
      ++since_best;
    }
    const bool scheduled = qr.updates_since_factor() >= opts.refactor_period;
    const bool stalled = since_best >= 10;
    if (qr.degraded() || scheduled || stalled) {
      if (refactors_left-- > 0 && refactor()) {
        since_best = 0;
      } else if (stalled) {
        out.why = "corrector stalled";
        return out;
      }
    }
    f = std::move(f_new);
  }
  out.why = "corrector did not converge in " + std::to_string(opts.max_broyden) +
            " iterations";
  return out;
}

std::array<double, 9> transfer_matrix(const ResidualSystem& sys,
                                      const OrbitSequence& xi, double eps,
                                      int t) {
  const double a = sys.p.a(), b = sys.p.b(), c = sys.p.c();
  const double xt = xi.at(t), xm1 = xi.at(t - 1);
  return {(2.0 * a * xt + b * xm1) / eps,
          (b * xt + 2.0 * c * xm1) / eps - sys.sigma,
          sys.delta,
          1.0, 0.0, 0.0,
          0.0, 1.0, 0.0};
}

std::array<double, 9> mat3_mul(const std::array<double, 9>& a,
                               const std::array<double, 9>& b) {
  std::array<double, 9> c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] +
                     a[3 * i + 2] * b[6 + j];
    }
  }
  return c;
}

struct ScaledMonodromy {
  std::array<double, 9> reduced;
  double log_scale = 0.0;
};

ScaledMonodromy monodromy(const ResidualSystem& sys, const OrbitSequence& xi,
                          double eps) {
  if (eps <= 0.0) throw DomainError("multipliers undefined at eps = 0");
  ScaledMonodromy m{{1, 0, 0, 0, 1, 0, 0, 0, 1}, 0.0};
  for (int t = 0; t < sys.n; ++t) {
    m.reduced = mat3_mul(transfer_matrix(sys, xi, eps, t), m.reduced);
    double mx = 0.0;
    for (double v : m.reduced) mx = std::max(mx, std::abs(v));
    if (mx > 1e100) {
      for (double& v : m.reduced) v /= mx;
      m.log_scale += std::log(mx);
    }
  }
  return m;
}

double det3(const std::array<double, 9>& a) {
  return a[0] * (a[4] * a[8] - a[5] * a[7]) -
         a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

// Real eigenvector of the reduced monodromy for a real reduced eigenvalue,
// from the largest cross product of rows of (M - lambda I).
std::array<double, 3> eigenvector3(const std::array<double, 9>& m,
                                   double lambda) {
  std::array<double, 9> s = m;
  s[0] -= lambda;
  s[4] -= lambda;
  s[8] -= lambda;
  auto cross = [](const double* u, const double* v) {
    return std::array<double, 3>{u[1] * v[2] - u[2] * v[1],
                                 u[2] * v[0] - u[0] * v[2],
                                 u[0] * v[1] - u[1] * v[0]};
  };
  const std::array<std::array<double, 3>, 3> cands = {
      cross(&s[0], &s[3]), cross(&s[0], &s[6]), cross(&s[3], &s[6])};
  std::array<double, 3> best{0, 0, 0};
  double best_norm = 0.0;
  for (const auto& cnd : cands) {
    const double nn =
        std::sqrt(cnd[0] * cnd[0] + cnd[1] * cnd[1] + cnd[2] * cnd[2]);
    if (nn > best_norm) {
      best_norm = nn;
      best = cnd;
    }
  }
  if (best_norm == 0.0) {
    throw NumericalError("degenerate eigenvector");
  }
  for (double& v : best) v /= best_norm;
  return best;
}

std::vector<std::complex<double>> multipliers_or_empty(
    const ResidualSystem& sys, const OrbitSequence& xi, double eps,
    const BranchOptions& opts) {
  if (eps <= 0.0 || sys.n > opts.multiplier_period_limit) return {};
  const auto m = multipliers(sys, xi, eps);
  return {m.begin(), m.end()};
}

}  // namespace

std::vector<double> residual(const ResidualSystem& sys, const OrbitSequence& xi,
                             double eps) {
  if (xi.period() != sys.n) throw DomainError("orbit period mismatch");
  return residual_at(sys, pack(xi, eps));
}

linalg::Matrix jacobian(const ResidualSystem& sys, const OrbitSequence& xi,
                        double eps) {
  if (xi.period() != sys.n) throw DomainError("orbit period mismatch");
  return jacobian_at(sys, pack(xi, eps));
}

Tangent initial_tangent(const ResidualSystem& sys, const OrbitSequence& xi0) {
  const std::vector<double> x = pack(xi0, 0.0);
  const std::vector<double> g = residual_at(sys, x);
  if (linalg::inf_norm(g) > 1e-9) {
    throw DomainError("start point does not satisfy the zero problem");
  }
  const linalg::Matrix j = jacobian_at(sys, x);
  const int n = sys.n;
  linalg::Matrix a(n, n);
  std::vector<double> rhs(static_cast<std::size_t>(n));
  constexpr double eps_dot0 = 0.005;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) a(i, k) = j(i, k);
    rhs[i] = -j(i, n) * eps_dot0;
  }
  std::vector<double> xi_dot;
  try {
    xi_dot = linalg::solve(linalg::qr_factor(a), rhs);
  } catch (const NumericalError&) {
    throw DomainError("degenerate start: singular state Jacobian at eps = 0");
  }
  xi_dot.push_back(eps_dot0);
  normalize(xi_dot);
  return tangent_from_vec(std::move(xi_dot));
}

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::EpsAboveMax:
      return "eps-above-max";
    case TerminationReason::EpsBelowZero:
      return "eps-below-zero";
    case TerminationReason::StepUnderflow:
      return "step-underflow";
    case TerminationReason::MaxPoints:
      return "max-points";
  }
  return "?";
}

const char* to_string(BifurcationEvent::Kind k) {
  return k == BifurcationEvent::Kind::SaddleNode ? "SaddleNode"
                                                 : "PeriodDoubling";
}

double BranchRecord::max_epsilon() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.epsilon);
  return m;
}

namespace {

void trace(BranchRecord& rec, double first_ell) {
  const ResidualSystem& sys = rec.sys;
  const BranchOptions& opts = rec.opts;
  const int n = sys.n;
  double ell = first_ell;

  while (true) {
    if (static_cast<int>(rec.points.size()) >= opts.max_points) {
      rec.termination = TerminationReason::MaxPoints;
      rec.termination_detail = "accepted point budget exhausted";
      return;
    }
    const BranchPoint& last = rec.points.back();
    const std::vector<double> t = tangent_vec(last.tangent);
    std::vector<double> pred = pack(last.xi, last.epsilon);
    for (int i = 0; i <= n; ++i) pred[i] += ell * t[i];

    CorrectorOutcome out =
        correct(sys, pred, t, linalg::dot(t, pred), opts);
    bool ok = out.ok;
    if (ok) {
      double jump = 0.0;
      for (int i = 0; i < n; ++i) {
        jump = std::max(jump, std::abs(out.x[i] - pred[i]));
      }
      if (jump > opts.jump_cap_factor * ell) {
        ok = false;
        out.why = "solution jumped too far from the predictor";
      }
    }
    Tangent tan;
    if (ok) {
      try {
        tan = next_tangent(sys, out.x, last.tangent);
      } catch (const std::exception&) {
        ok = false;
        out.why = "singular tangent system at the accepted point";
      }
    }
    if (!ok) {
      ell *= 0.5;
      if (ell < opts.ell_min) {
        rec.termination = TerminationReason::StepUnderflow;
        rec.termination_detail = "step underflow at eps = " +
                                 std::to_string(last.epsilon) + " (" + out.why +
                                 ")";
        return;
      }
      continue;
    }

    BranchPoint pt;
    pt.epsilon = out.x[n];
    pt.xi = unpack_orbit(out.x);
    pt.tangent = std::move(tan);
    pt.converged = true;
    pt.multipliers = multipliers_or_empty(sys, pt.xi, pt.epsilon, opts);
    rec.points.push_back(std::move(pt));
    ell = opts.ell0;

    const double eps_now = rec.points.back().epsilon;
    if (eps_now > opts.eps_max) {
      rec.termination = TerminationReason::EpsAboveMax;
      rec.termination_detail = "eps exceeded " + std::to_string(opts.eps_max);
      return;
    }
    if (eps_now < 0.0) {
      rec.termination = TerminationReason::EpsBelowZero;
      rec.termination_detail = "eps returned below zero";
      return;
    }
  }
}

}  // namespace

BranchRecord continue_branch(const ResidualSystem& sys,
                             const SymbolSequence& word,
                             const BranchOptions& opts) {
  if (word.period() != sys.n) {
    throw DomainError("word period must match the system period");
  }
  AiOptions ai;
  ai.tol = std::min(1e-12, opts.corrector_tol);
  ai.force = opts.force;
  const OrbitSequence xi0 = ai_state(sys.p, word, ai);

  BranchRecord rec{sys, word, opts, {}, TerminationReason::MaxPoints, "", {}};
  BranchPoint start;
  start.epsilon = 0.0;
  start.xi = xi0;
  start.tangent = initial_tangent(sys, xi0);
  start.converged = true;
  rec.points.push_back(std::move(start));
  trace(rec, opts.ell0);
  return rec;
}

BranchRecord continue_branch_from(const ResidualSystem& sys,
                                  const SymbolSequence& word,
                                  const OrbitSequence& xi0, double eps0,
                                  const Tangent& t0, double first_ell,
                                  const BranchOptions& opts) {
  BranchRecord rec{sys, word, opts, {}, TerminationReason::MaxPoints, "", {}};
  BranchPoint start;
  start.epsilon = eps0;
  start.xi = xi0;
  start.tangent = t0;
  start.converged = true;
  start.multipliers = multipliers_or_empty(sys, xi0, eps0, opts);
  rec.points.push_back(std::move(start));
  trace(rec, first_ell);
  return rec;
}

std::array<std::complex<double>, 3> multipliers(const ResidualSystem& sys,
                                                const OrbitSequence& xi,
                                                double eps) {
  const ScaledMonodromy m = monodromy(sys, xi, eps);
  std::array<std::complex<double>, 3> eigs = linalg::eig3(m.reduced);
  const double scale = std::exp(m.log_scale);
  for (auto& e : eigs) e *= scale;
  return eigs;
}

double monodromy_log_det_gap(const ResidualSystem& sys, const OrbitSequence& xi,
                             double eps) {
  if (sys.delta == 0.0) {
    throw DomainError("determinant identity needs delta != 0");
  }
  const ScaledMonodromy m = monodromy(sys, xi, eps);
  const double d = det3(m.reduced);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(std::log(std::abs(d)) + 3.0 * m.log_scale -
                  sys.n * std::log(std::abs(sys.delta)));
}

namespace {

// A perturbation with dxi_{t+n} = -dxi_t exists exactly when -1 is a
// multiplier, i.e. when the antiperiodic state Jacobian (wrap entries
// negated) is singular. Its entries stay O(1) for any eps, unlike the
// monodromy product whose middle eigenvalue drowns in rounding once the
// spectrum spans ~16 decades, so the sign of this determinant is a reliable
// crossing indicator all the way down to the limit. For n = 1 it reduces to
// eps(1+sigma+delta) + 2(a-c)xi, the closed-form doubling condition.
double pd_indicator(const ResidualSystem& sys, const OrbitSequence& xi,
                    double eps) {
  const int n = sys.n;
  const double a = sys.p.a(), b = sys.p.b(), c = sys.p.c();
  linalg::Matrix j(n, n);
  auto add = [&](int t, int col, double v) {
    int q = 0;
    while (col < 0) {
      col += n;
      --q;
    }
    while (col >= n) {
      col -= n;
      ++q;
    }
    j(t, col) += (q % 2 == 0) ? v : -v;
  };
  for (int t = 0; t < n; ++t) {
    const double xt = xi.at(t);
    const double xm1 = xi.at(t - 1);
    add(t, t + 1, -eps);
    add(t, t, 2.0 * a * xt + b * xm1);
    add(t, t - 1, b * xt + 2.0 * c * xm1 - eps * sys.sigma);
    add(t, t - 2, eps * sys.delta);
  }
  return linalg::determinant(std::move(j));
}

// Real multiplier nearest -1 (reported at refined period doublings).
std::optional<double> nearest_real_multiplier(const BranchPoint& pt) {
  std::optional<double> best;
  for (const auto& m : pt.multipliers) {
    if (std::abs(m.imag()) > 1e-8 * (1.0 + std::abs(m))) continue;
    if (!best || std::abs(m.real() + 1.0) < std::abs(*best + 1.0)) {
      best = m.real();
    }
  }
  return best;
}

std::optional<SymbolSequence> safe_extract(const StructuralParams& p,
                                           const OrbitSequence& xi) {
  try {
    return extract_symbols(p, xi);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

double extraction_margin(const StructuralParams& p, const OrbitSequence& xi) {
  double m = std::numeric_limits<double>::infinity();
  for (int t = 0; t < xi.period(); ++t) {
    m = std::min(m,
                 std::abs(2.0 * p.a() * xi.at(t) + p.b() * xi.at(t - 1)));
  }
  return m;
}

// Word of the sheet on one side of a fold. The branch's word flips at a
// radicand zero that sits close to but not exactly at the fold, so take the
// extraction furthest from the event within a modest walk.
std::optional<SymbolSequence> sheet_word(const BranchRecord& rec, int from,
                                         int step) {
  const int n_pts = static_cast<int>(rec.points.size());
  std::optional<SymbolSequence> last;
  for (int k = from, walked = 0; k >= 0 && k < n_pts && walked < 40;
       k += step, ++walked) {
    const OrbitSequence& xi = rec.points[static_cast<std::size_t>(k)].xi;
    if (extraction_margin(rec.sys.p, xi) >= 0.02) {
      if (auto w = safe_extract(rec.sys.p, xi)) last = std::move(w);
    }
  }
  if (!last && from >= 0 && from < n_pts) {
    last = safe_extract(rec.sys.p, rec.points[static_cast<std::size_t>(from)].xi);
  }
  return last;
}

struct RefinePoint {
  std::vector<double> x;
  Tangent tangent;
};

// Bisection along the predictor ray from point k, re-correcting at each
// midpoint, until the bracket is 1e-6 tight. `flip` reports the sign of the
// monitored quantity at a corrected point.
template <typename FlipFn>
std::optional<RefinePoint> refine_between(const BranchRecord& rec, int k,
                                          FlipFn flip, bool sign_at_lo) {
  const ResidualSystem& sys = rec.sys;
  const BranchOptions& opts = rec.opts;
  const BranchPoint& a = rec.points[static_cast<std::size_t>(k)];
  const BranchPoint& b = rec.points[static_cast<std::size_t>(k) + 1];
  const std::vector<double> xa = pack(a.xi, a.epsilon);
  const std::vector<double> xb = pack(b.xi, b.epsilon);
  const std::vector<double> ta = tangent_vec(a.tangent);

  std::vector<double> diff(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) diff[i] = xb[i] - xa[i];
  const double hmax = linalg::two_norm(diff);

  double lo = 0.0, hi = hmax;
  std::optional<RefinePoint> best;
  for (int it = 0; it < 80 && hi - lo > 1e-6 * std::max(1.0, hmax); ++it) {
    const double h = 0.5 * (lo + hi);
    std::vector<double> pred = xa;
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] += h * ta[i];
    CorrectorOutcome out = correct(sys, pred, ta, linalg::dot(ta, pred), opts);
    if (!out.ok) return best;  // keep the tightest point found so far
    Tangent tan;
    try {
      tan = next_tangent(sys, out.x, a.tangent);
    } catch (const std::exception&) {
      return best;
    }
    RefinePoint rp{std::move(out.x), std::move(tan)};
    const bool s = flip(rp);
    if (s == sign_at_lo) {
      lo = h;
    } else {
      hi = h;
    }
    best = std::move(rp);
  }
  return best;
}

}  // namespace

std::vector<BifurcationEvent> detect_bifurcations(const BranchRecord& branch) {
  std::vector<BifurcationEvent> events;
  const auto& pts = branch.points;
  if (pts.size() < 2) {
    throw DomainError("bifurcation detection needs at least two points");
  }
  const ResidualSystem& sys = branch.sys;

  for (int k = 0; k + 1 < static_cast<int>(pts.size()); ++k) {
    const BranchPoint& a = pts[static_cast<std::size_t>(k)];
    const BranchPoint& b = pts[static_cast<std::size_t>(k) + 1];
    if (!a.converged || !b.converged) continue;

    // Folds: the tangent eps-component changes sign.
    if (a.tangent.eps_dot * b.tangent.eps_dot < 0.0) {
      const bool sign_lo = a.tangent.eps_dot > 0.0;
      auto flipped = refine_between(
          branch, k,
          [&](const RefinePoint& rp) { return rp.tangent.eps_dot > 0.0; },
          sign_lo);
      BifurcationEvent ev;
      ev.kind = BifurcationEvent::Kind::SaddleNode;
      ev.bracket_index = k;
      if (flipped) {
        ev.refined = true;
        ev.epsilon = flipped->x[static_cast<std::size_t>(sys.n)];
        ev.orbit = unpack_orbit(flipped->x);
      } else {
        ev.refined = false;
        ev.epsilon = std::max(a.epsilon, b.epsilon);
        ev.orbit = b.xi;
      }
      ev.approach_word = sheet_word(branch, k, -1);
      ev.partner_word = sheet_word(branch, k + 1, +1);
      // A fold whose orbit is the doubled half-period orbit is the apex of a
      // doubled branch, i.e. a period-doubling seen from the child side.
      {
        double scale = 1.0;
        for (int t = 0; t < ev.orbit.period(); ++t) {
          scale = std::max(scale, std::abs(ev.orbit.at(t)));
        }
        const int q = words::orbit_sub_period(ev.orbit, 1e-3 * scale);
        ev.subharmonic_apex = q < ev.orbit.period();
      }
      {
        const linalg::Matrix j = jacobian(sys, ev.orbit, ev.epsilon);
        linalg::Matrix jxi(sys.n, sys.n);
        for (int i = 0; i < sys.n; ++i) {
          for (int c2 = 0; c2 < sys.n; ++c2) jxi(i, c2) = j(i, c2);
        }
        ev.sigma_min = linalg::smallest_singular_value_estimate(jxi);
      }
      events.push_back(std::move(ev));
    }

    // Period doublings: a real multiplier crosses -1. Skipped when
    // multipliers are not tracked (long orbits) or at eps <= 0.
    const bool track = !a.multipliers.empty() && !b.multipliers.empty();
    if (track) {
      const double ga = pd_indicator(sys, a.xi, a.epsilon);
      const double gb = pd_indicator(sys, b.xi, b.epsilon);
      if (ga * gb >= 0.0) continue;
      const bool sign_lo = ga > 0.0;
      auto flipped = refine_between(
          branch, k,
          [&](const RefinePoint& rp) {
            return pd_indicator(sys, unpack_orbit(rp.x),
                                rp.x[static_cast<std::size_t>(sys.n)]) > 0.0;
          },
          sign_lo);
      BifurcationEvent ev;
      ev.kind = BifurcationEvent::Kind::PeriodDoubling;
      ev.bracket_index = k;
      if (flipped) {
        ev.refined = true;
        ev.epsilon = flipped->x[static_cast<std::size_t>(sys.n)];
        ev.orbit = unpack_orbit(flipped->x);
        BranchPoint tmp;
        tmp.multipliers = multipliers_or_empty(
            sys, ev.orbit, ev.epsilon, branch.opts);
        const auto lam = nearest_real_multiplier(tmp);
        ev.multiplier = lam ? *lam : 0.0;
      } else {
        ev.refined = false;
        ev.epsilon = 0.5 * (a.epsilon + b.epsilon);
        ev.orbit = b.xi;
      }
      ev.approach_word = safe_extract(sys.p, ev.orbit);
      events.push_back(std::move(ev));
    }
  }

  std::sort(events.begin(), events.end(),
            [](const BifurcationEvent& x, const BifurcationEvent& y) {
              return x.epsilon < y.epsilon;
            });
  return events;
}

double pd_fixed_point_formula(const StructuralParams& p, double sigma,
                              double delta) {
  const double inner = p.a() * (3.0 + 3.0 * sigma - delta) +
                       p.b() * (1.0 + sigma + delta) +
                       p.c() * (-1.0 - sigma + 3.0 * delta);
  const double rad = (1.0 + sigma + delta) * inner;
  if (rad <= 0.0) {
    throw DomainError("no period-doubling in range: nonpositive radicand");
  }
  return 2.0 * (p.a() - p.c()) / std::sqrt(rad);
}

double fixed_point_closed_form(double sigma, double delta, double eps,
                               int sign) {
  const double q = (1.0 + sigma - delta) * eps;
  const double r = std::sqrt(4.0 + q * q);
  return 0.5 * (q + (sign >= 0 ? r : -r));
}

PairingReport saddle_node_pairing(const std::vector<SnObservation>& obs) {
  PairingReport rep;
  std::vector<bool> used(obs.size(), false);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < obs.size(); ++j) {
      if (used[j]) continue;
      if (obs[i].orbit.period() != obs[j].orbit.period()) continue;
      const bool labels = obs[i].label_known && obs[j].label_known;
      if (labels &&
          words::same_necklace(obs[i].source_word, obs[j].source_word)) {
        continue;  // self-pairing excluded
      }
      if (std::abs(obs[i].epsilon - obs[j].epsilon) > 1e-4) continue;
      if (words::cyclic_orbit_distance(obs[i].orbit, obs[j].orbit) > 1e-4) {
        continue;
      }
      used[i] = used[j] = true;
      rep.pairs.push_back(
          {i, j, 0.5 * (obs[i].epsilon + obs[j].epsilon),
           labels ? words::cyclic_hamming(obs[i].source_word, obs[j].source_word)
                  : -1});
      break;
    }
    if (!used[i]) rep.unpaired.push_back(i);
  }
  return rep;
}

std::optional<SymbolSequence> child_word_for_pd(const ResidualSystem& sys,
                                                const BifurcationEvent& pd,
                                                const BranchOptions& opts) {
  if (pd.kind != BifurcationEvent::Kind::PeriodDoubling) {
    throw DomainError("child words only exist for period doublings");
  }
  const int n = sys.n;
  const int n2 = 2 * n;
  ResidualSystem sys2{sys.p, sys.sigma, sys.delta, n2};

  // Direction of the -1 eigenvector, marched over two periods.
  const ScaledMonodromy m = monodromy(sys, pd.orbit, pd.epsilon);
  const auto eigs = linalg::eig3(m.reduced);
  const double target = -std::exp(-m.log_scale);
  int best_i = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double d = std::abs(eigs[static_cast<std::size_t>(i)] -
                              std::complex<double>(target, 0.0));
    if (d < best_d) {
      best_d = d;
      best_i = i;
    }
  }
  std::array<double, 3> v;
  try {
    v = eigenvector3(m.reduced, eigs[static_cast<std::size_t>(best_i)].real());
  } catch (const NumericalError&) {
    return std::nullopt;
  }

  std::vector<double> dirv(static_cast<std::size_t>(n2 + 1), 0.0);
  std::array<double, 3> w = v;
  for (int t = 0; t < n2; ++t) {
    dirv[t] = w[0];
    w = [&] {
      const auto at = transfer_matrix(sys, pd.orbit, pd.epsilon, t % n);
      return std::array<double, 3>{
          at[0] * w[0] + at[1] * w[1] + at[2] * w[2], w[0], w[1]};
    }();
  }
  normalize(dirv);

  std::vector<double> doubled_vals;
  doubled_vals.reserve(static_cast<std::size_t>(n2));
  for (int t = 0; t < n2; ++t) doubled_vals.push_back(pd.orbit.at(t));
  const OrbitSequence doubled(doubled_vals);

  BranchOptions child_opts = opts;
  child_opts.eps_max = pd.epsilon * 1.05 + 0.05;
  child_opts.multiplier_period_limit = 0;  // labels only; skip multipliers
  SymbolSequence placeholder = SymbolSequence(std::vector<int>(
      static_cast<std::size_t>(n2), 1));

  for (int arm = 0; arm < 2; ++arm) {
    Tangent t0 = tangent_from_vec(dirv);
    if (arm == 1) {
      for (double& x : t0.xi_dot) x = -x;
      t0.eps_dot = -t0.eps_dot;
    }
    std::optional<BranchRecord> rec;
    try {
      rec = continue_branch_from(sys2, placeholder, doubled, pd.epsilon, t0,
                                 1e-4, child_opts);
    } catch (const std::exception&) {
      continue;
    }
    // Read the word near eps = 0.
    const BranchPoint* best_pt = nullptr;
    for (const auto& p2 : rec->points) {
      if (p2.epsilon >= 0.0 &&
          (best_pt == nullptr || p2.epsilon < best_pt->epsilon)) {
        best_pt = &p2;
      }
    }
    if (best_pt == nullptr || best_pt->epsilon > 0.2 * pd.epsilon) continue;
    const auto wrd = safe_extract(sys.p, best_pt->xi);
    if (wrd) return wrd;
  }
  return std::nullopt;
}

}  // namespace aitk
