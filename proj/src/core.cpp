#include "aitk/core.hpp"

#include <cmath>
#include <limits>

namespace aitk {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(what) + " is not finite");
  }
}

}  // namespace

StructuralParams::StructuralParams(double a, double b, double c)
    : a_(a), b_(b), c_(c) {
  require_finite(a, "a");
  require_finite(b, "b");
  require_finite(c, "c");
  const double sum = a + b + c;
  if (std::abs(sum - 1.0) > kNormalizationTol) {
    throw DomainError("coefficients not normalized: a+b+c = " +
                      std::to_string(sum));
  }
  require_finite(discriminant(), "discriminant");
}

StructuralParams StructuralParams::from_slope(double m) {
  require_finite(m, "slope");
  if (m == 1.0) {
    throw DomainError("degenerate slope m = 1");
  }
  const double u = 1.0 - m;
  const double a = 1.0 / (u * u);
  const double b = -2.0 * m * a;
  // c = m^2/(1-m)^2 algebraically; closing the sum keeps the normalization
  // exact, which matters because a grows like (1-m)^-2.
  const double c = 1.0 - a - b;
  return StructuralParams(a, b, c);
}

double StructuralParams::slope() const {
  if (a_ == 0.0) {
    throw DomainError("slope undefined for a = 0");
  }
  return -b_ / (2.0 * a_);
}

ConicClass classify(const StructuralParams& p) {
  const double d = p.discriminant();
  if (std::abs(d) <= kDiscriminantTol) return ConicClass::ParallelLines;
  return d < 0.0 ? ConicClass::Ellipse : ConicClass::Hyperbola;
}

const char* to_string(ConicClass c) {
  switch (c) {
    case ConicClass::ParallelLines:
      return "ParallelLines";
    case ConicClass::Ellipse:
      return "Ellipse";
    case ConicClass::Hyperbola:
      return "Hyperbola";
  }
  return "?";
}

UnfoldingParams::UnfoldingParams(double sigma, double delta, double epsilon)
    : sigma_(sigma), delta_(delta), epsilon_(epsilon) {
  require_finite(sigma, "sigma");
  require_finite(delta, "delta");
  require_finite(epsilon, "epsilon");
  if (epsilon < 0.0) {
    throw DomainError("epsilon must be nonnegative");
  }
}

double UnfoldingParams::alpha() const {
  if (epsilon_ == 0.0) {
    throw DomainError("alpha undefined at epsilon = 0");
  }
  return -1.0 / (epsilon_ * epsilon_);
}

double UnfoldingParams::gamma() const {
  return std::abs(epsilon_) * (1.0 + std::abs(sigma_) + std::abs(delta_));
}

double quadratic_form(const StructuralParams& p, double x, double y) {
  return p.a() * x * x + p.b() * (x * y) + p.c() * (y * y);
}

std::pair<double, double> asymptote_slopes(const StructuralParams& p) {
  if (p.a() == 0.0) {
    throw DomainError("asymptote slopes undefined for a = 0");
  }
  double d = p.discriminant();
  if (d < -kDiscriminantTol) {
    throw DomainError("no real asymptotes: discriminant < 0");
  }
  if (d < 0.0) d = 0.0;
  const double r = std::sqrt(d);
  return {(-p.b() + r) / (2.0 * p.a()), (-p.b() - r) / (2.0 * p.a())};
}

State3 map_step(const StructuralParams& p, const UnfoldingParams& u,
                double alpha, const State3& s) {
  const double q = quadratic_form(p, s.x, s.y);
  const double g = alpha - u.sigma() * s.y + q;
  return {u.delta() * s.z + g, s.x, s.y};
}

namespace detail {

double residual_raw(const StructuralParams& p, double sigma, double delta,
                    double eps, double xi_next, double xi_t, double xi_prev,
                    double xi_prev2) {
  return quadratic_form(p, xi_t, xi_prev) - 1.0 -
         eps * (xi_next + sigma * xi_prev - delta * xi_prev2);
}

}  // namespace detail

double residual_L(const StructuralParams& p, const UnfoldingParams& u,
                  double xi_next, double xi_t, double xi_prev,
                  double xi_prev2) {
  return detail::residual_raw(p, u.sigma(), u.delta(), u.epsilon(), xi_next,
                              xi_t, xi_prev, xi_prev2);
}

SymbolSequence::SymbolSequence(std::vector<int> word) : word_(std::move(word)) {
  if (word_.empty()) {
    throw DomainError("symbol sequence needs period >= 1");
  }
  for (int s : word_) {
    if (s != -1 && s != 1) {
      throw DomainError("symbols must be -1 or +1");
    }
  }
}

SymbolSequence SymbolSequence::parse(std::string_view text) {
  std::vector<int> w;
  w.reserve(text.size());
  for (char ch : text) {
    if (ch == '-') {
      w.push_back(-1);
    } else if (ch == '+') {
      w.push_back(1);
    } else {
      throw DomainError(std::string("invalid symbol character '") + ch + "'");
    }
  }
  return SymbolSequence(std::move(w));
}

SymbolSequence SymbolSequence::random(int period, std::uint64_t seed) {
  if (period < 1) {
    throw DomainError("period must be >= 1");
  }
  std::mt19937_64 gen(seed);
  std::vector<int> w(static_cast<std::size_t>(period));
  for (auto& s : w) {
    s = (gen() >> 63) ? 1 : -1;
  }
  return SymbolSequence(std::move(w));
}

std::string SymbolSequence::to_string() const {
  std::string out;
  out.reserve(word_.size());
  for (int s : word_) out.push_back(s > 0 ? '+' : '-');
  return out;
}

SymbolSequence SymbolSequence::negated() const {
  std::vector<int> w(word_);
  for (auto& s : w) s = -s;
  return SymbolSequence(std::move(w));
}

OrbitSequence::OrbitSequence(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw DomainError("orbit sequence needs period >= 1");
  }
  for (double v : values_) require_finite(v, "orbit value");
}

OrbitSequence scale_orbit(const OrbitSequence& x, double epsilon) {
  std::vector<double> out(x.values());
  for (auto& v : out) v *= epsilon;
  return OrbitSequence(std::move(out));
}

OrbitSequence unscale_orbit(const OrbitSequence& xi, double epsilon) {
  if (epsilon == 0.0) {
    throw DomainError("cannot unscale at epsilon = 0");
  }
  std::vector<double> out(xi.values());
  for (auto& v : out) v /= epsilon;
  return OrbitSequence(std::move(out));
}

double henon_embed_check(const StructuralParams& p, double sigma, double delta,
                         double alpha, int n_steps, const State3& seed) {
  if (p.a() != 1.0 || p.b() != 0.0 || p.c() != 0.0 || delta != 0.0) {
    throw DomainError(
        "embedding requires (a,b,c) = (1,0,0) and delta = 0");
  }
  const UnfoldingParams u(sigma, delta, 1.0);
  const double k = -alpha;
  const double dh = sigma;

  State3 s = seed;
  double xi = seed.x;
  double eta = -sigma * seed.y;

  double worst = 0.0;
  for (int t = 0; t < n_steps; ++t) {
    s = map_step(p, u, alpha, s);
    const double xi_new = (eta - k) + xi * xi;
    const double eta_new = -(dh * xi);
    xi = xi_new;
    eta = eta_new;

    const double dx = std::abs(s.x - xi);
    const double dy = std::abs(-sigma * s.y - eta);
    if (dx > worst) worst = dx;
    if (dy > worst) worst = dy;
    if (!std::isfinite(s.x) || !std::isfinite(xi)) {
      throw NumericalError("orbit escaped during embedding check");
    }
  }
  return worst;
}

double henon_no_bifurcation_bound(double sigma) {
  return 2.0 * std::sqrt(1.0 - 2.0 / std::sqrt(5.0)) /
         (1.0 + 2.0 * std::abs(sigma));
}

}  // namespace aitk
