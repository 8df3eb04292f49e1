#include "aitk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace aitk::linalg {

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0) throw DomainError("negative matrix dimension");
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw DomainError("entry count does not match dimensions");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw DomainError("non-finite matrix entry");
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double* ri = row(i);
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += ri[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> Matrix::apply_transposed(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(cols_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double* ri = row(i);
    const double xi = x[i];
    for (int j = 0; j < cols_; ++j) y[j] += ri[j] * xi;
  }
  return y;
}

double Matrix::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < rows_; ++i) {
    const double* ri = row(i);
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += std::abs(ri[j]);
    best = std::max(best, s);
  }
  return best;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double two_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

QRFactors qr_factor(const Matrix& a) {
  const int m = a.rows();
  const int n = a.cols();
  if (m < n) throw DomainError("qr_factor requires rows >= cols");
  for (double v : a.data()) {
    if (!std::isfinite(v)) throw DomainError("non-finite matrix entry");
  }

  Matrix r = a;
  std::vector<std::vector<double>> reflectors;
  std::vector<double> betas;
  reflectors.reserve(n);
  betas.reserve(n);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);

  for (int k = 0; k < std::min(n, m - 1); ++k) {
    // Householder vector for column k.
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm += r(i, k) * r(i, k);
    norm = std::sqrt(norm);
    std::vector<double> v(static_cast<std::size_t>(m - k), 0.0);
    double beta = 0.0;
    if (norm > 0.0) {
      const double x0 = r(k, k);
      const double alpha = (x0 >= 0.0) ? -norm : norm;
      v[0] = x0 - alpha;
      for (int i = k + 1; i < m; ++i) v[i - k] = r(i, k);
      double vtv = 0.0;
      for (double t : v) vtv += t * t;
      if (vtv > 0.0) {
        beta = 2.0 / vtv;
        // w = v^T R over columns k..n-1, streamed by rows.
        std::fill(w.begin() + k, w.begin() + n, 0.0);
        for (int i = k; i < m; ++i) {
          const double vi = v[i - k];
          const double* ri = r.row(i);
          for (int j = k; j < n; ++j) w[j] += vi * ri[j];
        }
        for (int i = k; i < m; ++i) {
          const double bvi = beta * v[i - k];
          double* ri = r.row(i);
          for (int j = k; j < n; ++j) ri[j] -= bvi * w[j];
        }
      }
    }
    reflectors.push_back(std::move(v));
    betas.push_back(beta);
  }

  // Accumulate Q backwards; at the time H_k is applied the work matrix
  // differs from the identity only in rows/columns >= k.
  Matrix q = Matrix::identity(m);
  std::vector<double> wq(static_cast<std::size_t>(m), 0.0);
  for (int k = static_cast<int>(reflectors.size()) - 1; k >= 0; --k) {
    const auto& v = reflectors[static_cast<std::size_t>(k)];
    const double beta = betas[static_cast<std::size_t>(k)];
    if (beta == 0.0) continue;
    std::fill(wq.begin() + k, wq.end(), 0.0);
    for (int i = k; i < m; ++i) {
      const double vi = v[i - k];
      const double* qi = q.row(i);
      for (int j = k; j < m; ++j) wq[j] += vi * qi[j];
    }
    for (int i = k; i < m; ++i) {
      const double bvi = beta * v[i - k];
      double* qi = q.row(i);
      for (int j = k; j < m; ++j) qi[j] -= bvi * wq[j];
    }
  }

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < std::min(i, n); ++j) r(i, j) = 0.0;
  }

  QRFactors f;
  f.q_ = std::move(q);
  f.r_ = std::move(r);
  return f;
}

std::vector<double> QRFactors::apply(std::span<const double> x) const {
  std::vector<double> rx(static_cast<std::size_t>(q_.rows()), 0.0);
  for (int i = 0; i < r_.rows(); ++i) {
    const double* ri = r_.row(i);
    double acc = 0.0;
    for (int j = i; j < r_.cols(); ++j) acc += ri[j] * x[j];
    rx[i] = acc;
  }
  return q_.apply(rx);
}

double QRFactors::max_abs_r_diag() const {
  double m = 0.0;
  for (int i = 0; i < std::min(r_.rows(), r_.cols()); ++i) {
    m = std::max(m, std::abs(r_(i, i)));
  }
  return m;
}

double QRFactors::min_abs_r_diag() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < std::min(r_.rows(), r_.cols()); ++i) {
    m = std::min(m, std::abs(r_(i, i)));
  }
  return m;
}

std::vector<double> solve(const QRFactors& f, std::span<const double> b) {
  const int n = f.cols();
  if (f.rows() != n) throw DomainError("solve requires a square system");
  if (static_cast<int>(b.size()) != n) throw DomainError("rhs size mismatch");

  const double tol = 1e-12 * f.max_abs_r_diag();
  std::vector<double> y = f.q().apply_transposed(b);
  const Matrix& r = f.r();
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    const double* ri = r.row(i);
    double acc = y[i];
    for (int j = i + 1; j < n; ++j) acc -= ri[j] * x[j];
    const double d = ri[i];
    if (std::abs(d) <= tol) {
      throw NumericalError("singular system in triangular solve");
    }
    x[i] = acc / d;
  }
  return x;
}

namespace {

struct Rotation {
  double c, s;
};

// Rotation taking (f, g) to (r, 0).
Rotation make_rotation(double f, double g) {
  if (g == 0.0) return {1.0, 0.0};
  const double r = std::hypot(f, g);
  return {f / r, g / r};
}

}  // namespace

void QRFactors::rank_one_update(std::span<const double> u,
                                std::span<const double> v) {
  const int n = q_.rows();
  if (r_.cols() != n) throw DomainError("rank-one update needs a square factor");

  std::vector<double> w = q_.apply_transposed(u);

  // First sweep: rotate w onto e_0 from the bottom; R becomes Hessenberg.
  for (int k = n - 1; k >= 1; --k) {
    if (w[k] == 0.0) continue;
    const Rotation g = make_rotation(w[k - 1], w[k]);
    w[k - 1] = g.c * w[k - 1] + g.s * w[k];
    w[k] = 0.0;
    double* ra = r_.row(k - 1);
    double* rb = r_.row(k);
    for (int j = std::max(0, k - 1); j < n; ++j) {
      const double x = ra[j], y = rb[j];
      ra[j] = g.c * x + g.s * y;
      rb[j] = -g.s * x + g.c * y;
    }
    for (int i = 0; i < n; ++i) {
      double* qi = q_.row(i);
      const double x = qi[k - 1], y = qi[k];
      qi[k - 1] = g.c * x + g.s * y;
      qi[k] = -g.s * x + g.c * y;
    }
  }

  // Rank-one term now lives in the first row.
  {
    double* r0 = r_.row(0);
    const double gamma = w[0];
    for (int j = 0; j < n; ++j) r0[j] += gamma * v[j];
  }

  // Second sweep: restore the triangular form.
  for (int k = 1; k < n; ++k) {
    const double sub = r_(k, k - 1);
    if (sub == 0.0) continue;
    const Rotation g = make_rotation(r_(k - 1, k - 1), sub);
    double* ra = r_.row(k - 1);
    double* rb = r_.row(k);
    for (int j = k - 1; j < n; ++j) {
      const double x = ra[j], y = rb[j];
      ra[j] = g.c * x + g.s * y;
      rb[j] = -g.s * x + g.c * y;
    }
    rb[k - 1] = 0.0;
    for (int i = 0; i < n; ++i) {
      double* qi = q_.row(i);
      const double x = qi[k - 1], y = qi[k];
      qi[k - 1] = g.c * x + g.s * y;
      qi[k] = -g.s * x + g.c * y;
    }
  }

  ++updates_;
}

QRFactors broyden_update(QRFactors f, std::span<const double> dx,
                         std::span<const double> df) {
  const int n = f.rows();
  if (static_cast<int>(dx.size()) != n || static_cast<int>(df.size()) != n) {
    throw DomainError("broyden_update size mismatch");
  }
  const double dd = dot(dx, dx);
  if (dd == 0.0) throw DomainError("broyden_update with zero step");

  std::vector<double> bdx = f.apply(dx);
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) u[i] = (df[i] - bdx[i]) / dd;

  f.rank_one_update(u, dx);

  // Secant check as a cheap health proxy for the updated factors.
  std::vector<double> check = f.apply(dx);
  double err = 0.0, scale = 1.0;
  for (int i = 0; i < n; ++i) {
    err = std::max(err, std::abs(check[i] - df[i]));
    scale = std::max(scale, std::abs(df[i]));
  }
  if (err > 1e-8 * scale) f.degraded_ = true;
  return f;
}

std::array<std::complex<double>, 3> eig3(const std::array<double, 9>& a) {
  for (double v : a) {
    if (!std::isfinite(v)) throw DomainError("non-finite matrix entry");
  }
  const double tr = a[0] + a[4] + a[8];
  const double m2 = (a[0] * a[4] - a[1] * a[3]) + (a[0] * a[8] - a[2] * a[6]) +
                    (a[4] * a[8] - a[5] * a[7]);
  const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) -
                     a[1] * (a[3] * a[8] - a[5] * a[6]) +
                     a[2] * (a[3] * a[7] - a[4] * a[6]);

  // Characteristic polynomial x^3 - tr x^2 + m2 x - det, depressed via
  // x = y + tr/3.
  const double b = -tr, c = m2, d = -det;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double shift = -b / 3.0;

  std::array<std::complex<double>, 3> roots;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double big = std::cbrt(-0.5 * q + sq);
    const double small = std::cbrt(-0.5 * q - sq);
    const double y1 = big + small;
    roots[0] = {y1 + shift, 0.0};
    const double re = -0.5 * y1 + shift;
    const double im = 0.5 * std::sqrt(3.0) * (big - small);
    roots[1] = {re, im};
    roots[2] = {re, -im};
  } else if (p == 0.0) {
    roots[0] = roots[1] = roots[2] = {shift, 0.0};
  } else {
    const double rho = std::sqrt(-p * p * p / 27.0);
    double arg = -0.5 * q / rho;
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg);
    const double mag = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k) {
      roots[k] = {mag * std::cos((phi + 2.0 * M_PI * k) / 3.0) + shift, 0.0};
    }
  }

  // One or two complex Newton steps on the characteristic polynomial.
  auto polish = [&](std::complex<double> z) {
    for (int it = 0; it < 2; ++it) {
      const std::complex<double> f = ((z - tr) * z + m2) * z - det;
      const std::complex<double> fp = (3.0 * z - 2.0 * tr) * z + m2;
      const double scale = std::abs(tr) + std::abs(m2) + std::abs(det) + 1.0;
      if (std::abs(fp) < 1e-12 * scale) break;
      z -= f / fp;
    }
    return z;
  };
  for (auto& z : roots) {
    if (z.imag() == 0.0) {
      z = {polish(z).real(), 0.0};
    }
  }
  if (roots[1].imag() != 0.0) {
    roots[1] = polish(roots[1]);
    roots[2] = std::conj(roots[1]);
  }
  return roots;
}

double determinant(Matrix a) {
  if (a.rows() != a.cols()) throw DomainError("determinant needs a square matrix");
  const int n = a.rows();
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    }
    if (a(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (int j = k; j < n; ++j) std::swap(a(p, j), a(k, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = a(i, k) / a(k, k);
      if (m == 0.0) continue;
      double* ri = a.row(i);
      const double* rk = a.row(k);
      for (int j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
    }
  }
  return det;
}

double smallest_singular_value_estimate(const Matrix& a, std::uint64_t seed) {
  if (a.rows() != a.cols()) {
    throw DomainError("singular value estimate needs a square matrix");
  }
  const int n = a.rows();
  QRFactors f;
  try {
    f = qr_factor(a);
  } catch (const NumericalError&) {
    return 0.0;
  }
  std::mt19937_64 gen(seed);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = uniform(gen, -1.0, 1.0);
  double nv = two_norm(v);
  for (auto& x : v) x /= nv;

  double sigma = 0.0;
  for (int it = 0; it < 4; ++it) {
    std::vector<double> w;
    try {
      w = solve(f, v);
    } catch (const NumericalError&) {
      return 0.0;
    }
    const double nw = two_norm(w);
    if (!std::isfinite(nw) || nw == 0.0) return 0.0;
    sigma = 1.0 / nw;
    for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  return sigma;
}

}  // namespace aitk::linalg
