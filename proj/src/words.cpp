#include "aitk/words.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aitk::words {

SymbolSequence rotated(const SymbolSequence& s, int k) {
  const int n = s.period();
  std::vector<int> w(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) w[t] = s.at(t + k);
  return SymbolSequence(std::move(w));
}

SymbolSequence canonical(const SymbolSequence& s) {
  const int n = s.period();
  SymbolSequence best = s;
  for (int k = 1; k < n; ++k) {
    SymbolSequence r = rotated(s, k);
    if (r.word() < best.word()) best = r;
  }
  return best;
}

bool is_aperiodic(const SymbolSequence& s) {
  return fundamental_period(s) == s.period();
}

int fundamental_period(const SymbolSequence& s) {
  const int n = s.period();
  for (int q = 1; q < n; ++q) {
    if (n % q != 0) continue;
    bool ok = true;
    for (int t = 0; t < n && ok; ++t) ok = s.at(t) == s.at(t + q);
    if (ok) return q;
  }
  return n;
}

SymbolSequence doubled(const SymbolSequence& s) {
  std::vector<int> w(s.word());
  w.insert(w.end(), s.word().begin(), s.word().end());
  return SymbolSequence(std::move(w));
}

int cyclic_hamming(const SymbolSequence& a, const SymbolSequence& b) {
  if (a.period() != b.period()) {
    throw DomainError("cyclic distance needs equal periods");
  }
  const int n = a.period();
  int best = n + 1;
  for (int k = 0; k < n; ++k) {
    int d = 0;
    for (int t = 0; t < n; ++t) {
      if (a.at(t) != b.at(t + k)) ++d;
    }
    best = std::min(best, d);
  }
  return best;
}

bool same_necklace(const SymbolSequence& a, const SymbolSequence& b) {
  return a.period() == b.period() && cyclic_hamming(a, b) == 0;
}

std::vector<SymbolSequence> necklaces(int period) {
  if (period < 1) throw DomainError("period must be >= 1");
  std::vector<SymbolSequence> out;
  // Enumerate all words, keep canonical aperiodic representatives.
  const std::uint64_t total = 1ull << period;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    std::vector<int> w(static_cast<std::size_t>(period));
    for (int t = 0; t < period; ++t) {
      w[t] = (bits >> t) & 1 ? 1 : -1;
    }
    SymbolSequence s(std::move(w));
    if (!is_aperiodic(s)) continue;
    if (canonical(s).word() != s.word()) continue;
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const SymbolSequence& x, const SymbolSequence& y) {
              return x.word() < y.word();
            });
  return out;
}

std::vector<SymbolSequence> necklaces_up_to(int max_period) {
  std::vector<SymbolSequence> out;
  for (int p = 1; p <= max_period; ++p) {
    auto n = necklaces(p);
    out.insert(out.end(), n.begin(), n.end());
  }
  return out;
}

double cyclic_orbit_distance(const OrbitSequence& a, const OrbitSequence& b) {
  if (a.period() != b.period()) {
    throw DomainError("cyclic distance needs equal periods");
  }
  const int n = a.period();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    double d = 0.0;
    for (int t = 0; t < n; ++t) {
      d = std::max(d, std::abs(a.at(t) - b.at(t + k)));
    }
    best = std::min(best, d);
  }
  return best;
}

int orbit_sub_period(const OrbitSequence& xi, double tol) {
  const int n = xi.period();
  for (int q = 1; q < n; ++q) {
    if (n % q != 0) continue;
    bool ok = true;
    for (int t = 0; t < n && ok; ++t) ok = std::abs(xi.at(t) - xi.at(t + q)) <= tol;
    if (ok) return q;
  }
  return n;
}

}  // namespace aitk::words
