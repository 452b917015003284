#pragma once

// Independent reference computations used only by the tests.

#include <gmpxx.h>

#include <cmath>
#include <vector>

#include "betalab/beta.hpp"
#include "betalab/symbols.hpp"

namespace oracle {

// a + b*sqrt(5) with rational a, b.
struct Q5 {
  mpq_class a, b;

  friend Q5 operator+(const Q5& x, const Q5& y) { return {x.a + y.a, x.b + y.b}; }
  friend Q5 operator-(const Q5& x, const Q5& y) { return {x.a - y.a, x.b - y.b}; }
  friend Q5 operator*(const Q5& x, const Q5& y) { return {x.a * y.a + 5 * x.b * y.b, x.a * y.b + x.b * y.a}; }

  int sign() const {
    const int sa = sgn(a), sb = sgn(b);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    const mpq_class lhs = a * a, rhs = 5 * b * b;
    return lhs > rhs ? sa : sb;
  }
  // Largest integer k with k <= value.
  long floor() const {
    long k = static_cast<long>(std::floor(approx())) - 2;
    while ((*this - Q5{k + 1, 0}).sign() >= 0) ++k;
    return k;
  }
  double approx() const { return a.get_d() + b.get_d() * std::sqrt(5.0); }
};

inline Q5 golden() { return {mpq_class(1, 2), mpq_class(1, 2)}; }

// Quasi-greedy expansion of 1 in base phi: d = ceil(phi r) - 1.
inline betalab::Digits golden_one(size_t n) {
  betalab::Digits out;
  Q5 r{1, 0};
  for (size_t i = 0; i < n; ++i) {
    const Q5 y = golden() * r;
    long d = y.floor();
    if ((y - Q5{d, 0}).sign() == 0) d -= 1;
    out.push_back(static_cast<betalab::Digit>(d));
    r = y - Q5{d, 0};
  }
  return out;
}

inline betalab::Digits golden_greedy(const mpq_class& x, size_t n) {
  betalab::Digits out;
  Q5 y{x, 0};
  for (size_t i = 0; i < n; ++i) {
    const Q5 t = golden() * y;
    const long d = t.floor();
    out.push_back(static_cast<betalab::Digit>(d));
    y = t - Q5{d, 0};
  }
  return out;
}

// Plain double bisection on sum w_j x^-j = 1 for a finite digit list.
inline double finite_root(const betalab::Digits& w) {
  double lo = 1.0, hi = 1.0 + w[0] + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0, p = 1;
    for (auto d : w) p /= mid, s += d * p;
    (s > 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Literal shift-by-shift Parry comparison against the given prefix of w(beta).
inline bool parry_literal(const betalab::Digits& word, const betalab::Digits& wbeta) {
  for (size_t k = 0; k < word.size(); ++k) {
    for (size_t i = 0; k + i < word.size(); ++i) {
      if (word[k + i] < wbeta[i]) break;
      if (word[k + i] > wbeta[i]) return false;
    }
  }
  return true;
}

// All words of length n over {0..b}.
inline std::vector<betalab::Digits> all_words(size_t n, int b) {
  std::vector<betalab::Digits> out;
  betalab::Digits cur(n, 0);
  while (true) {
    out.push_back(cur);
    size_t i = n;
    while (i > 0) {
      if (cur[i - 1] < b) {
        ++cur[i - 1];
        break;
      }
      cur[i - 1] = 0;
      --i;
    }
    if (i == 0) break;
  }
  return out;
}

inline betalab::BetaNumber golden_beta() { return betalab::BetaNumber::from_polynomial({1, -1, -1}); }
inline betalab::BetaNumber tribonacci() { return betalab::BetaNumber::from_polynomial({1, -1, -1, -1}); }
inline betalab::BetaNumber figure_beta() { return betalab::beta_from_expansion(betalab::parse_digit_sequence("20(100)")); }
inline std::vector<betalab::BetaNumber> battery() {
  return {betalab::BetaNumber::from_decimal("2"), golden_beta(), tribonacci(), figure_beta()};
}

}  // namespace oracle
