#pragma once

#include <gmpxx.h>

#include <vector>

#include "betalab/interval.hpp"

namespace betalab {

/// Dense univariate polynomial over Q, coefficients stored lowest degree first.
class RatPoly {
 public:
  RatPoly() = default;
  explicit RatPoly(std::vector<mpq_class> coeffs);
  static RatPoly constant(const mpq_class& c);
  static RatPoly monomial(const mpq_class& c, int degree);
  /// Integer coefficients given highest degree first (the CLI order).
  static RatPoly from_high_first(const std::vector<long>& coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const std::vector<mpq_class>& coeffs() const { return c_; }
  const mpq_class& lead() const { return c_.back(); }
  mpq_class coeff(int i) const;

  RatPoly derivative() const;
  RatPoly monic() const;
  mpq_class eval(const mpq_class& x) const;
  int sign_at(const mpq_class& x) const;
  Interval eval(const Interval& x) const;
  /// Upper bound on log2 of sum |c_i| x^i for 0 < x <= bound.
  double magnitude_bits(double bound) const;

  friend RatPoly operator+(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator-(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const mpq_class& s, const RatPoly& a);
  friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.c_ == b.c_; }

  /// Euclidean division; throws std::domain_error on division by zero.
  static void divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r);
  friend RatPoly operator%(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator/(const RatPoly& a, const RatPoly& b);

  /// x * this, reduced modulo m.
  RatPoly shift_mod(const RatPoly& m) const;

 private:
  void trim();
  std::vector<mpq_class> c_;
};

/// Monic gcd (zero if both are zero).
RatPoly gcd(RatPoly a, RatPoly b);
RatPoly squarefree_part(const RatPoly& p);

class SturmChain {
 public:
  explicit SturmChain(const RatPoly& p);
  int variations(const mpq_class& x) const;
  /// Number of distinct real roots in (a, b]; a must not be a root.
  int count(const mpq_class& a, const mpq_class& b) const;

 private:
  std::vector<RatPoly> chain_;
};

mpq_class cauchy_bound(const RatPoly& p);

/// A real root r of a squarefree polynomial s located either exactly
/// (lo == hi == r) or strictly inside (lo, hi) with s(lo) * s(hi) < 0 and no
/// other root of s in [lo, hi].
struct RootBracket {
  mpq_class lo;
  mpq_class hi;
  bool exact = false;
};

/// Largest real root > 1 of p; returns false when none exists.
bool isolate_largest_root_above_one(const RatPoly& p, RatPoly& squarefree, RootBracket& out);

/// Shrink the bracket by sign bisection until hi - lo <= width.
void refine_bracket(const RatPoly& s, RootBracket& b, const mpq_class& width);

}  // namespace betalab
