#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <optional>
#include <string>

namespace betalab {

/// Closed interval [lo, hi] with MPFR endpoints. Every operation rounds the
/// lower endpoint down and the upper endpoint up, so the true value of any
/// expression built from exact inputs stays inside the result.
class Interval {
 public:
  explicit Interval(mpfr_prec_t bits = 64);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  static Interval point(long value, mpfr_prec_t bits);
  static Interval from_rational(const mpq_class& q, mpfr_prec_t bits);
  static Interval hull(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t bits);

  mpfr_prec_t precision() const { return bits_; }

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval plus(long k) const;
  Interval minus(long k) const;
  Interval times(long k) const;
  Interval pow(unsigned n) const;

  /// floor(x) when it is the same for every x in the interval.
  std::optional<long> floor_if_decided() const;
  /// ceil(x) when it is the same for every x in the interval.
  std::optional<long> ceil_if_decided() const;

  bool contains(long k) const;
  bool contains_zero() const { return contains(0); }
  bool certainly_less(const Interval& b) const;     // hi < b.lo
  bool certainly_le(const Interval& b) const;       // hi <= b.lo
  bool certainly_less(long k) const;                // hi < k
  bool certainly_greater(long k) const;             // lo > k
  bool is_point() const;

  double lower() const;  // rounded down
  double upper() const;  // rounded up
  double mid() const;
  /// Width hi - lo rounded up, as a double.
  double width() const;
  std::string to_string(int digits = 20) const;

  const mpfr_t& lo_raw() const { return lo_; }
  const mpfr_t& hi_raw() const { return hi_; }

 private:
  mpfr_prec_t bits_;
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace betalab
