#include "betalab/interval.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace betalab {

namespace {

mpfr_prec_t joint(const Interval& a, const Interval& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

Interval::Interval(mpfr_prec_t bits) : bits_(bits) {
  mpfr_init2(lo_, bits_);
  mpfr_init2(hi_, bits_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : bits_(other.bits_) {
  mpfr_init2(lo_, bits_);
  mpfr_init2(hi_, bits_);
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(other.bits_) {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    bits_ = other.bits_;
    mpfr_set_prec(lo_, bits_);
    mpfr_set_prec(hi_, bits_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  std::swap(bits_, other.bits_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::point(long value, mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_set_si(r.lo_, value, MPFR_RNDD);
  mpfr_set_si(r.hi_, value, MPFR_RNDU);
  return r;
}

Interval Interval::from_rational(const mpq_class& q, mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::hull(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t bits) {
  Interval r(bits);
  mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  const mpfr_prec_t bits = joint(a, b);
  Interval r(bits);
  // Fast path for the common nonnegative case.
  if (mpfr_sgn(a.lo_) >= 0 && mpfr_sgn(b.lo_) >= 0) {
    mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  const mpfr_srcptr as[2] = {a.lo_, a.hi_};
  const mpfr_srcptr bs[2] = {b.lo_, b.hi_};
  mpfr_t tmp;
  mpfr_init2(tmp, bits);
  bool first = true;
  for (auto x : as) {
    for (auto y : bs) {
      mpfr_mul(tmp, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(tmp, r.lo_)) mpfr_set(r.lo_, tmp, MPFR_RNDD);
      mpfr_mul(tmp, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(tmp, r.hi_)) mpfr_set(r.hi_, tmp, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(tmp);
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw std::domain_error("interval division by an enclosure of zero");
  const mpfr_prec_t bits = joint(a, b);
  Interval inv(bits);
  mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
  return a * inv;
}

Interval Interval::plus(long k) const {
  Interval r(bits_);
  mpfr_add_si(r.lo_, lo_, k, MPFR_RNDD);
  mpfr_add_si(r.hi_, hi_, k, MPFR_RNDU);
  return r;
}

Interval Interval::minus(long k) const { return plus(-k); }

Interval Interval::times(long k) const {
  Interval r(bits_);
  if (k >= 0) {
    mpfr_mul_si(r.lo_, lo_, k, MPFR_RNDD);
    mpfr_mul_si(r.hi_, hi_, k, MPFR_RNDU);
  } else {
    mpfr_mul_si(r.lo_, hi_, k, MPFR_RNDD);
    mpfr_mul_si(r.hi_, lo_, k, MPFR_RNDU);
  }
  return r;
}

Interval Interval::pow(unsigned n) const {
  Interval result = point(1, bits_);
  Interval base = *this;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

std::optional<long> Interval::floor_if_decided() const {
  const long a = mpfr_get_si(lo_, MPFR_RNDD);
  const long b = mpfr_get_si(hi_, MPFR_RNDD);
  if (a == b) return a;
  return std::nullopt;
}

std::optional<long> Interval::ceil_if_decided() const {
  const long a = mpfr_get_si(lo_, MPFR_RNDU);
  const long b = mpfr_get_si(hi_, MPFR_RNDU);
  if (a == b) return a;
  return std::nullopt;
}

bool Interval::contains(long k) const {
  return mpfr_cmp_si(lo_, k) <= 0 && mpfr_cmp_si(hi_, k) >= 0;
}

bool Interval::certainly_less(const Interval& b) const { return mpfr_less_p(hi_, b.lo_) != 0; }
bool Interval::certainly_le(const Interval& b) const { return mpfr_lessequal_p(hi_, b.lo_) != 0; }
bool Interval::certainly_less(long k) const { return mpfr_cmp_si(hi_, k) < 0; }
bool Interval::certainly_greater(long k) const { return mpfr_cmp_si(lo_, k) > 0; }
bool Interval::is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }

double Interval::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::mid() const {
  mpfr_t m;
  mpfr_init2(m, bits_ + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const double d = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

double Interval::width() const {
  mpfr_t w;
  mpfr_init2(w, bits_);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  const double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

std::string Interval::to_string(int digits) const {
  auto fmt = [digits](const mpfr_t& v, mpfr_rnd_t rnd) {
    char* buf = nullptr;
    const std::string spec = "%." + std::to_string(digits) + (rnd == MPFR_RNDD ? "RDg" : "RUg");
    mpfr_asprintf(&buf, spec.c_str(), v);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  };
  return "[" + fmt(lo_, MPFR_RNDD) + ", " + fmt(hi_, MPFR_RNDU) + "]";
}

}  // namespace betalab
