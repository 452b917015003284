#include "betalab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betalab {

RatPoly::RatPoly(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) { trim(); }

RatPoly RatPoly::constant(const mpq_class& c) { return RatPoly({c}); }

RatPoly RatPoly::monomial(const mpq_class& c, int degree) {
  std::vector<mpq_class> v(static_cast<size_t>(degree) + 1, 0);
  v.back() = c;
  return RatPoly(std::move(v));
}

RatPoly RatPoly::from_high_first(const std::vector<long>& coeffs) {
  std::vector<mpq_class> v;
  v.reserve(coeffs.size());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v.emplace_back(*it);
  return RatPoly(std::move(v));
}

void RatPoly::trim() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

mpq_class RatPoly::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return c_[static_cast<size_t>(i)];
}

RatPoly RatPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<mpq_class> v(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * static_cast<long>(i);
  return RatPoly(std::move(v));
}

RatPoly RatPoly::monic() const {
  if (is_zero()) return {};
  const mpq_class l = lead();
  std::vector<mpq_class> v(c_);
  for (auto& x : v) x /= l;
  return RatPoly(std::move(v));
}

mpq_class RatPoly::eval(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int RatPoly::sign_at(const mpq_class& x) const { return sgn(eval(x)); }

Interval RatPoly::eval(const Interval& x) const {
  const mpfr_prec_t bits = x.precision();
  if (c_.empty()) return Interval::point(0, bits);
  Interval acc = Interval::from_rational(c_.back(), bits);
  for (size_t i = c_.size() - 1; i-- > 0;) acc = acc * x + Interval::from_rational(c_[i], bits);
  return acc;
}

double RatPoly::magnitude_bits(double bound) const {
  double best = 0.0;
  const double lb = std::log2(std::max(bound, 1.0));
  for (size_t i = 0; i < c_.size(); ++i) {
    if (sgn(c_[i]) == 0) continue;
    const double num = static_cast<double>(mpz_sizeinbase(c_[i].get_num_mpz_t(), 2));
    const double den = static_cast<double>(mpz_sizeinbase(c_[i].get_den_mpz_t(), 2));
    best = std::max(best, num - den + 1.0 + lb * static_cast<double>(i));
  }
  return best + std::log2(static_cast<double>(c_.size()) + 1.0);
}

RatPoly operator+(const RatPoly& a, const RatPoly& b) {
  std::vector<mpq_class> v(std::max(a.c_.size(), b.c_.size()), 0);
  for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return RatPoly(std::move(v));
}

RatPoly operator-(const RatPoly& a, const RatPoly& b) {
  std::vector<mpq_class> v(std::max(a.c_.size(), b.c_.size()), 0);
  for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) v[i] -= b.c_[i];
  return RatPoly(std::move(v));
}

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpq_class> v(a.c_.size() + b.c_.size() - 1, 0);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (sgn(a.c_[i]) == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  }
  return RatPoly(std::move(v));
}

RatPoly operator*(const mpq_class& s, const RatPoly& a) {
  std::vector<mpq_class> v(a.c_);
  for (auto& x : v) x *= s;
  return RatPoly(std::move(v));
}

void RatPoly::divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<mpq_class> rem(a.c_);
  const int db = b.degree();
  const int da = a.degree();
  std::vector<mpq_class> quo(da >= db ? static_cast<size_t>(da - db + 1) : 0, 0);
  const mpq_class lb = b.lead();
  for (int i = da; i >= db; --i) {
    const mpq_class f = rem[static_cast<size_t>(i)] / lb;
    if (sgn(f) == 0) continue;
    quo[static_cast<size_t>(i - db)] = f;
    for (int j = 0; j <= db; ++j) rem[static_cast<size_t>(i - db + j)] -= f * b.c_[static_cast<size_t>(j)];
  }
  q = RatPoly(std::move(quo));
  r = RatPoly(std::move(rem));
}

RatPoly operator%(const RatPoly& a, const RatPoly& b) {
  RatPoly q, r;
  RatPoly::divmod(a, b, q, r);
  return r;
}

RatPoly operator/(const RatPoly& a, const RatPoly& b) {
  RatPoly q, r;
  RatPoly::divmod(a, b, q, r);
  return q;
}

RatPoly RatPoly::shift_mod(const RatPoly& m) const {
  std::vector<mpq_class> v(c_.size() + 1, 0);
  for (size_t i = 0; i < c_.size(); ++i) v[i + 1] = c_[i];
  RatPoly shifted(std::move(v));
  if (shifted.degree() < m.degree()) return shifted;
  return shifted % m;
}

RatPoly gcd(RatPoly a, RatPoly b) {
  while (!b.is_zero()) {
    RatPoly r = a % b;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

RatPoly squarefree_part(const RatPoly& p) {
  if (p.degree() <= 0) return p.monic();
  const RatPoly g = gcd(p, p.derivative());
  return (p / g).monic();
}

SturmChain::SturmChain(const RatPoly& p) {
  chain_.push_back(p);
  if (p.degree() <= 0) return;
  chain_.push_back(p.derivative());
  while (true) {
    RatPoly r = chain_[chain_.size() - 2] % chain_.back();
    if (r.is_zero()) break;
    // Positive rescaling keeps sign variations and limits coefficient growth.
    mpq_class l = r.lead();
    if (sgn(l) < 0) l = -l;
    chain_.push_back((mpq_class(-1) / l) * r);
  }
}

int SturmChain::variations(const mpq_class& x) const {
  int changes = 0;
  int prev = 0;
  for (const auto& p : chain_) {
    const int s = p.sign_at(x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

int SturmChain::count(const mpq_class& a, const mpq_class& b) const {
  return variations(a) - variations(b);
}

mpq_class cauchy_bound(const RatPoly& p) {
  mpq_class m = 0;
  const mpq_class l = abs(p.lead());
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, mpq_class(abs(p.coeff(i)) / l));
  mpz_class ceil_m;
  mpz_cdiv_q(ceil_m.get_mpz_t(), m.get_num_mpz_t(), m.get_den_mpz_t());
  return mpq_class(ceil_m + 1);
}

namespace {

// Dyadic midpoint nudged off any root of s.
mpq_class split_point(const RatPoly& s, const mpq_class& lo, const mpq_class& hi) {
  mpq_class mid = (lo + hi) / 2;
  mpq_class step = (hi - lo) / 1024;
  while (s.sign_at(mid) == 0) mid += step, step /= 2;
  return mid;
}

}  // namespace

bool isolate_largest_root_above_one(const RatPoly& p, RatPoly& squarefree, RootBracket& out) {
  RatPoly s = squarefree_part(p);
  if (s.degree() < 1) return false;
  const RatPoly x_minus_one({-1, 1});
  if (s.sign_at(1) == 0) s = s / x_minus_one;
  squarefree = s;
  if (s.degree() < 1) return false;
  const SturmChain chain(s);
  mpq_class lo = 1;
  mpq_class hi = cauchy_bound(s);
  if (chain.count(lo, hi) == 0) return false;
  while (chain.count(lo, hi) > 1) {
    const mpq_class mid = split_point(s, lo, hi);
    if (chain.count(mid, hi) >= 1)
      lo = mid;
    else
      hi = mid;
  }
  if (s.sign_at(hi) == 0) {
    out = {hi, hi, true};
    return true;
  }
  out = {lo, hi, false};
  return true;
}

void refine_bracket(const RatPoly& s, RootBracket& b, const mpq_class& width) {
  if (b.exact) return;
  const int s_lo = s.sign_at(b.lo);
  while (b.hi - b.lo > width) {
    // Dyadic midpoint keeps denominators small.
    const mpq_class mid = (b.lo + b.hi) / 2;
    const int sm = s.sign_at(mid);
    if (sm == 0) {
      b = {mid, mid, true};
      return;
    }
    if (sm == s_lo)
      b.lo = mid;
    else
      b.hi = mid;
  }
}

}  // namespace betalab
