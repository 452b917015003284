#include "betalab/beta.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>

#include "betalab/errors.hpp"

namespace betalab {

namespace {

std::atomic<long> g_cap{0};

long env_cap() {
  if (const char* env = std::getenv("BETALAB_PRECISION_BITS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 64) return v;
  }
  return 256;
}

mpz_class floor_q(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

mpz_class ceil_q(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

}  // namespace

long precision_cap_bits() {
  long v = g_cap.load();
  if (v == 0) {
    v = env_cap();
    g_cap.store(v);
  }
  return v;
}

void set_precision_cap_bits(long bits) { g_cap.store(std::max(64L, bits)); }

std::string_view source_name(BetaSource s) {
  switch (s) {
    case BetaSource::DecimalLiteral: return "decimal-literal";
    case BetaSource::PolynomialRoot: return "polynomial-root";
    case BetaSource::DigitSequence: return "digit-sequence";
  }
  return "unknown";
}

struct BetaNumber::State {
  std::recursive_mutex mu;
  BetaSource source = BetaSource::DecimalLiteral;
  // beta is a simple root of s and the only root of s inside the bracket.
  RatPoly s;
  RootBracket bracket;
  int bound = 1;
  std::string label;

  // Quasi-greedy orbit of 1: digits so far and the remainder as a
  // polynomial in beta reduced modulo s.
  Digits w;
  RatPoly rem = RatPoly::constant(1);
  std::optional<DigitSequence> exact;

  Interval value_locked(mpfr_prec_t bits) {
    mpq_class width(1);
    mpz_class den(1);
    den <<= static_cast<mp_bitcnt_t>(bits + 2);
    width /= den;
    refine_bracket(s, bracket, width);
    return Interval::hull(bracket.lo, bracket.hi, bits);
  }

  bool exact_tie(const RatPoly& y, long m) {
    const RatPoly e = y - RatPoly::constant(m);
    if (e.is_zero()) return true;
    if (bracket.exact) return sgn(e.eval(bracket.lo)) == 0;
    const RatPoly g = gcd(s, e);
    if (g.degree() < 1) return false;
    return g.sign_at(bracket.lo) * g.sign_at(bracket.hi) < 0;
  }

  struct Decision {
    long digit;
    bool tie;
  };

  // floor(Y(beta)) or ceil(Y(beta)) - 1, with exact tie detection.
  Decision decide(const RatPoly& y, bool floor_rule) {
    if (y.degree() <= 0) {
      const mpq_class c = y.coeff(0);
      const bool integral = c.get_den() == 1;
      const mpz_class d = floor_rule ? floor_q(c) : ceil_q(c) - 1;
      return {d.get_si(), integral};
    }
    const long cap = precision_cap_bits();
    const double hi_bound = bracket.hi.get_d();
    const double mag = y.magnitude_bits(hi_bound);
    long checked = -1000000;
    for (long guard = std::min(64L, cap);; guard = std::min(guard * 2, cap)) {
      const auto bits = static_cast<mpfr_prec_t>(guard + static_cast<long>(std::ceil(mag)) + 16);
      const Interval v = y.eval(value_locked(bits));
      const auto decided = floor_rule ? v.floor_if_decided() : v.ceil_if_decided();
      if (decided) {
        const long k = *decided;
        // An endpoint sitting exactly on the integer leaves a tie possible.
        const mpfr_t& edge = floor_rule ? v.lo_raw() : v.hi_raw();
        const bool touches = mpfr_integer_p(edge) && mpfr_cmp_si(edge, k) == 0;
        const bool tie = touches && exact_tie(y, k);
        return {floor_rule ? k : k - 1, tie};
      }
      const long first = mpfr_get_si(v.lo_raw(), MPFR_RNDU);
      const long last = mpfr_get_si(v.hi_raw(), MPFR_RNDD);
      if (first == last && first != checked) {
        checked = first;
        if (exact_tie(y, first)) return {floor_rule ? first : first - 1, true};
      }
      if (guard >= cap) {
        throw Error(ErrorKind::UndecidableAtPrecision,
                    "digit decision unresolved with " + std::to_string(cap) + " guard bits; enclosure " + v.to_string(12));
      }
    }
  }

  void extend_w(size_t n) {
    if (exact) {
      while (w.size() < n) w.push_back(exact->at(w.size()));
      return;
    }
    while (w.size() < n) {
      const RatPoly y = rem.shift_mod(s);
      const Decision d = decide(y, false);
      if (d.digit < 0 || d.digit > bound)
        throw Error(ErrorKind::UndecidableAtPrecision, "digit outside alphabet during expansion of 1");
      w.push_back(static_cast<Digit>(d.digit));
      rem = d.tie ? RatPoly::constant(1) : y - RatPoly::constant(d.digit);
      if (rem == RatPoly::constant(1)) {
        // Back at the starting point: w is purely periodic.
        exact = DigitSequence{{}, w};
        while (w.size() < n) w.push_back(exact->at(w.size()));
        return;
      }
    }
  }

  void set_bound_from_bracket() {
    if (bracket.exact) {
      bound = static_cast<int>(ceil_q(bracket.lo).get_si() - 1);
      return;
    }
    mpq_class width = bracket.hi - bracket.lo;
    while (floor_q(bracket.lo) != floor_q(bracket.hi) || sgn(bracket.hi - mpq_class(floor_q(bracket.hi))) == 0) {
      width /= 2;
      refine_bracket(s, bracket, width);
      if (bracket.exact) break;
    }
    bound = static_cast<int>(floor_q(bracket.lo).get_si());
    if (bracket.exact) bound = static_cast<int>(ceil_q(bracket.lo).get_si() - 1);
  }
};

BetaNumber BetaNumber::from_rational(const mpq_class& q, BetaSource src) {
  if (q <= 1) throw Error(ErrorKind::InvalidBeta, "beta must exceed 1, got " + q.get_str());
  auto st = std::make_shared<State>();
  st->source = src;
  st->s = RatPoly({-q, mpq_class(1)});
  st->bracket = {q, q, true};
  st->set_bound_from_bracket();
  st->label = q.get_str();
  if (st->label.size() > 40) st->label = std::to_string(q.get_d());
  return BetaNumber(st);
}

BetaNumber BetaNumber::from_decimal(std::string_view text) {
  std::string t(text);
  if (t.empty()) throw Error(ErrorKind::Parse, "empty beta literal");
  mpq_class q;
  const size_t slash = t.find('/');
  if (slash != std::string::npos) {
    if (q.set_str(t, 10) != 0 || q.get_den() == 0) throw Error(ErrorKind::Parse, "bad rational literal '" + t + "'");
    q.canonicalize();
  } else {
    const size_t dot = t.find('.');
    std::string ip = t.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : t.substr(dot + 1);
    auto all_digits = [](const std::string& s) {
      return std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if ((ip.empty() && fp.empty()) || !all_digits(ip) || !all_digits(fp))
      throw Error(ErrorKind::Parse, "bad decimal literal '" + t + "'");
    const mpz_class num(ip + fp, 10);
    mpz_class den(1);
    for (size_t i = 0; i < fp.size(); ++i) den *= 10;
    q = mpq_class(num, den);
    q.canonicalize();
  }
  BetaNumber b = from_rational(q, BetaSource::DecimalLiteral);
  b.st_->label = t;
  return b;
}

BetaNumber BetaNumber::from_polynomial(const std::vector<long>& high_first) {
  const RatPoly p = RatPoly::from_high_first(high_first);
  if (p.degree() < 1) throw Error(ErrorKind::InvalidBeta, "polynomial must have degree >= 1");
  RatPoly s;
  RootBracket br;
  if (!isolate_largest_root_above_one(p, s, br))
    throw Error(ErrorKind::InvalidBeta, "polynomial has no real root greater than 1");
  std::ostringstream label;
  label << "root(";
  for (size_t i = 0; i < high_first.size(); ++i) label << (i ? "," : "") << high_first[i];
  label << ")";
  if (s.degree() == 1) {
    BetaNumber b = from_rational(-s.coeff(0) / s.coeff(1), BetaSource::PolynomialRoot);
    b.st_->label = label.str();
    return b;
  }
  if (!br.exact) {
    for (mpz_class k = ceil_q(br.lo); k <= floor_q(br.hi); ++k) {
      if (s.sign_at(mpq_class(k)) == 0) {
        BetaNumber b = from_rational(mpq_class(k), BetaSource::PolynomialRoot);
        b.st_->label = label.str();
        return b;
      }
    }
  } else {
    BetaNumber b = from_rational(br.lo, BetaSource::PolynomialRoot);
    b.st_->label = label.str();
    return b;
  }
  auto st = std::make_shared<State>();
  st->source = BetaSource::PolynomialRoot;
  st->s = s;
  st->bracket = br;
  st->set_bound_from_bracket();
  st->label = label.str();
  return BetaNumber(st);
}

BetaSource BetaNumber::source() const { return st_->source; }
int BetaNumber::digit_bound() const { return st_->bound; }
bool BetaNumber::is_rational() const { return st_->s.degree() == 1; }

std::optional<mpq_class> BetaNumber::rational_value() const {
  if (!is_rational()) return std::nullopt;
  return -st_->s.coeff(0) / st_->s.coeff(1);
}

const RatPoly& BetaNumber::defining_poly() const { return st_->s; }

Interval BetaNumber::value(mpfr_prec_t bits) const {
  std::lock_guard<std::recursive_mutex> lock(st_->mu);
  return st_->value_locked(bits);
}

double BetaNumber::approx() const { return value(80).mid(); }
double BetaNumber::log_value() const { return std::log(approx()); }

Digit BetaNumber::w(size_t j) const {
  std::lock_guard<std::recursive_mutex> lock(st_->mu);
  st_->extend_w(j);
  return st_->w[j - 1];
}

Digits BetaNumber::w_prefix(size_t n) const {
  std::lock_guard<std::recursive_mutex> lock(st_->mu);
  st_->extend_w(n);
  return Digits(st_->w.begin(), st_->w.begin() + static_cast<long>(n));
}

std::optional<DigitSequence> BetaNumber::w_exact() const {
  std::lock_guard<std::recursive_mutex> lock(st_->mu);
  return st_->exact;
}

std::string BetaNumber::describe() const {
  std::ostringstream os;
  os.precision(15);
  os << st_->label << " ~ " << approx();
  return os.str();
}

SymbolWord expansion_of_one(const BetaNumber& beta, size_t n) {
  if (n < 1) throw Error(ErrorKind::Parse, "expansion length must be >= 1");
  return SymbolWord(beta.w_prefix(n), beta.digit_bound());
}

namespace {

void check_unit_interval(const mpq_class& x) {
  if (x < 0 || x >= 1) throw Error(ErrorKind::Parse, "x must lie in [0, 1), got " + x.get_str());
}

}  // namespace

SymbolWord greedy_expansion(const mpq_class& x, const BetaNumber& beta, size_t n) {
  check_unit_interval(x);
  auto& st = *beta.st_;
  std::lock_guard<std::recursive_mutex> lock(st.mu);
  Digits out;
  out.reserve(n);
  RatPoly y = RatPoly::constant(x);
  for (size_t j = 0; j < n; ++j) {
    if (y.is_zero()) {
      out.push_back(0);
      continue;
    }
    const RatPoly by = y.shift_mod(st.s);
    const auto d = st.decide(by, true);
    if (d.digit < 0 || d.digit > st.bound)
      throw Error(ErrorKind::UndecidableAtPrecision, "digit outside alphabet during greedy expansion");
    out.push_back(static_cast<Digit>(d.digit));
    y = d.tie ? RatPoly() : by - RatPoly::constant(d.digit);
  }
  return SymbolWord(std::move(out), st.bound);
}

std::vector<Interval> beta_orbit(const mpq_class& x, const BetaNumber& beta, size_t n, mpfr_prec_t bits) {
  check_unit_interval(x);
  auto& st = *beta.st_;
  std::lock_guard<std::recursive_mutex> lock(st.mu);
  std::vector<Interval> out;
  out.reserve(n);
  RatPoly y = RatPoly::constant(x);
  for (size_t j = 0; j < n; ++j) {
    if (y.degree() <= 0) {
      out.push_back(Interval::from_rational(y.coeff(0), bits));
    } else {
      const double mag = y.magnitude_bits(st.bracket.hi.get_d());
      const auto work = static_cast<mpfr_prec_t>(bits + static_cast<long>(std::ceil(mag)) + 16);
      out.push_back(y.eval(st.value_locked(work)));
    }
    if (j + 1 == n) break;
    if (y.is_zero()) continue;
    const RatPoly by = y.shift_mod(st.s);
    const auto d = st.decide(by, true);
    y = d.tie ? RatPoly() : by - RatPoly::constant(d.digit);
  }
  return out;
}

bool is_self_admissible(const DigitSequence& w) {
  const size_t a = w.prefix.size();
  const size_t l = w.period.size();
  const size_t horizon = 2 * (a + l) + 1;
  const size_t shifts = w.finite() ? a : a + l;
  const Digits base = w.take(horizon + shifts);
  for (size_t k = 1; k <= shifts; ++k) {
    if (compare_prefix(base.data() + k, base.data(), horizon) > 0) return false;
  }
  return true;
}

DigitSequence quasi_greedy_form(const DigitSequence& w) {
  if (!w.finite()) return w;
  Digits d = w.prefix;
  while (!d.empty() && d.back() == 0) d.pop_back();
  if (d.empty()) throw Error(ErrorKind::DegenerateRoot, "all-zero sequence has no beta");
  if (d.size() == 1 && d[0] == 1) throw Error(ErrorKind::DegenerateRoot, "(1,0,0,...) gives beta = 1");
  d.back() -= 1;
  return DigitSequence{{}, d};
}

BetaNumber beta_from_expansion(const DigitSequence& w) {
  const Digits head = w.take(1);
  const bool all_zero = w.finite() && std::all_of(w.prefix.begin(), w.prefix.end(), [](Digit d) { return d == 0; });
  if (all_zero) throw Error(ErrorKind::DegenerateRoot, "all-zero sequence has no beta");
  if (head[0] == 0) throw Error(ErrorKind::NotSelfAdmissible, "w_1 must be >= 1");
  if (!is_self_admissible(w)) throw Error(ErrorKind::NotSelfAdmissible, "sigma^k(w) > w for some k: " + format_sequence(w));
  const DigitSequence q = quasi_greedy_form(w);

  const int a = static_cast<int>(q.prefix.size());
  const int l = static_cast<int>(q.period.size());
  RatPoly big_p, big_q;
  for (int j = 1; j <= a; ++j) big_p = big_p + RatPoly::monomial(q.prefix[static_cast<size_t>(j - 1)], a - j);
  for (int j = 1; j <= l; ++j) big_q = big_q + RatPoly::monomial(q.period[static_cast<size_t>(j - 1)], l - j);
  const RatPoly xl1 = RatPoly::monomial(1, l) - RatPoly::constant(1);
  const RatPoly p = RatPoly::monomial(1, a) * xl1 - big_p * xl1 - big_q;

  const int w1 = q.at(0);
  auto st = std::make_shared<BetaNumber::State>();
  st->source = BetaSource::DigitSequence;
  st->exact = q;
  st->label = format_sequence(w);
  const mpq_class top(w1 + 1);
  if (p.sign_at(top) == 0) {
    st->s = RatPoly({-top, mpq_class(1)});
    st->bracket = {top, top, true};
  } else {
    // For x > 1 the sign of p(x) is the sign of x - beta.
    st->s = p;
    mpq_class lo(w1), hi(top);
    while (lo <= 1) {
      const mpq_class mid = (lo + hi) / 2;
      const int sm = p.sign_at(mid);
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      (sm < 0 ? lo : hi) = mid;
    }
    st->bracket = {lo, hi, lo == hi};
    if (lo == hi) st->s = RatPoly({-lo, mpq_class(1)});
  }
  st->bound = w1;
  return BetaNumber(st);
}

SimpleApprox simple_beta_approx(const BetaNumber& beta, size_t n) {
  if (n < 1) throw Error(ErrorKind::Parse, "truncation index must be >= 1");
  Digits w = beta.w_prefix(n);
  size_t m = n;
  while (m > 0 && w[m - 1] == 0) --m;
  w.resize(m);
  BetaNumber approx = beta_from_expansion(DigitSequence{w, {}});
  return SimpleApprox{approx, n, m, w};
}

SymbolWord make_beta_with_gaps(const std::vector<long>& gaps) {
  if (gaps.empty()) throw Error(ErrorKind::NotIncreasing, "gap list is empty");
  Digits out;
  long prev = 0;
  for (long g : gaps) {
    if (g <= prev) throw Error(ErrorKind::NotIncreasing, "gaps must be positive and strictly increasing");
    prev = g;
    out.push_back(1);
    out.insert(out.end(), static_cast<size_t>(g), 0);
  }
  return SymbolWord(std::move(out), 1);
}

bool reconstruction_ok(const mpq_class& x, const SymbolWord& w, const BetaNumber& beta) {
  // beta^n (x - sum w_j beta^-j) = x beta^n - sum w_j beta^{n-j}, which must
  // lie in [-1, 1].
  const int n = static_cast<int>(w.size());
  std::vector<mpq_class> c(static_cast<size_t>(n) + 1, 0);
  c[static_cast<size_t>(n)] = x;
  for (int j = 1; j <= n; ++j) c[static_cast<size_t>(n - j)] -= w[static_cast<size_t>(j - 1)];
  RatPoly d(std::move(c));
  const RatPoly& s = beta.defining_poly();
  if (d.degree() >= s.degree()) d = d % s;
  if (d.degree() <= 0) {
    const mpq_class v = d.coeff(0);
    return v >= -1 && v <= 1;
  }
  const double b = beta.approx() + 1.0;
  const auto bits = static_cast<mpfr_prec_t>(96 + static_cast<long>(std::ceil(d.magnitude_bits(b))));
  const Interval v = d.eval(beta.value(bits));
  return v.lower() >= -1.0 && v.upper() <= 1.0;
}

}  // namespace betalab
