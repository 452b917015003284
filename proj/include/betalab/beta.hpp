#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "betalab/interval.hpp"
#include "betalab/polynomial.hpp"
#include "betalab/symbols.hpp"

namespace betalab {

/// Guard bits (above what the magnitude of an expression already needs)
/// are doubled from 64 up to this cap before a digit decision gives up.
/// Defaults to 256, or BETALAB_PRECISION_BITS when set.
long precision_cap_bits();
void set_precision_cap_bits(long bits);

enum class BetaSource { DecimalLiteral, PolynomialRoot, DigitSequence };
std::string_view source_name(BetaSource s);

/// A real beta > 1. Internally beta is a simple root of an exact rational
/// polynomial, isolated in a rational bracket that is refined on demand, so
/// every enclosure is rigorous. Copies share the (append-only) digit cache.
class BetaNumber {
 public:
  static BetaNumber from_rational(const mpq_class& q, BetaSource src = BetaSource::DecimalLiteral);
  /// Decimal literal such as "1.8" or "2".
  static BetaNumber from_decimal(std::string_view text);
  /// Largest real root > 1 of the polynomial (coefficients highest degree first).
  static BetaNumber from_polynomial(const std::vector<long>& high_first);

  BetaSource source() const;
  int digit_bound() const;
  bool is_rational() const;
  std::optional<mpq_class> rational_value() const;
  const RatPoly& defining_poly() const;

  Interval value(mpfr_prec_t bits = 64) const;
  double approx() const;
  double log_value() const;

  /// w_j(beta), 1-based.
  Digit w(size_t j) const;
  Digits w_prefix(size_t n) const;
  /// The whole of w(beta) when it is known to be eventually periodic.
  std::optional<DigitSequence> w_exact() const;

  std::string describe() const;

 private:
  struct State;
  explicit BetaNumber(std::shared_ptr<State> st) : st_(std::move(st)) {}
  std::shared_ptr<State> st_;

  friend BetaNumber beta_from_expansion(const DigitSequence& w);
  friend SymbolWord greedy_expansion(const mpq_class& x, const BetaNumber& beta, size_t n);
  friend std::vector<Interval> beta_orbit(const mpq_class& x, const BetaNumber& beta, size_t n, mpfr_prec_t bits);
};

/// First n digits of the quasi-greedy expansion of 1.
SymbolWord expansion_of_one(const BetaNumber& beta, size_t n);

/// Greedy expansion of a rational x in [0, 1).
SymbolWord greedy_expansion(const mpq_class& x, const BetaNumber& beta, size_t n);

/// x, f(x), ..., f^{n-1}(x) as enclosures at the given output precision.
std::vector<Interval> beta_orbit(const mpq_class& x, const BetaNumber& beta, size_t n, mpfr_prec_t bits = 64);

/// Self-admissibility sigma^k(w) <= w for every k >= 1 (trailing zeros implied
/// for finite sequences).
bool is_self_admissible(const DigitSequence& w);

/// Finite d_1..d_m (d_m != 0) becomes (d_1..d_{m-1}, d_m - 1)^infinity.
DigitSequence quasi_greedy_form(const DigitSequence& w);

/// The beta > 1 with sum w_j beta^-j = 1.
BetaNumber beta_from_expansion(const DigitSequence& w);

struct SimpleApprox {
  BetaNumber beta;
  size_t requested_index;
  size_t effective_index;  // last nonzero digit position <= requested
  Digits truncation;
};

/// beta(n): the simple beta-number of (w_1, ..., w_n, 0, 0, ...).
SimpleApprox simple_beta_approx(const BetaNumber& beta, size_t n);

/// 1 0^{a_1} 1 0^{a_2} ... 1 0^{a_m}.
SymbolWord make_beta_with_gaps(const std::vector<long>& gaps);

/// |x - sum_{j<=n} w_j beta^-j| <= beta^-n, checked with enclosures.
bool reconstruction_ok(const mpq_class& x, const SymbolWord& w, const BetaNumber& beta);

}  // namespace betalab
