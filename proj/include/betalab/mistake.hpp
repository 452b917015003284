#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "betalab/beta.hpp"
#include "betalab/symbols.hpp"

namespace betalab {

/// g(n, eps) in window semantics. The factories below do not depend on the
/// window (eps_0 is taken above every window), so g is a function of n only.
class MistakeFunction {
 public:
  enum class Kind { Zero, Constant, Log2Ceil, Sqrt };

  static MistakeFunction zero();
  static MistakeFunction constant(long k);
  static MistakeFunction log2_ceil();
  static MistakeFunction sqrt_floor();
  /// "zero", "const:k", "log", "sqrt"; an optional "2*" prefix doubles it.
  static MistakeFunction parse(std::string_view spec);

  long operator()(size_t n) const;
  MistakeFunction scaled(long factor) const;
  std::string name() const;

  struct Validation {
    bool monotone = true;
    bool sublinear = true;
    double start_ratio = 0.0;
    double end_ratio = 0.0;
  };
  /// Monotone on [n_lo, n_hi]; g(n)/n at the end no larger than at the start,
  /// strictly smaller unless zero, and below ratio_bound.
  Validation validate(size_t n_lo, size_t n_hi, double ratio_bound = 1.0) const;

 private:
  MistakeFunction(Kind k, long c, long f) : kind_(k), c_(c), factor_(f) {}
  Kind kind_;
  long c_;
  long factor_;
};

/// Number of j in [0, n) whose window [j, j + m) meets a disagreement.
size_t bad_positions(const Digits& x, const Digits& y, int window);

/// y lies in the mistake ball B_n(g; x, eps(window)).
bool mistake_ball_contains(const Digits& x, const Digits& y, const MistakeFunction& g, int window);

struct SeparationInstance {
  std::vector<Digits> words;  // common length n
  int window = 1;
  MistakeFunction g = MistakeFunction::zero();

  size_t length() const;
  void validate() const;  // LengthMismatch
};

struct SetResult {
  size_t size = 0;
  std::vector<size_t> witness;  // indices into the instance words
  bool exact = false;
};

/// Instances with |Z| <= 20 and n <= 12 are solved exactly.
bool within_exact_budget(const SeparationInstance& inst);

/// Largest (g; n, eps)-separated subset of Z. Exact mode raises BudgetExceeded
/// beyond the budget; otherwise a greedy maximal set (a lower bound) is used.
SetResult max_separated(const SeparationInstance& inst, bool exact = true);
/// Smallest subset of Z whose mistake balls cover Z (greedy upper bound
/// outside the budget when exact is false).
SetResult min_spanning(const SeparationInstance& inst, bool exact = true);
/// Greedy maximal separated subset, scanning Z in order.
std::vector<size_t> greedy_separated(const SeparationInstance& inst);
bool is_spanning(const SeparationInstance& inst, const std::vector<size_t>& centers);
bool is_separated(const SeparationInstance& inst, const std::vector<size_t>& members);

/// Word distribution at each length: weights sum to 1.
struct WordSource {
  std::string name;
  std::function<std::vector<std::pair<Digits, double>>(size_t n)> words;
  /// Closed-form metric entropy when the source is a product/Markov measure.
  std::optional<double> closed_form_entropy;
};

/// Uniform weight on all admissible words of length n.
WordSource uniform_admissible(const BetaNumber& beta);
/// Product measure with the given symbol probabilities.
WordSource bernoulli(std::vector<double> probs);
/// A single word (truncated or zero-padded to n).
WordSource single_word(const Digits& w);

struct KatokRow {
  size_t n = 0;
  size_t z_size = 0;
  double z_mass = 0.0;
  size_t separated = 0;       // greedy maximal (g) separated subset of Z, also spanning
  size_t separated_zero = 0;  // same with g = 0 (distinct words)
  long g_value = 0;
  double estimate = 0.0;       // (1/n) log separated
  double estimate_zero = 0.0;  // (1/n) log separated_zero
  std::vector<Digits> z_sample;  // first few words of Z
};

struct KatokReport {
  std::string source;
  std::string g_name;
  double gamma = 0.0;
  int window = 1;
  std::vector<KatokRow> rows;
  std::optional<double> closed_form_entropy;
  double trend = 0.0;  // last estimate minus first
};

/// For each n: Z = heaviest words (ties lexicographic) until mass >= 1 - gamma,
/// then (1/n) log of a maximal separated subset, which sandwiches r_n <= |S| <= s_n.
KatokReport katok_entropy_estimate(const WordSource& src, const MistakeFunction& g, double gamma,
                                   const std::vector<size_t>& n_list, int window = 1);

}  // namespace betalab
