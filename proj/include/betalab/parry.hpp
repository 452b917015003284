#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "betalab/beta.hpp"
#include "betalab/observable.hpp"
#include "betalab/symbols.hpp"

namespace betalab {

/// Natural log of a positive big integer (-inf for zero).
double log_count(const mpz_class& c);

/// Parry's criterion on a finite word: every suffix is lexicographically <= the
/// prefix of w(beta) of the same length.
bool is_admissible(const Digits& word, const BetaNumber& beta);
bool is_admissible(const SymbolWord& word, const BetaNumber& beta);

/// Vertices v_1..v_n of the labelled graph G_beta (0-based index i stands for
/// v_{i+1}). Index n is the frontier vertex v_{n+1}, reachable but not expanded.
class PrefixGraph {
 public:
  PrefixGraph(const BetaNumber& beta, size_t n);

  size_t vertex_count() const { return labels_.size(); }
  Digit forward_label(size_t i) const { return labels_[i]; }
  /// Labels 0..w_i - 1, all targeting v_1.
  std::vector<Digit> back_edges(size_t i) const;
  /// Next vertex when reading d at vertex i, or nullopt if d is not allowed.
  std::optional<size_t> step(size_t i, Digit d) const;
  /// Vertex reached after reading the word from v_1.
  std::optional<size_t> read(const Digits& word) const;
  /// z for vertex i: number of forced zeros before a vertex with a back-edge.
  long z(size_t i) const { return z_[i]; }
  bool z_is_lower_bound(size_t i) const { return z_lower_[i]; }
  const BetaNumber& beta() const { return beta_; }

 private:
  BetaNumber beta_;
  Digits labels_;
  std::vector<long> z_;
  std::vector<bool> z_lower_;
};

/// Reads digits along G_beta from v_1, one at a time. When w(beta) is eventually
/// periodic the vertex index is folded back into the first period, so streams of
/// any length are checked in constant memory.
class AdmissibilityScanner {
 public:
  explicit AdmissibilityScanner(const BetaNumber& beta);

  /// False (and the state is left unchanged) when d cannot be read.
  bool step(Digit d);
  bool read(const Digits& word);
  size_t vertex() const { return v_; }
  void reset(size_t v = 0) { v_ = v; }

 private:
  Digit label(size_t v);

  BetaNumber beta_;
  bool folded_ = false;
  size_t fold_start_ = 0;
  size_t fold_period_ = 0;
  Digits w_;
  size_t v_ = 0;
};

mpz_class count_admissible(const BetaNumber& beta, size_t n);
/// counts[k] for k = 0..n.
std::vector<mpz_class> count_series(const BetaNumber& beta, size_t n);

struct ZReport {
  std::vector<long> z;            // z_1..z_nmax
  std::vector<bool> lower_bound;  // true where the zero run reaches past the known digits
  mpq_class ratio_sup;            // max z_n / n
  size_t ratio_argmax = 0;
  long max_z = 0;
  long max_z_first_half = 0;
  bool max_in_first_half = false;  // window diagnostic: the maximum is already attained in the first half
};

ZReport z_values(const BetaNumber& beta, size_t n_max);
/// Same quantities read off a finite digit prefix (e.g. a gap word).
ZReport z_values(const Digits& prefix, size_t n_max);

/// Zero connector after reading a word: the path 0^len from the reached
/// vertex back to v_1, compared with the reading len = z_{n}(beta) of the
/// connector for c_n = (w_1..w_n).
struct ConnectorInfo {
  size_t vertex = 0;         // 0-based
  long zero_path = 0;        // edges of the zero path back to v_1
  long prefix_reading = 0;   // z of the previous vertex (0 at v_1)
  bool readings_agree = true;
};
ConnectorInfo connector_after(const Digits& word, const PrefixGraph& g);

struct RepairResult {
  SymbolWord word;
  std::optional<size_t> changed;  // 0-based position
};
RepairResult repair_word(const SymbolWord& word, const BetaNumber& beta);

/// The n-step Markov approximation: paths confined to v_1..v_m of G_beta
/// with m the effective index of beta(n).
class MarkovApprox {
 public:
  MarkovApprox(const BetaNumber& base, size_t n);

  const BetaNumber& base() const { return base_; }
  const SimpleApprox& approx() const { return approx_; }
  size_t states() const { return labels_.size(); }
  bool accepts(const Digits& word) const;
  mpz_class count(size_t n) const;
  /// (log c_{2M} - log c_M) / M.
  double entropy_from_counts(size_t m) const;

 private:
  BetaNumber base_;
  SimpleApprox approx_;
  Digits labels_;
};

struct WitnessPair {
  Digits low;
  Digits high;
  double low_average = 0.0;
  double high_average = 0.0;
  size_t candidates = 0;
};

/// v^infinity is in the beta-shift: every shift <= w(beta), compared over
/// max(4p, 64) symbols.
bool periodic_admissible(const Digits& v, const BetaNumber& beta);

/// Admissible periodic words with the smallest and largest per-period
/// averages; NotFound when all averages agree.
WitnessPair periodic_witnesses(const BetaNumber& beta, const Observable& phi, size_t max_period);

}  // namespace betalab
