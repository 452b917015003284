#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "betalab/symbols.hpp"

namespace betalab {

/// Aho-Corasick automaton over a binary alphabet. States whose string ends in
/// a pattern are "hit" states; paths avoiding them spell pattern-free words.
class FactorAutomaton {
 public:
  FactorAutomaton() : FactorAutomaton(std::vector<Digits>{}) {}
  explicit FactorAutomaton(std::vector<Digits> patterns);

  struct Match {
    size_t end = 0;  // one past the last symbol of the occurrence
    size_t pattern = 0;
  };
  /// Leftmost-ending occurrence of any pattern.
  std::optional<Match> first_match(const Digits& w) const;
  bool avoids(const Digits& w) const { return !first_match(w); }
  /// Words of length n avoiding every pattern (locally admissible words).
  mpz_class count(size_t n) const;
  /// w is a factor of some bi-infinite pattern-free sequence.
  bool in_language(const Digits& w) const;
  /// Some occurrence in w contains position i.
  bool covers(const Digits& w, size_t i) const;

  const std::vector<Digits>& patterns() const { return patterns_; }
  size_t states() const { return next_.size(); }

 private:
  std::vector<Digits> patterns_;
  std::vector<std::array<std::uint32_t, 2>> next_;
  std::vector<long> hit_;  // longest pattern ending at the state, or -1
  std::vector<bool> core_;
  size_t longest_ = 0;
};

struct NestedShift {
  std::vector<size_t> N;                  // N_1 < N_2 < ...
  std::vector<std::vector<Digits>> F;     // F_1..F_k
  std::vector<FactorAutomaton> automata;  // automata[i]: Sigma_i (automata[0] is the full shift)

  size_t levels() const { return F.size(); }
  bool admissible(const Digits& w, size_t level) const { return automata.at(level).avoids(w); }
};

/// F_1 = {1^{N_1}, 0^{N_1}}; F_i = {v^{N_i} : v in the language of Sigma_{i-1}, |v| = i}.
NestedShift build_nested(const std::vector<size_t>& N, size_t k_max, size_t pattern_budget = 1000000);

struct PeriodicCheck {
  Digits period;
  bool excluded = false;
  Digits breaking;          // forbidden factor found in period^infinity
  size_t position = 0;      // where it starts
};

struct PeriodicReport {
  std::vector<PeriodicCheck> candidates;
  bool none_survive = true;
};

/// Every period word of length <= max_period (default: the level) is checked.
PeriodicReport no_short_periodics(const NestedShift& s, size_t level, size_t max_period = 0);

struct SingleEdit {
  size_t position = 0;
  Digit symbol = 0;
};

struct RepairReport {
  Digits word;
  std::vector<SingleEdit> edits;
  size_t working_positions = 0;  // single edits that clear the first occurrence
  size_t occurrence_length = 0;
  bool changed = false;
};

/// Left to right: find the first forbidden occurrence, flip one of its entries
/// so that no forbidden factor covers the edit, rescan. NoSingleEditFound when
/// no entry of an occurrence works.
/// Positions of w whose flip leaves no forbidden factor (up to the level)
/// through that position.
size_t clean_edit_positions(const Digits& w, const NestedShift& s, size_t level);

RepairReport single_edit_repair(const Digits& word, const NestedShift& s, size_t level);

struct LevelEntropy {
  size_t level = 0;
  std::vector<mpz_class> counts;  // n = 1..n_max
  double rate = 0.0;              // (1/n_max) log count(n_max)
  double drop = 0.0;              // previous level's rate minus this one
  double epsilon = 0.0;           // log 2 / 2^{level+1}
  bool drop_ok = true;
  std::optional<size_t> minimal_passing_N;  // searched when the drop is too large
};

struct NestedEntropyReport {
  std::vector<LevelEntropy> levels;  // level 0 is the full shift
  double deepest_rate = 0.0;
  double positivity_floor = 0.0;     // log 2 - sum of epsilons
};

NestedEntropyReport nested_entropy_report(const NestedShift& s, size_t level, size_t n_max);

}  // namespace betalab
