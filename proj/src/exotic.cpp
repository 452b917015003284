#include "betalab/exotic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "betalab/errors.hpp"
#include "betalab/parry.hpp"

namespace betalab {

namespace {

std::vector<Digits> all_binary(size_t k) {
  std::vector<Digits> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << k); ++m) {
    Digits w(k);
    for (size_t i = 0; i < k; ++i) w[i] = static_cast<Digit>((m >> (k - 1 - i)) & 1U);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

FactorAutomaton::FactorAutomaton(std::vector<Digits> patterns) : patterns_(std::move(patterns)) {
  constexpr std::uint32_t none = UINT32_MAX;
  next_.push_back({none, none});
  hit_.push_back(-1);
  std::vector<long> own{-1};
  for (size_t p = 0; p < patterns_.size(); ++p) {
    const auto& w = patterns_[p];
    longest_ = std::max(longest_, w.size());
    if (w.empty()) throw Error(ErrorKind::Parse, "empty forbidden word");
    std::uint32_t s = 0;
    for (Digit d : w) {
      if (d > 1) throw Error(ErrorKind::AlphabetMismatch, "forbidden words are binary");
      if (next_[s][d] == none) {
        next_[s][d] = static_cast<std::uint32_t>(next_.size());
        next_.push_back({none, none});
        hit_.push_back(-1);
        own.push_back(-1);
      }
      s = next_[s][d];
    }
    if (own[s] < 0 || patterns_[static_cast<size_t>(own[s])].size() < w.size()) own[s] = static_cast<long>(p);
  }
  // Breadth-first completion of the goto function along failure links.
  std::vector<std::uint32_t> fail(next_.size(), 0);
  std::deque<std::uint32_t> queue;
  hit_[0] = own[0];
  for (int d = 0; d < 2; ++d) {
    if (next_[0][d] == none) {
      next_[0][d] = 0;
    } else {
      fail[next_[0][d]] = 0;
      queue.push_back(next_[0][d]);
    }
  }
  while (!queue.empty()) {
    const std::uint32_t s = queue.front();
    queue.pop_front();
    hit_[s] = own[s] >= 0 ? own[s] : hit_[fail[s]];
    for (int d = 0; d < 2; ++d) {
      const std::uint32_t t = next_[s][d];
      if (t == none) {
        next_[s][d] = next_[fail[s]][d];
      } else {
        fail[t] = next_[fail[s]][d];
        queue.push_back(t);
      }
    }
  }
  // Core: states on a bi-infinite path avoiding hit states, by trimming
  // states without successors or predecessors until nothing changes.
  const size_t n = next_.size();
  core_.assign(n, false);
  for (size_t s = 0; s < n; ++s) core_[s] = hit_[s] < 0;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> indeg(n, 0);
    for (size_t s = 0; s < n; ++s)
      if (core_[s])
        for (int d = 0; d < 2; ++d)
          if (core_[next_[s][d]]) ++indeg[next_[s][d]];
    for (size_t s = 0; s < n; ++s) {
      if (!core_[s]) continue;
      const bool out = core_[next_[s][0]] || core_[next_[s][1]];
      if (!out || indeg[s] == 0) {
        core_[s] = false;
        changed = true;
      }
    }
  }
}

std::optional<FactorAutomaton::Match> FactorAutomaton::first_match(const Digits& w) const {
  std::uint32_t s = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    s = next_[s][w[i]];
    if (hit_[s] >= 0) return Match{i + 1, static_cast<size_t>(hit_[s])};
  }
  return std::nullopt;
}

mpz_class FactorAutomaton::count(size_t n) const {
  std::vector<mpz_class> cur(next_.size(), 0), nxt(next_.size(), 0);
  cur[0] = 1;
  for (size_t t = 0; t < n; ++t) {
    std::fill(nxt.begin(), nxt.end(), 0);
    for (size_t s = 0; s < cur.size(); ++s) {
      if (sgn(cur[s]) == 0) continue;
      for (int d = 0; d < 2; ++d) {
        const auto u = next_[s][d];
        if (hit_[u] < 0) nxt[u] += cur[s];
      }
    }
    cur.swap(nxt);
  }
  mpz_class total = 0;
  for (const auto& c : cur) total += c;
  return total;
}

bool FactorAutomaton::in_language(const Digits& w) const {
  for (size_t start = 0; start < next_.size(); ++start) {
    if (!core_[start]) continue;
    std::uint32_t s = static_cast<std::uint32_t>(start);
    bool ok = true;
    for (Digit d : w) {
      s = next_[s][d];
      if (hit_[s] >= 0) {
        ok = false;
        break;
      }
    }
    if (ok && core_[s]) return true;
  }
  return false;
}

NestedShift build_nested(const std::vector<size_t>& N, size_t k_max, size_t pattern_budget) {
  if (k_max < 1 || k_max > N.size()) throw Error(ErrorKind::Parse, "need 1 <= k <= |N|");
  if (N[0] < 3) throw Error(ErrorKind::Parse, "N_1 must be >= 3");
  for (size_t i = 1; i < k_max; ++i)
    if (N[i] <= N[i - 1]) throw Error(ErrorKind::NotIncreasing, "N must be strictly increasing");
  NestedShift s;
  s.N.assign(N.begin(), N.begin() + static_cast<long>(k_max));
  s.automata.emplace_back();
  std::vector<Digits> all;
  size_t symbols = 0;
  for (size_t k = 1; k <= k_max; ++k) {
    std::vector<Digits> fk;
    if (k == 1) {
      fk.push_back(Digits(N[0], 1));
      fk.push_back(Digits(N[0], 0));
    } else {
      if (std::ldexp(1.0, static_cast<int>(k)) * static_cast<double>(k * N[k - 1]) > static_cast<double>(pattern_budget))
        throw Error(ErrorKind::BudgetExceeded, "forbidden list for level " + std::to_string(k) + " is too large");
      for (const auto& v : all_binary(k)) {
        if (!s.automata[k - 1].in_language(v)) continue;
        Digits p;
        for (size_t r = 0; r < N[k - 1]; ++r) p.insert(p.end(), v.begin(), v.end());
        fk.push_back(std::move(p));
      }
    }
    for (const auto& p : fk) symbols += p.size();
    if (symbols > pattern_budget) throw Error(ErrorKind::BudgetExceeded, "forbidden words exceed the budget");
    all.insert(all.end(), fk.begin(), fk.end());
    s.F.push_back(std::move(fk));
    s.automata.emplace_back(all);
  }
  return s;
}

bool FactorAutomaton::covers(const Digits& w, size_t i) const {
  if (longest_ == 0 || i >= w.size()) return false;
  const size_t lo = i + 1 >= longest_ ? i + 1 - longest_ : 0;
  const size_t hi = std::min(w.size(), i + longest_);
  std::uint32_t s = 0;
  for (size_t e = lo; e < hi; ++e) {
    s = next_[s][w[e]];
    // Only the longest pattern ending here matters: shorter ones start later.
    if (e >= i && hit_[s] >= 0 && e + 1 - patterns_[static_cast<size_t>(hit_[s])].size() <= i) return true;
  }
  return false;
}

PeriodicReport no_short_periodics(const NestedShift& s, size_t level, size_t max_period) {
  if (level > s.levels()) throw Error(ErrorKind::Parse, "level exceeds the constructed levels");
  if (max_period == 0) max_period = level;
  if (max_period > 20) throw Error(ErrorKind::BudgetExceeded, "period enumeration is capped at 20");
  const auto& fa = s.automata[level];
  size_t longest = 1;
  for (const auto& p : fa.patterns()) longest = std::max(longest, p.size());
  PeriodicReport rep;
  for (size_t q = 1; q <= max_period; ++q) {
    for (const auto& v : all_binary(q)) {
      Digits w;
      while (w.size() < longest + 2 * q) w.insert(w.end(), v.begin(), v.end());
      PeriodicCheck c;
      c.period = v;
      if (auto m = fa.first_match(w)) {
        c.excluded = true;
        c.breaking = fa.patterns()[m->pattern];
        c.position = m->end - c.breaking.size();
      } else {
        rep.none_survive = false;
      }
      rep.candidates.push_back(std::move(c));
    }
  }
  return rep;
}

size_t clean_edit_positions(const Digits& w, const NestedShift& s, size_t level) {
  const auto& fa = s.automata.at(level);
  Digits x = w;
  size_t good = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] ^= 1U;
    if (!fa.covers(x, i)) ++good;
    x[i] ^= 1U;
  }
  return good;
}

RepairReport single_edit_repair(const Digits& word, const NestedShift& s, size_t level) {
  const auto& fa = s.automata.at(level);
  RepairReport rep;
  rep.word = word;
  bool first = true;
  // Each clean edit removes at least one occurrence and creates none, so the
  // loop runs at most |word| times per occurrence.
  while (auto m = fa.first_match(rep.word)) {
    const size_t len = fa.patterns()[m->pattern].size();
    const size_t start = m->end - len;
    std::optional<size_t> pick;
    for (size_t i = start; i < m->end; ++i) {
      rep.word[i] ^= 1U;
      const bool clean = !fa.covers(rep.word, i);
      rep.word[i] ^= 1U;
      if (!clean) continue;
      if (!pick) pick = i;
      if (!first) break;
      ++rep.working_positions;
    }
    if (first) rep.occurrence_length = len;
    first = false;
    if (!pick)
      throw Error(ErrorKind::NoSingleEditFound, "no single entry of the occurrence at " + std::to_string(start) +
                                                    " can be changed cleanly");
    rep.word[*pick] ^= 1U;
    rep.edits.push_back({*pick, rep.word[*pick]});
  }
  rep.changed = !rep.edits.empty();
  return rep;
}

namespace {

double rate_of(const FactorAutomaton& fa, size_t n, std::vector<mpz_class>* counts) {
  mpz_class c = 0;
  for (size_t m = 1; m <= n; ++m) {
    c = fa.count(m);
    if (counts) counts->push_back(c);
  }
  if (sgn(c) == 0) return 0.0;
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, c.get_mpz_t());
  return (std::log(mant) + static_cast<double>(exp) * std::log(2.0)) / static_cast<double>(n);
}

}  // namespace

NestedEntropyReport nested_entropy_report(const NestedShift& s, size_t level, size_t n_max) {
  if (level > s.levels()) throw Error(ErrorKind::Parse, "level exceeds the constructed levels");
  if (n_max == 0) throw Error(ErrorKind::Parse, "n_max must be positive");
  NestedEntropyReport rep;
  rep.positivity_floor = std::log(2.0);
  for (size_t i = 0; i <= level; ++i) {
    LevelEntropy le;
    le.level = i;
    le.rate = rate_of(s.automata[i], n_max, &le.counts);
    if (i > 0) {
      le.epsilon = std::log(2.0) / std::ldexp(1.0, static_cast<int>(i + 1));
      rep.positivity_floor -= le.epsilon;
      le.drop = rep.levels.back().rate - le.rate;
      le.drop_ok = le.drop <= le.epsilon;
      if (!le.drop_ok) {
        // Smallest N_i (earlier levels kept) whose drop passes at this horizon;
        // once i * N_i > n_max nothing new is forbidden, so this terminates.
        for (size_t cand = i == 1 ? 3 : s.N[i - 2] + 1;; ++cand) {
          std::vector<size_t> trial(s.N.begin(), s.N.begin() + static_cast<long>(i));
          trial[i - 1] = cand;
          bool increasing = true;
          for (size_t a = 1; a < trial.size(); ++a) increasing = increasing && trial[a] > trial[a - 1];
          if (!increasing) continue;
          const auto t = build_nested(trial, i);
          if (rep.levels.back().rate - rate_of(t.automata[i], n_max, nullptr) <= le.epsilon) {
            le.minimal_passing_N = cand;
            break;
          }
        }
      }
    }
    rep.levels.push_back(std::move(le));
  }
  rep.deepest_rate = rep.levels.back().rate;
  return rep;
}

}  // namespace betalab
