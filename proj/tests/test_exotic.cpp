#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <set>

#include "betalab/errors.hpp"
#include "betalab/exotic.hpp"
#include "oracles.hpp"

using namespace betalab;

namespace {

Digits power(const Digits& v, size_t k) {
  Digits w;
  for (size_t i = 0; i < k; ++i) w.insert(w.end(), v.begin(), v.end());
  return w;
}

bool has_factor(const Digits& w, const Digits& f) {
  if (f.size() > w.size()) return false;
  for (size_t i = 0; i + f.size() <= w.size(); ++i)
    if (std::equal(f.begin(), f.end(), w.begin() + static_cast<long>(i))) return true;
  return false;
}

// Direct substring scan against the listed forbidden words.
bool avoids_all(const Digits& w, const NestedShift& s, size_t level) {
  for (size_t i = 0; i < level; ++i)
    for (const auto& f : s.F[i])
      if (has_factor(w, f)) return false;
  return true;
}

}  // namespace

TEST(NestedShift, FirstLevels) {
  const auto s = build_nested({4, 6}, 2);
  ASSERT_EQ(s.levels(), 2u);
  const std::set<Digits> f1(s.F[0].begin(), s.F[0].end());
  EXPECT_EQ(f1, (std::set<Digits>{{1, 1, 1, 1}, {0, 0, 0, 0}}));
  // Every length-2 word occurs in the first shift, so all four powers appear.
  std::set<Digits> f2(s.F[1].begin(), s.F[1].end());
  std::set<Digits> want;
  for (const auto& v : oracle::all_words(2, 1)) want.insert(power(v, 6));
  EXPECT_EQ(f2, want);
}

TEST(NestedShift, BadParameters) {
  EXPECT_THROW(build_nested({4, 4}, 2), Error);
  EXPECT_THROW(build_nested({2}, 1), Error);
  EXPECT_THROW(build_nested({4}, 2), Error);
  try {
    build_nested({5, 3}, 2);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotIncreasing);
  }
}

TEST(NestedShift, AutomatonMatchesSubstringScan) {
  const auto s = build_nested({4, 6, 8}, 3);
  for (size_t n = 1; n <= 14; ++n) {
    for (const auto& w : oracle::all_words(n, 1)) {
      for (size_t lvl = 0; lvl <= 3; ++lvl) ASSERT_EQ(s.admissible(w, lvl), avoids_all(w, s, lvl));
      // Nesting: later levels forbid more.
      if (s.admissible(w, 2)) ASSERT_TRUE(s.admissible(w, 1));
      if (s.admissible(w, 3)) ASSERT_TRUE(s.admissible(w, 2));
      if (s.automata[3].in_language(w)) ASSERT_TRUE(s.automata[2].in_language(w));
    }
  }
}

TEST(NestedShift, CountAgreesWithBruteForce) {
  const auto s = build_nested({4, 6}, 2);
  for (size_t lvl = 0; lvl <= 2; ++lvl) {
    long brute = 0;
    for (const auto& w : oracle::all_words(12, 1)) brute += avoids_all(w, s, lvl) ? 1 : 0;
    EXPECT_EQ(s.automata[lvl].count(12), brute) << lvl;
  }
  EXPECT_EQ(s.automata[0].count(12), 4096);
}

TEST(NestedShift, LanguageOfFirstShift) {
  // Any word without a run of four extends both ways by alternation.
  const auto s = build_nested({4}, 1);
  for (size_t n = 1; n <= 10; ++n)
    for (const auto& w : oracle::all_words(n, 1)) ASSERT_EQ(s.automata[1].in_language(w), s.admissible(w, 1));
}

namespace {

// Independent language oracle on the higher block graph: vertices are the
// admissible words of length M - 1, trimmed to those on bi-infinite paths.
struct BlockGraphLanguage {
  const NestedShift& s;
  size_t level, m;
  std::set<Digits> core;

  BlockGraphLanguage(const NestedShift& sh, size_t lvl) : s(sh), level(lvl), m(1) {
    for (size_t i = 0; i < lvl; ++i)
      for (const auto& f : s.F[i]) m = std::max(m, f.size());
    for (const auto& v : oracle::all_words(m - 1, 1))
      if (avoids_all(v, s, level)) core.insert(v);
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = core.begin(); it != core.end();) {
        bool in = false, out = false;
        for (Digit d : {0, 1}) {
          Digits nx(it->begin() + 1, it->end());
          nx.push_back(d);
          Digits e = *it;
          e.push_back(d);
          out = out || (core.count(nx) && avoids_all(e, s, level));
          Digits pv{d};
          pv.insert(pv.end(), it->begin(), it->end() - 1);
          Digits e2{d};
          e2.insert(e2.end(), it->begin(), it->end());
          in = in || (core.count(pv) && avoids_all(e2, s, level));
        }
        if (!in || !out) {
          it = core.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
  }

  bool contains(const Digits& w) const {
    const size_t pad = m - 1;
    for (const auto& u : core) {
      for (const auto& v : core) {
        Digits x = u;
        x.insert(x.end(), w.begin(), w.end());
        x.insert(x.end(), v.begin(), v.end());
        if (!avoids_all(x, s, level)) continue;
        bool ok = true;
        for (size_t i = 0; ok && i + pad <= x.size(); ++i)
          ok = core.count(Digits(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(i + pad))) > 0;
        if (ok) return true;
      }
    }
    return false;
  }
};

}  // namespace

TEST(NestedShift, LanguageAgreesWithBlockGraph) {
  const auto t = build_nested({3, 4}, 2);
  const BlockGraphLanguage oracle_lang(t, 2);
  size_t differ = 0;
  for (size_t n = 1; n <= 9; ++n)
    for (const auto& w : oracle::all_words(n, 1)) {
      const bool in = t.automata[2].in_language(w);
      ASSERT_EQ(in, oracle_lang.contains(w)) << format_digits(w);
      differ += in != t.admissible(w, 2);
    }
  // Here every locally admissible word extends.
  EXPECT_EQ(differ, 0u);
  // A shift with no points at all: 0 must be followed by 1, 01 by 0.
  const FactorAutomaton empty({{0, 0}, {1, 1}, {0, 1, 0}});
  EXPECT_TRUE(empty.avoids({0, 1}));
  EXPECT_FALSE(empty.in_language({0, 1}));
  EXPECT_FALSE(empty.in_language({1}));
  // Forbidding 01 leaves 1...10...0: 10 extends, 0 then 1 never reappears.
  const FactorAutomaton stairs({{0, 1}});
  EXPECT_TRUE(stairs.in_language({1, 1, 0, 0}));
  EXPECT_FALSE(stairs.in_language({0, 1}));
}

TEST(Periodics, NoShortPeriodsSurvive) {
  const auto s = build_nested({4, 6, 8}, 3);
  for (size_t lvl = 1; lvl <= 3; ++lvl) {
    const auto rep = no_short_periodics(s, lvl);
    EXPECT_TRUE(rep.none_survive) << lvl;
    for (const auto& c : rep.candidates) EXPECT_TRUE(c.excluded);
  }
  // Period 3 still lives at level 2: 001 repeated has no forbidden factor.
  const auto rep = no_short_periodics(s, 2, 3);
  EXPECT_FALSE(rep.none_survive);
}

TEST(Repair, IdentityOnAdmissibleWords) {
  const auto s = build_nested({4, 6}, 2);
  const Digits w{0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1};
  ASSERT_TRUE(s.admissible(w, 2));
  const auto r = single_edit_repair(w, s, 2);
  EXPECT_EQ(r.word, w);
  EXPECT_FALSE(r.changed);
  EXPECT_TRUE(r.edits.empty());
}

TEST(Repair, AbundanceOnForbiddenPowers) {
  const auto s = build_nested({4, 6}, 2);
  for (size_t lvl = 0; lvl < 2; ++lvl) {
    for (const auto& w : s.F[lvl]) {
      const auto good = clean_edit_positions(w, s, 2);
      EXPECT_GE(static_cast<double>(good), static_cast<double>(w.size()) * (1.0 - 2.0 / 4.0));
      const auto r = single_edit_repair(w, s, 2);
      EXPECT_TRUE(s.admissible(r.word, 2));
      EXPECT_TRUE(r.changed);
      EXPECT_GE(r.working_positions, 1u);
    }
  }
}

TEST(Repair, RandomWordsEndAdmissible) {
  const auto s = build_nested({4, 6, 8}, 3);
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    Digits w(40);
    for (auto& d : w) d = static_cast<Digit>(rng() & 1U);
    const auto r = single_edit_repair(w, s, 3);
    ASSERT_TRUE(s.admissible(r.word, 3));
    size_t diff = 0;
    for (size_t i = 0; i < w.size(); ++i) diff += w[i] != r.word[i];
    ASSERT_LE(diff, r.edits.size());
  }
}

TEST(Entropy, FullShiftAndDrops) {
  const auto s0 = build_nested({4}, 1);
  const auto r0 = nested_entropy_report(s0, 0, 16);
  EXPECT_NEAR(r0.levels[0].rate, std::log(2.0), 1e-12);

  const auto s = build_nested({4, 6, 8}, 3);
  const auto rep = nested_entropy_report(s, 3, 40);
  for (size_t i = 1; i < rep.levels.size(); ++i) {
    EXPECT_LE(rep.levels[i].rate, rep.levels[i - 1].rate + 1e-12);
    EXPECT_NEAR(rep.levels[i].epsilon, std::log(2.0) / std::ldexp(1.0, static_cast<int>(i + 1)), 1e-15);
  }
  EXPECT_GT(rep.deepest_rate, 0.0);

  // Larger N_2 forbids less, so the second drop can only shrink.
  double prev = 1e9;
  for (size_t n2 : {6, 8, 12}) {
    const auto t = build_nested({4, n2}, 2);
    const auto d = nested_entropy_report(t, 2, 40).levels[2].drop;
    EXPECT_LE(d, prev + 1e-12) << n2;
    prev = d;
  }
}

TEST(Entropy, MinimalPassingNWhenDropFails) {
  // N_1 = 3 cuts the full shift down to log of the tribonacci-like root.
  const auto s = build_nested({3}, 1);
  const auto rep = nested_entropy_report(s, 1, 30);
  if (!rep.levels[1].drop_ok) {
    ASSERT_TRUE(rep.levels[1].minimal_passing_N.has_value());
    EXPECT_GT(*rep.levels[1].minimal_passing_N, 3u);
  } else {
    EXPECT_FALSE(rep.levels[1].minimal_passing_N.has_value());
  }
}
