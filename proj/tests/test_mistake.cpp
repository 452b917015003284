#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "betalab/errors.hpp"
#include "betalab/mistake.hpp"
#include "oracles.hpp"

using namespace betalab;

namespace {

Digits D(const char* s) { return parse_digits(s); }

// Literal definition: some index set of size >= n - g on which every window agrees.
bool ball_by_index_sets(const Digits& x, const Digits& y, long g, int m) {
  const size_t n = x.size();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<long>(__builtin_popcount(mask)) < static_cast<long>(n) - g) continue;
    bool ok = true;
    for (size_t j = 0; j < n && ok; ++j) {
      if (!(mask >> j & 1u)) continue;
      for (size_t i = j; i < std::min(n, j + static_cast<size_t>(m)); ++i)
        if (x[i] != y[i]) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

size_t brute_separated(const SeparationInstance& inst) {
  const size_t k = inst.words.size();
  const long g = inst.g(inst.length());
  size_t best = 0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    bool ok = true;
    for (size_t a = 0; a < k && ok; ++a)
      for (size_t b = a + 1; b < k && ok; ++b)
        if ((mask >> a & 1u) && (mask >> b & 1u) &&
            ball_by_index_sets(inst.words[a], inst.words[b], g, inst.window))
          ok = false;
    if (ok) best = std::max<size_t>(best, __builtin_popcount(mask));
  }
  return best;
}

size_t brute_spanning(const SeparationInstance& inst) {
  const size_t k = inst.words.size();
  const long g = inst.g(inst.length());
  size_t best = k;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    bool ok = true;
    for (size_t z = 0; z < k && ok; ++z) {
      bool hit = false;
      for (size_t c = 0; c < k && !hit; ++c)
        if ((mask >> c & 1u) && ball_by_index_sets(inst.words[c], inst.words[z], g, inst.window)) hit = true;
      ok = hit;
    }
    if (ok) best = std::min<size_t>(best, __builtin_popcount(mask));
  }
  return best;
}

SeparationInstance cube3(long g) {
  SeparationInstance inst;
  inst.words = oracle::all_words(3, 1);
  inst.g = MistakeFunction::constant(g);
  return inst;
}

SeparationInstance random_instance(std::mt19937& rng) {
  SeparationInstance inst;
  const size_t n = 1 + rng() % 10;
  const size_t k = 1 + rng() % 12;
  const int b = 1 + static_cast<int>(rng() % 2);
  for (size_t i = 0; i < k; ++i) {
    Digits w(n);
    for (auto& d : w) d = static_cast<Digit>(rng() % (b + 1));
    inst.words.push_back(w);
  }
  inst.window = 1 + static_cast<int>(rng() % 3);
  inst.g = MistakeFunction::constant(static_cast<long>(rng() % 3));
  return inst;
}

}  // namespace

TEST(MistakeFunction, ParseAndValues) {
  EXPECT_EQ(MistakeFunction::parse("zero")(100), 0);
  EXPECT_EQ(MistakeFunction::parse("const:3")(7), 3);
  EXPECT_EQ(MistakeFunction::parse("log")(14), 4);
  EXPECT_EQ(MistakeFunction::parse("log")(16), 4);
  EXPECT_EQ(MistakeFunction::parse("log")(17), 5);
  EXPECT_EQ(MistakeFunction::parse("sqrt")(15), 3);
  EXPECT_EQ(MistakeFunction::parse("2*log")(14), 8);
  EXPECT_EQ(MistakeFunction::parse("2*const:1").name(), "2*const:1");
  EXPECT_THROW(MistakeFunction::parse("const:x"), Error);
  EXPECT_THROW(MistakeFunction::parse("linear"), Error);
}

TEST(MistakeFunction, Validation) {
  for (const char* s : {"zero", "const:2", "log", "sqrt"}) {
    const auto v = MistakeFunction::parse(s).validate(4, 4096, 0.6);
    EXPECT_TRUE(v.monotone) << s;
    EXPECT_TRUE(v.sublinear) << s;
  }
}

TEST(MistakeBall, Examples) {
  const Digits x = D("01101");
  EXPECT_TRUE(mistake_ball_contains(x, x, MistakeFunction::zero(), 1));
  EXPECT_FALSE(mistake_ball_contains(x, D("01100"), MistakeFunction::zero(), 1));
  const auto g2 = MistakeFunction::constant(2);
  EXPECT_TRUE(mistake_ball_contains(D("00000"), D("01010"), g2, 1));
  EXPECT_FALSE(mistake_ball_contains(D("00000"), D("01011"), g2, 1));
  EXPECT_THROW(mistake_ball_contains(D("00"), D("000"), g2, 1), Error);
}

TEST(MistakeBall, AgreesWithIndexSetDefinition) {
  std::mt19937 rng(7);
  for (int t = 0; t < 3000; ++t) {
    const size_t n = 1 + rng() % 9;
    Digits x(n), y(n);
    for (size_t i = 0; i < n; ++i) x[i] = rng() % 2, y[i] = rng() % 3 == 0 ? 1 - x[i] : x[i];
    const int m = 1 + static_cast<int>(rng() % 4);
    const long g = static_cast<long>(rng() % 4);
    EXPECT_EQ(mistake_ball_contains(x, y, MistakeFunction::constant(g), m), ball_by_index_sets(x, y, g, m));
  }
}

TEST(Separation, HammingCube) {
  EXPECT_EQ(max_separated(cube3(0)).size, 8u);
  EXPECT_EQ(max_separated(cube3(1)).size, 4u);
  EXPECT_EQ(max_separated(cube3(2)).size, 2u);
  EXPECT_EQ(min_spanning(cube3(0)).size, 8u);
  EXPECT_EQ(min_spanning(cube3(1)).size, 2u);
  EXPECT_LE(max_separated(cube3(2)).size, min_spanning(cube3(1)).size);
  // g = 1 separated sets are codes of minimum distance 2.
  const auto inst = cube3(1);
  for (size_t i : max_separated(inst).witness)
    for (size_t j : max_separated(inst).witness)
      if (i != j) EXPECT_GE(hamming(inst.words[i], inst.words[j]), 2u);
}

TEST(Separation, BruteForceAndLemmas) {
  std::mt19937 rng(2024);
  for (int t = 0; t < 150; ++t) {
    auto inst = random_instance(rng);
    const auto s = max_separated(inst);
    const auto r = min_spanning(inst);
    ASSERT_TRUE(s.exact && r.exact);
    EXPECT_EQ(s.size, brute_separated(inst));
    EXPECT_EQ(r.size, brute_spanning(inst));
    EXPECT_TRUE(is_separated(inst, s.witness));
    EXPECT_TRUE(is_spanning(inst, s.witness));  // maximal separated sets span
    EXPECT_TRUE(is_spanning(inst, r.witness));

    SeparationInstance zero = inst;
    zero.g = MistakeFunction::zero();
    EXPECT_LE(r.size, s.size);
    EXPECT_LE(s.size, max_separated(zero).size);

    SeparationInstance dbl = inst;
    dbl.g = inst.g.scaled(2);
    EXPECT_LE(max_separated(dbl).size, r.size);
    dbl.window = std::max(1, inst.window - 1);
    EXPECT_LE(max_separated(dbl).size, r.size);
  }
}

TEST(Separation, BudgetAndGreedy) {
  SeparationInstance inst;
  inst.words = oracle::all_words(5, 1);  // 32 words
  inst.g = MistakeFunction::constant(1);
  EXPECT_THROW(max_separated(inst), Error);
  EXPECT_THROW(min_spanning(inst), Error);
  const auto lower = max_separated(inst, false);
  EXPECT_FALSE(lower.exact);
  EXPECT_TRUE(is_separated(inst, lower.witness));
  EXPECT_TRUE(is_spanning(inst, min_spanning(inst, false).witness));
  inst.words.push_back(D("0101"));
  EXPECT_THROW(inst.validate(), Error);
}

TEST(Katok, FullShiftMatchesLogTwo) {
  const auto src = uniform_admissible(BetaNumber::from_decimal("2"));
  const auto rep = katok_entropy_estimate(src, MistakeFunction::zero(), 0.1, {10, 12, 14});
  // |Z| = ceil(0.9 * 2^n) exactly.
  EXPECT_EQ(rep.rows.back().z_size, static_cast<size_t>(std::ceil(0.9 * 16384)));
  EXPECT_NEAR(rep.rows.back().estimate, std::log(2.0), 0.05);
  EXPECT_NEAR(*rep.closed_form_entropy, std::log(2.0), 1e-12);
}

TEST(Katok, GoldenUniformCountsFibonacci) {
  const auto src = uniform_admissible(oracle::golden_beta());
  const auto words = src.words(12);
  EXPECT_EQ(words.size(), 377u);
  for (const auto& [w, p] : words)
    for (size_t i = 0; i + 1 < w.size(); ++i) EXPECT_FALSE(w[i] == 1 && w[i + 1] == 1);
}

TEST(Katok, SingleWordAndBernoulli) {
  const auto one = katok_entropy_estimate(single_word(D("0110")), MistakeFunction::parse("log"), 0.1, {4, 8});
  EXPECT_EQ(one.rows.back().estimate, 0.0);
  const auto b = bernoulli({0.75, 0.25});
  EXPECT_NEAR(*b.closed_form_entropy, -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)), 1e-12);
  const auto rep = katok_entropy_estimate(b, MistakeFunction::zero(), 0.1, {12});
  // The heaviest words come first.
  EXPECT_EQ(rep.rows[0].z_sample[0], Digits(12, 0));
  EXPECT_GE(rep.rows[0].z_mass, 0.9);
  EXPECT_THROW(katok_entropy_estimate(b, MistakeFunction::zero(), 1.5, {4}), Error);
}

TEST(Katok, MistakesOnlyShrinkTheCount) {
  const auto src = uniform_admissible(BetaNumber::from_decimal("2"));
  const auto rep = katok_entropy_estimate(src, MistakeFunction::parse("log"), 0.1, {8, 10});
  for (const auto& row : rep.rows) {
    EXPECT_LE(row.separated, row.separated_zero);
    EXPECT_GT(row.separated, 1u);
  }
}
