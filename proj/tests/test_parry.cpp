#include <gtest/gtest.h>

#include <cmath>

#include "betalab/errors.hpp"
#include "betalab/parry.hpp"
#include "oracles.hpp"

using namespace betalab;

namespace {

Digits D(const char* s) { return parse_digits(s); }

// Reference w(beta) prefixes typed in or derived independently of the library.
Digits reference_w(size_t which, size_t n) {
  switch (which) {
    case 0: return Digits(n, 1);
    case 1: return oracle::golden_one(n);
    case 2: {
      Digits w;
      for (size_t i = 0; i < n; ++i) w.push_back(i % 3 == 2 ? 0 : 1);
      return w;
    }
    default: {
      Digits w{2, 0};
      for (size_t i = 2; i < n; ++i) w.push_back((i - 2) % 3 == 0 ? 1 : 0);
      w.resize(n);
      return w;
    }
  }
}

mpz_class fibonacci(long k) {
  mpz_class r;
  mpz_fib_ui(r.get_mpz_t(), static_cast<unsigned long>(k));
  return r;
}

}  // namespace

TEST(IsAdmissible, Examples) {
  const auto two = BetaNumber::from_decimal("2");
  for (const auto& w : oracle::all_words(8, 1)) EXPECT_TRUE(is_admissible(w, two));
  const auto phi = oracle::golden_beta();
  EXPECT_FALSE(is_admissible(D("11"), phi));
  EXPECT_TRUE(is_admissible(D("1010"), phi));
  const auto fig = oracle::figure_beta();
  EXPECT_FALSE(is_admissible(D("21"), fig));
  EXPECT_TRUE(is_admissible(D("201001"), fig));
  EXPECT_THROW(is_admissible(D("3"), fig), Error);
  try {
    is_admissible(D("2"), two);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AlphabetMismatch);
  }
}

TEST(IsAdmissible, BatteryAgainstLiteralCriterionAndGraph) {
  const auto battery = oracle::battery();
  for (size_t k = 0; k < battery.size(); ++k) {
    const auto& beta = battery[k];
    const Digits ref = reference_w(k, 12);
    EXPECT_EQ(beta.w_prefix(12), ref);
    const PrefixGraph g(beta, 12);
    for (size_t len = 0; len <= (beta.digit_bound() == 2 ? 9u : 12u); ++len) {
      for (const auto& w : oracle::all_words(len, beta.digit_bound())) {
        const bool lit = oracle::parry_literal(w, ref);
        EXPECT_EQ(is_admissible(w, beta), lit) << format_digits(w);
        EXPECT_EQ(g.read(w).has_value(), lit) << format_digits(w);
      }
    }
  }
}

TEST(PrefixGraph, FigureStructure) {
  const PrefixGraph g(oracle::figure_beta(), 6);
  EXPECT_EQ(g.back_edges(0), (std::vector<Digit>{0, 1}));
  EXPECT_TRUE(g.back_edges(1).empty());
  EXPECT_EQ(g.back_edges(2), (std::vector<Digit>{0}));
  EXPECT_EQ(g.forward_label(0), 2);
  const PrefixGraph two(BetaNumber::from_decimal("2"), 5);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(two.forward_label(i), 1);
    EXPECT_EQ(two.back_edges(i), std::vector<Digit>{0});
  }
  const PrefixGraph gp(oracle::golden_beta(), 8);
  for (size_t i = 0; i < 8; ++i) EXPECT_EQ(gp.back_edges(i).size(), i % 2 == 0 ? 1u : 0u);
}

TEST(PrefixGraph, DeterministicLabels) {
  for (const auto& beta : oracle::battery()) {
    const PrefixGraph g(beta, 20);
    for (size_t i = 0; i < 20; ++i) {
      auto labels = g.back_edges(i);
      labels.push_back(g.forward_label(i));
      std::sort(labels.begin(), labels.end());
      EXPECT_EQ(std::adjacent_find(labels.begin(), labels.end()), labels.end());
    }
  }
}

TEST(CountAdmissible, ClosedForms) {
  const auto two = BetaNumber::from_decimal("2");
  EXPECT_EQ(count_admissible(two, 5), 32);
  for (size_t n = 1; n <= 20; ++n) EXPECT_EQ(count_admissible(two, n), mpz_class(1) << n);
  const auto phi = oracle::golden_beta();
  EXPECT_EQ(count_admissible(phi, 5), 13);
  EXPECT_EQ(count_admissible(phi, 10), 144);
  for (size_t n = 1; n <= 30; ++n) EXPECT_EQ(count_admissible(phi, n), fibonacci(static_cast<long>(n) + 2));
}

TEST(CountAdmissible, MatchesBruteForce) {
  const auto battery = oracle::battery();
  for (size_t k = 0; k < battery.size(); ++k) {
    const auto& beta = battery[k];
    const size_t top = beta.digit_bound() == 2 ? 8 : 16;
    const Digits ref = reference_w(k, top);
    const auto series = count_series(beta, top);
    for (size_t n = 1; n <= top; ++n) {
      long brute = 0;
      for (const auto& w : oracle::all_words(n, beta.digit_bound())) brute += oracle::parry_literal(w, ref);
      EXPECT_EQ(series[n], brute) << beta.describe() << " n=" << n;
    }
  }
}

TEST(CountAdmissible, GrowthSandwich) {
  for (const auto& beta : oracle::battery()) {
    const auto series = count_series(beta, 40);
    const double lb = beta.log_value();
    double prev = INFINITY;
    for (size_t n = 1; n <= 40; ++n) {
      const double r = log_count(series[n]) / static_cast<double>(n);
      EXPECT_LE(r, prev + 1e-12);
      // beta^n <= count <= beta^{n+1}/(beta-1)
      EXPECT_GE(log_count(series[n]) + 1e-9, static_cast<double>(n) * lb);
      EXPECT_LE(log_count(series[n]), static_cast<double>(n + 1) * lb - std::log(beta.approx() - 1) + 1e-9);
      prev = r;
    }
    EXPECT_LT(log_count(series[40]) / 40.0 - lb, 0.02) << beta.describe();
  }
}

TEST(ZValues, Examples) {
  const auto zt = z_values(BetaNumber::from_decimal("2"), 50);
  EXPECT_EQ(zt.max_z, 0);
  EXPECT_EQ(zt.ratio_sup, 0);
  EXPECT_TRUE(zt.max_in_first_half);
  const auto zp = z_values(oracle::golden_beta(), 40);
  for (size_t n = 1; n <= 40; ++n) EXPECT_EQ(zp.z[n - 1], n % 2 == 1 ? 0 : 1);
  EXPECT_EQ(zp.ratio_sup, mpq_class(1, 2));
  EXPECT_EQ(zp.ratio_argmax, 2u);
  EXPECT_TRUE(zp.max_in_first_half);
  const auto zf = z_values(oracle::figure_beta(), 6);
  EXPECT_EQ(zf.z[3], 2);
}

TEST(ZValues, GapWord) {
  std::vector<long> gaps;
  for (int k = 1; k <= 10; ++k) gaps.push_back(1L << k);
  const auto w = make_beta_with_gaps(gaps);
  const auto z = z_values(w.digits, 2048);
  EXPECT_GE(z.ratio_sup.get_d(), 0.5);
  EXPECT_FALSE(z.max_in_first_half);
  // Brute-force z directly from the definition.
  for (size_t n = 1; n + 1 < w.size(); ++n) {
    long run = 0;
    while (n - 1 + run < w.size() && w.digits[n - 1 + run] == 0) ++run;
    if (n - 1 + run < w.size()) EXPECT_EQ(z.z[n - 1], run);
  }
  std::vector<long> big;
  for (int k = 1; k <= 12; ++k) big.push_back(1L << k);
  const auto wb = make_beta_with_gaps(big);
  EXPECT_GT(z_values(wb.digits, wb.size()).ratio_sup.get_d(), 0.9);
}

TEST(Connector, ConventionsOnPrefixes) {
  const auto fig = oracle::figure_beta();
  const PrefixGraph g(fig, 12);
  const Digits w = fig.w_prefix(12);
  for (size_t n = 1; n <= 10; ++n) {
    const Digits c(w.begin(), w.begin() + static_cast<long>(n));
    const auto info = connector_after(c, g);
    EXPECT_EQ(info.vertex, n);
    // The zero path really returns to v_1 and is the shortest such.
    Digits path = c;
    path.insert(path.end(), static_cast<size_t>(info.zero_path), 0);
    EXPECT_EQ(g.read(path), std::optional<size_t>(0));
    EXPECT_EQ(info.readings_agree, w[n - 1] == 0) << n;
  }
}

TEST(Repair, Examples) {
  const auto phi = oracle::golden_beta();
  EXPECT_EQ(repair_word(SymbolWord(D("101"), 1), phi).word.digits, D("100"));
  EXPECT_EQ(repair_word(SymbolWord(D("000"), 1), phi).word.digits, D("000"));
  EXPECT_FALSE(repair_word(SymbolWord(D("000"), 1), phi).changed.has_value());
  EXPECT_THROW(repair_word(SymbolWord(D("11"), 1), phi), Error);
  const auto fig = oracle::figure_beta();
  const auto r = repair_word(SymbolWord(D("2"), 2), fig);
  EXPECT_EQ(r.word.digits, D("0"));
  for (size_t len = 1; len <= 6; ++len)
    for (const auto& v : oracle::all_words(len, 2)) {
      if (!is_admissible(v, fig)) continue;
      Digits cat = r.word.digits;
      cat.insert(cat.end(), v.begin(), v.end());
      EXPECT_TRUE(is_admissible(cat, fig));
    }
}

TEST(Repair, UniversalityExhaustive) {
  for (const auto& beta : oracle::battery()) {
    const int b = beta.digit_bound();
    const size_t max_len = b == 2 ? 8 : 10;
    const PrefixGraph g(beta, 20);
    std::vector<Digits> tails;
    for (size_t len = 1; len <= 6; ++len)
      for (const auto& v : oracle::all_words(len, b))
        if (is_admissible(v, beta)) tails.push_back(v);
    for (size_t len = 1; len <= max_len; ++len) {
      for (const auto& u : oracle::all_words(len, b)) {
        if (!is_admissible(u, beta)) continue;
        const auto r = repair_word(SymbolWord(u, b), beta);
        EXPECT_LE(hamming(r.word.digits, u), 1u);
        // The repaired word ends at v_1, so every admissible tail follows.
        ASSERT_EQ(g.read(r.word.digits), std::optional<size_t>(0)) << format_digits(u);
        for (size_t t = 0; t < tails.size(); t += 7) {
          Digits cat = r.word.digits;
          cat.insert(cat.end(), tails[t].begin(), tails[t].end());
          ASSERT_TRUE(is_admissible(cat, beta));
        }
      }
    }
  }
}

TEST(Markov, Examples) {
  const MarkovApprox m2(BetaNumber::from_decimal("2"), 2);
  for (size_t len = 0; len <= 10; ++len)
    for (const auto& w : oracle::all_words(len, 1)) {
      const bool has11 = format_digits(w).find("11") != std::string::npos;
      EXPECT_EQ(m2.accepts(w), !has11) << format_digits(w);
    }
  const MarkovApprox mp(oracle::golden_beta(), 3);
  EXPECT_NEAR(mp.approx().beta.approx(), 1.465571231876768, 1e-12);
  EXPECT_NEAR(mp.entropy_from_counts(200), std::log(1.465571231876768), 1e-3);
}

TEST(Markov, InclusionExhaustive) {
  for (const auto& beta : oracle::battery()) {
    const int b = beta.digit_bound();
    for (size_t n : {2u, 3u, 5u, 8u}) {
      const auto w = beta.w_prefix(n);
      if (std::count(w.begin(), w.end(), 0) == static_cast<long>(n) - 1 && w[0] == 1) continue;
      const MarkovApprox m(beta, n);
      for (size_t len = 0; len <= (b == 2 ? 8u : 10u); ++len) {
        mpz_class accepted = 0;
        for (const auto& word : oracle::all_words(len, b)) {
          if (!m.accepts(word)) continue;
          ++accepted;
          ASSERT_TRUE(is_admissible(word, beta)) << format_digits(word);
        }
        EXPECT_EQ(accepted, m.count(len));
      }
    }
  }
}

TEST(Witnesses, Examples) {
  const auto two = BetaNumber::from_decimal("2");
  const auto w2 = periodic_witnesses(two, Observable::parse("freq:1", 1), 6);
  EXPECT_EQ(w2.low, D("0"));
  EXPECT_EQ(w2.high, D("1"));
  EXPECT_DOUBLE_EQ(w2.high_average, 1.0);
  const auto phi = oracle::golden_beta();
  const auto wp = periodic_witnesses(phi, Observable::parse("freq:1", 1), 8);
  EXPECT_EQ(wp.low, D("0"));
  EXPECT_EQ(wp.high, D("10"));
  EXPECT_DOUBLE_EQ(wp.high_average, 0.5);
  try {
    periodic_witnesses(phi, Observable::parse("const:3", 1), 6);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFound);
  }
}
