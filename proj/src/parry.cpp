#include "betalab/parry.hpp"

#include <algorithm>
#include <cmath>

#include "betalab/errors.hpp"

namespace betalab {

double log_count(const mpz_class& c) {
  if (sgn(c) <= 0) return -INFINITY;
  long exp = 0;
  const double m = mpz_get_d_2exp(&exp, c.get_mpz_t());
  return std::log(m) + static_cast<double>(exp) * std::log(2.0);
}

namespace {

void check_alphabet(const Digits& word, const BetaNumber& beta) {
  for (Digit d : word)
    if (d > beta.digit_bound())
      throw Error(ErrorKind::AlphabetMismatch,
                  "digit " + std::to_string(d) + " outside {0.." + std::to_string(beta.digit_bound()) + "}");
}

// w_1..w_n plus enough further digits to end on a nonzero one, when possible.
// A trailing zero in the result marks an unresolved run.
Digits digits_for_z(const BetaNumber& beta, size_t n) {
  Digits w = beta.w_prefix(n);
  if (!w.empty() && w.back() != 0) return w;
  if (beta.w_exact()) {
    size_t m = n;
    while (true) {
      m += 64;
      w = beta.w_prefix(m);
      for (size_t i = n; i < m; ++i)
        if (w[i] != 0) return Digits(w.begin(), w.begin() + static_cast<long>(i) + 1);
    }
  }
  size_t m = n;
  const size_t limit = 2 * n + 64;
  try {
    while (m < limit) {
      m = std::min(limit, m + std::max<size_t>(16, m / 2));
      w = beta.w_prefix(m);
      for (size_t i = n; i < m; ++i)
        if (w[i] != 0) return Digits(w.begin(), w.begin() + static_cast<long>(i) + 1);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UndecidableAtPrecision) throw;
  }
  return w;
}

// z[i] for 0-based positions of w, with lower-bound flags where the zero run
// reaches the end of the known digits.
void backward_z(const Digits& w, std::vector<long>& z, std::vector<bool>& lower) {
  const size_t n = w.size();
  z.assign(n, 0);
  lower.assign(n, false);
  for (size_t i = n; i-- > 0;) {
    if (w[i] != 0) continue;
    if (i + 1 == n) {
      z[i] = 1;
      lower[i] = true;
    } else {
      z[i] = z[i + 1] + 1;
      lower[i] = lower[i + 1];
    }
  }
}

}  // namespace

bool is_admissible(const Digits& word, const BetaNumber& beta) {
  check_alphabet(word, beta);
  if (word.empty()) return true;
  const Digits w = beta.w_prefix(word.size());
  for (size_t k = 0; k < word.size(); ++k) {
    if (compare_prefix(word.data() + k, w.data(), word.size() - k) > 0) return false;
  }
  return true;
}

bool is_admissible(const SymbolWord& word, const BetaNumber& beta) { return is_admissible(word.digits, beta); }

PrefixGraph::PrefixGraph(const BetaNumber& beta, size_t n) : beta_(beta) {
  if (n < 1) throw Error(ErrorKind::Parse, "graph size must be >= 1");
  const Digits w = digits_for_z(beta, n + 1);
  labels_.assign(w.begin(), w.begin() + static_cast<long>(n));
  std::vector<long> z;
  std::vector<bool> lower;
  backward_z(w, z, lower);
  z_.assign(z.begin(), z.begin() + static_cast<long>(n) + 1);
  z_lower_.assign(lower.begin(), lower.begin() + static_cast<long>(n) + 1);
}

std::vector<Digit> PrefixGraph::back_edges(size_t i) const {
  std::vector<Digit> out;
  for (int d = 0; d < labels_[i]; ++d) out.push_back(static_cast<Digit>(d));
  return out;
}

std::optional<size_t> PrefixGraph::step(size_t i, Digit d) const {
  if (i >= labels_.size()) throw Error(ErrorKind::BudgetExceeded, "read past the truncated graph");
  if (d < labels_[i]) return 0;
  if (d == labels_[i]) return i + 1;
  return std::nullopt;
}

std::optional<size_t> PrefixGraph::read(const Digits& word) const {
  size_t v = 0;
  for (Digit d : word) {
    const auto next = step(v, d);
    if (!next) return std::nullopt;
    v = *next;
  }
  return v;
}

AdmissibilityScanner::AdmissibilityScanner(const BetaNumber& beta) : beta_(beta) {
  if (const auto exact = beta.w_exact(); exact && !exact->finite()) {
    folded_ = true;
    fold_start_ = exact->prefix.size();
    fold_period_ = exact->period.size();
    w_ = exact->take(fold_start_ + fold_period_);
  }
}

Digit AdmissibilityScanner::label(size_t v) {
  if (v >= w_.size()) w_ = beta_.w_prefix(std::max<size_t>(2 * w_.size(), v + 64));
  return w_[v];
}

bool AdmissibilityScanner::step(Digit d) {
  const Digit l = label(v_);
  if (d < l) {
    v_ = 0;
  } else if (d == l) {
    ++v_;
    if (folded_ && v_ >= fold_start_ + fold_period_) v_ -= fold_period_;
  } else {
    return false;
  }
  return true;
}

bool AdmissibilityScanner::read(const Digits& word) {
  for (Digit d : word)
    if (!step(d)) return false;
  return true;
}

std::vector<mpz_class> count_series(const BetaNumber& beta, size_t n) {
  std::vector<mpz_class> out{1};
  if (n == 0) return out;
  const Digits w = beta.w_prefix(n);
  std::vector<mpz_class> cur(n + 1, 0), next(n + 1, 0);
  cur[0] = 1;
  for (size_t t = 0; t < n; ++t) {
    std::fill(next.begin(), next.end(), 0);
    for (size_t i = 0; i <= t; ++i) {
      if (sgn(cur[i]) == 0) continue;
      if (w[i] > 0) next[0] += cur[i] * static_cast<unsigned long>(w[i]);
      next[i + 1] += cur[i];
    }
    cur.swap(next);
    mpz_class total = 0;
    for (size_t i = 0; i <= t + 1; ++i) total += cur[i];
    out.push_back(total);
  }
  return out;
}

mpz_class count_admissible(const BetaNumber& beta, size_t n) {
  if (n < 1) throw Error(ErrorKind::Parse, "word length must be >= 1");
  return count_series(beta, n).back();
}

namespace {

ZReport summarize(const Digits& w, size_t n_max) {
  std::vector<long> z;
  std::vector<bool> lower;
  backward_z(w, z, lower);
  ZReport r;
  r.ratio_sup = 0;
  for (size_t n = 1; n <= n_max; ++n) {
    long zn;
    bool lb;
    if (n - 1 < z.size()) {
      zn = z[n - 1];
      lb = lower[n - 1];
    } else {
      zn = 0;  // beyond the known digits nothing can be said
      lb = true;
    }
    r.z.push_back(zn);
    r.lower_bound.push_back(lb);
    const mpq_class ratio(zn, static_cast<long>(n));
    if (ratio > r.ratio_sup) {
      r.ratio_sup = ratio;
      r.ratio_argmax = n;
    }
    r.max_z = std::max(r.max_z, zn);
    if (2 * n <= n_max) r.max_z_first_half = std::max(r.max_z_first_half, zn);
  }
  r.max_in_first_half = r.max_z <= r.max_z_first_half;
  return r;
}

}  // namespace

ZReport z_values(const BetaNumber& beta, size_t n_max) {
  if (n_max < 1) throw Error(ErrorKind::Parse, "nmax must be >= 1");
  const Digits w = digits_for_z(beta, n_max);
  return summarize(w, n_max);
}

ZReport z_values(const Digits& prefix, size_t n_max) {
  if (n_max < 1) throw Error(ErrorKind::Parse, "nmax must be >= 1");
  return summarize(prefix, n_max);
}

ConnectorInfo connector_after(const Digits& word, const PrefixGraph& g) {
  const auto v = g.read(word);
  if (!v) throw Error(ErrorKind::NotAdmissibleInput, "word is not readable in G_beta: " + format_digits(word));
  ConnectorInfo c;
  c.vertex = *v;
  if (*v == 0) return c;
  c.zero_path = g.z(*v) + 1;
  c.prefix_reading = g.z(*v - 1);
  c.readings_agree = c.zero_path == c.prefix_reading;
  return c;
}

RepairResult repair_word(const SymbolWord& word, const BetaNumber& beta) {
  if (!is_admissible(word.digits, beta))
    throw Error(ErrorKind::NotAdmissibleInput, "repair needs an admissible word: " + format_digits(word.digits));
  RepairResult r{word, std::nullopt};
  for (size_t i = word.size(); i-- > 0;) {
    if (word.digits[i] != 0) {
      r.word.digits[i] = 0;
      r.changed = i;
      break;
    }
  }
  return r;
}

MarkovApprox::MarkovApprox(const BetaNumber& base, size_t n)
    : base_(base), approx_(simple_beta_approx(base, n)), labels_(approx_.truncation) {}

bool MarkovApprox::accepts(const Digits& word) const {
  const size_t m = labels_.size();
  size_t v = 0;
  for (Digit d : word) {
    if (d < labels_[v])
      v = 0;
    else if (d == labels_[v] && v + 1 < m)
      v = v + 1;
    else
      return false;
  }
  return true;
}

mpz_class MarkovApprox::count(size_t n) const {
  const size_t m = labels_.size();
  std::vector<mpz_class> cur(m, 0), next(m, 0);
  cur[0] = 1;
  for (size_t t = 0; t < n; ++t) {
    std::fill(next.begin(), next.end(), 0);
    for (size_t i = 0; i < m; ++i) {
      if (sgn(cur[i]) == 0) continue;
      if (labels_[i] > 0) next[0] += cur[i] * static_cast<unsigned long>(labels_[i]);
      if (i + 1 < m) next[i + 1] += cur[i];
    }
    cur.swap(next);
  }
  mpz_class total = 0;
  for (const auto& c : cur) total += c;
  return total;
}

double MarkovApprox::entropy_from_counts(size_t m) const {
  return (log_count(count(2 * m)) - log_count(count(m))) / static_cast<double>(m);
}

bool periodic_admissible(const Digits& v, const BetaNumber& beta) {
  const size_t p = v.size();
  const size_t horizon = std::max<size_t>(4 * p, 64);
  const Digits w = beta.w_prefix(horizon);
  Digits ext(horizon + p);
  for (size_t i = 0; i < ext.size(); ++i) ext[i] = v[i % p];
  for (size_t k = 0; k < p; ++k)
    if (compare_prefix(ext.data() + k, w.data(), horizon) > 0) return false;
  return true;
}

namespace {

// v is primitive and is the lexicographically largest of its rotations.
bool canonical_necklace(const Digits& v) {
  const size_t p = v.size();
  for (size_t k = 1; k < p; ++k) {
    Digits rot(p);
    for (size_t i = 0; i < p; ++i) rot[i] = v[(i + k) % p];
    if (rot >= v) return false;
  }
  return true;
}

}  // namespace

WitnessPair periodic_witnesses(const BetaNumber& beta, const Observable& phi, size_t max_period) {
  if (max_period < 1) throw Error(ErrorKind::Parse, "max period must be >= 1");
  const int b = beta.digit_bound();
  if (phi.bound() != b) throw Error(ErrorKind::AlphabetMismatch, "observable alphabet differs from the beta-shift");
  WitnessPair out;
  bool first = true;
  for (size_t p = 1; p <= max_period; ++p) {
    Digits v(p, 0);
    while (true) {
      if (canonical_necklace(v) && periodic_admissible(v, beta)) {
        ++out.candidates;
        const double a = phi.periodic_average(v);
        if (first || a < out.low_average - 1e-12) out.low = v, out.low_average = a;
        if (first || a > out.high_average + 1e-12) out.high = v, out.high_average = a;
        first = false;
      }
      size_t i = p;
      while (i > 0 && v[i - 1] == b) v[--i] = 0;
      if (i == 0) break;
      ++v[i - 1];
    }
  }
  if (first || out.high_average - out.low_average <= 1e-12)
    throw Error(ErrorKind::NotFound, "all periodic averages up to period " + std::to_string(max_period) + " coincide");
  return out;
}

}  // namespace betalab
