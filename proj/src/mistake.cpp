#include "betalab/mistake.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "betalab/errors.hpp"
#include "betalab/parry.hpp"

namespace betalab {

MistakeFunction MistakeFunction::zero() { return {Kind::Zero, 0, 1}; }
MistakeFunction MistakeFunction::constant(long k) {
  if (k < 0) throw Error(ErrorKind::Parse, "constant mistake function must be >= 0");
  return {Kind::Constant, k, 1};
}
MistakeFunction MistakeFunction::log2_ceil() { return {Kind::Log2Ceil, 0, 1}; }
MistakeFunction MistakeFunction::sqrt_floor() { return {Kind::Sqrt, 0, 1}; }

MistakeFunction MistakeFunction::parse(std::string_view spec) {
  long factor = 1;
  if (spec.size() > 2 && spec.substr(0, 2) == "2*") {
    factor = 2;
    spec.remove_prefix(2);
  }
  MistakeFunction g = zero();
  if (spec == "zero" || spec == "0") {
    g = zero();
  } else if (spec == "log") {
    g = log2_ceil();
  } else if (spec == "sqrt") {
    g = sqrt_floor();
  } else if (spec.substr(0, 6) == "const:") {
    const std::string num(spec.substr(6));
    size_t used = 0;
    long k = -1;
    try {
      k = std::stol(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != num.size() || num.empty() || k < 0)
      throw Error(ErrorKind::Parse, "bad constant in mistake function: " + num);
    g = constant(k);
  } else {
    throw Error(ErrorKind::Parse, "unknown mistake function: " + std::string(spec));
  }
  return g.scaled(factor);
}

long MistakeFunction::operator()(size_t n) const {
  long v = 0;
  switch (kind_) {
    case Kind::Zero:
      v = 0;
      break;
    case Kind::Constant:
      v = c_;
      break;
    case Kind::Log2Ceil: {
      // ceil(log2 n) for n >= 1
      long k = 0;
      while ((size_t{1} << k) < n) ++k;
      v = k;
      break;
    }
    case Kind::Sqrt: {
      auto r = static_cast<long>(std::sqrt(static_cast<double>(n)));
      while (r * r > static_cast<long>(n)) --r;
      while ((r + 1) * (r + 1) <= static_cast<long>(n)) ++r;
      v = r;
      break;
    }
  }
  return v * factor_;
}

MistakeFunction MistakeFunction::scaled(long factor) const { return {kind_, c_, factor_ * factor}; }

std::string MistakeFunction::name() const {
  std::string base;
  switch (kind_) {
    case Kind::Zero:
      base = "zero";
      break;
    case Kind::Constant:
      base = "const:" + std::to_string(c_);
      break;
    case Kind::Log2Ceil:
      base = "log";
      break;
    case Kind::Sqrt:
      base = "sqrt";
      break;
  }
  return factor_ == 1 ? base : std::to_string(factor_) + "*" + base;
}

MistakeFunction::Validation MistakeFunction::validate(size_t n_lo, size_t n_hi, double ratio_bound) const {
  if (n_lo < 1 || n_hi <= n_lo) throw Error(ErrorKind::Parse, "validation window must satisfy 1 <= lo < hi");
  Validation v;
  for (size_t n = n_lo; n < n_hi; ++n)
    if ((*this)(n) > (*this)(n + 1)) v.monotone = false;
  v.start_ratio = static_cast<double>((*this)(n_lo)) / static_cast<double>(n_lo);
  v.end_ratio = static_cast<double>((*this)(n_hi)) / static_cast<double>(n_hi);
  const bool decreasing = v.start_ratio == 0.0 ? v.end_ratio == 0.0 : v.end_ratio < v.start_ratio;
  v.sublinear = decreasing && v.end_ratio < ratio_bound;
  return v;
}

size_t bad_positions(const Digits& x, const Digits& y, int window) {
  if (x.size() != y.size())
    throw Error(ErrorKind::LengthMismatch,
                "words of length " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  if (window < 1) throw Error(ErrorKind::Parse, "window must be >= 1");
  const size_t n = x.size();
  const auto m = static_cast<size_t>(window);
  // j is bad iff some disagreement lies in [j, j + m); sweep from the right.
  size_t bad = 0;
  size_t next_diff = n;  // smallest disagreement index >= j
  for (size_t j = n; j-- > 0;) {
    if (x[j] != y[j]) next_diff = j;
    if (next_diff < n && next_diff < j + m) ++bad;
  }
  return bad;
}

bool mistake_ball_contains(const Digits& x, const Digits& y, const MistakeFunction& g, int window) {
  return static_cast<long>(bad_positions(x, y, window)) <= g(x.size());
}

size_t SeparationInstance::length() const { return words.empty() ? 0 : words.front().size(); }

void SeparationInstance::validate() const {
  if (window < 1) throw Error(ErrorKind::Parse, "window must be >= 1");
  const size_t n = length();
  for (const auto& w : words)
    if (w.size() != n) throw Error(ErrorKind::LengthMismatch, "instance words must share one length");
}

bool within_exact_budget(const SeparationInstance& inst) { return inst.words.size() <= 20 && inst.length() <= 12; }

namespace {

// close[i] bit j: j lies in the mistake ball of i (the relation is symmetric).
std::vector<std::uint32_t> closeness(const SeparationInstance& inst) {
  const size_t k = inst.words.size();
  const long g = inst.g(inst.length());
  std::vector<std::uint32_t> close(k, 0);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      if (static_cast<long>(bad_positions(inst.words[i], inst.words[j], inst.window)) <= g)
        close[i] |= std::uint32_t{1} << j;
  return close;
}

void max_clique(std::uint32_t chosen, std::uint32_t candidates, const std::vector<std::uint32_t>& far,
                std::uint32_t& best) {
  if (candidates == 0) {
    if (__builtin_popcount(chosen) > __builtin_popcount(best)) best = chosen;
    return;
  }
  if (__builtin_popcount(chosen) + __builtin_popcount(candidates) <= __builtin_popcount(best)) return;
  const int v = __builtin_ctz(candidates);
  const std::uint32_t bit = std::uint32_t{1} << v;
  max_clique(chosen | bit, candidates & far[static_cast<size_t>(v)], far, best);
  max_clique(chosen, candidates & ~bit, far, best);
}

void min_cover(std::uint32_t covered, std::uint32_t chosen, std::uint32_t all, const std::vector<std::uint32_t>& close,
               std::uint32_t& best, bool& have) {
  if (covered == all) {
    if (!have || __builtin_popcount(chosen) < __builtin_popcount(best)) best = chosen, have = true;
    return;
  }
  if (have && __builtin_popcount(chosen) + 1 >= __builtin_popcount(best)) return;
  // The first uncovered word must be covered by one of its neighbours.
  const int u = __builtin_ctz(all & ~covered);
  std::uint32_t options = close[static_cast<size_t>(u)];
  while (options) {
    const int c = __builtin_ctz(options);
    options &= options - 1;
    min_cover(covered | close[static_cast<size_t>(c)], chosen | (std::uint32_t{1} << c), all, close, best, have);
  }
}

std::vector<size_t> bits_to_indices(std::uint32_t m) {
  std::vector<size_t> out;
  while (m) {
    out.push_back(static_cast<size_t>(__builtin_ctz(m)));
    m &= m - 1;
  }
  return out;
}

}  // namespace

std::vector<size_t> greedy_separated(const SeparationInstance& inst) {
  inst.validate();
  const long g = inst.g(inst.length());
  std::vector<size_t> chosen;
  for (size_t i = 0; i < inst.words.size(); ++i) {
    bool ok = true;
    for (size_t c : chosen) {
      if (static_cast<long>(bad_positions(inst.words[i], inst.words[c], inst.window)) <= g) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(i);
  }
  return chosen;
}

bool is_separated(const SeparationInstance& inst, const std::vector<size_t>& members) {
  const long g = inst.g(inst.length());
  for (size_t a = 0; a < members.size(); ++a)
    for (size_t b = a + 1; b < members.size(); ++b)
      if (static_cast<long>(bad_positions(inst.words[members[a]], inst.words[members[b]], inst.window)) <= g)
        return false;
  return true;
}

bool is_spanning(const SeparationInstance& inst, const std::vector<size_t>& centers) {
  for (const auto& z : inst.words) {
    bool hit = false;
    for (size_t c : centers)
      if (mistake_ball_contains(inst.words[c], z, inst.g, inst.window)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

SetResult max_separated(const SeparationInstance& inst, bool exact) {
  inst.validate();
  SetResult r;
  if (inst.words.empty()) {
    r.exact = true;
    return r;
  }
  if (!within_exact_budget(inst)) {
    if (exact)
      throw Error(ErrorKind::BudgetExceeded, "exact search is limited to 20 words of length <= 12");
    r.witness = greedy_separated(inst);
    r.size = r.witness.size();
    return r;
  }
  const auto close = closeness(inst);
  const size_t k = inst.words.size();
  const std::uint32_t all = k == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << k) - 1;
  std::vector<std::uint32_t> far(k);
  for (size_t i = 0; i < k; ++i) far[i] = all & ~close[i];
  std::uint32_t best = 0;
  max_clique(0, all, far, best);
  r.witness = bits_to_indices(best);
  r.size = r.witness.size();
  r.exact = true;
  return r;
}

SetResult min_spanning(const SeparationInstance& inst, bool exact) {
  inst.validate();
  SetResult r;
  if (inst.words.empty()) {
    r.exact = true;
    return r;
  }
  if (!within_exact_budget(inst)) {
    if (exact)
      throw Error(ErrorKind::BudgetExceeded, "exact search is limited to 20 words of length <= 12");
    // A maximal separated set is spanning: anything outside every ball could be added.
    r.witness = greedy_separated(inst);
    r.size = r.witness.size();
    return r;
  }
  const auto close = closeness(inst);
  const size_t k = inst.words.size();
  const std::uint32_t all = (std::uint32_t{1} << k) - 1;
  std::uint32_t best = 0;
  bool have = false;
  min_cover(0, 0, all, close, best, have);
  r.witness = bits_to_indices(best);
  r.size = r.witness.size();
  r.exact = true;
  return r;
}

WordSource uniform_admissible(const BetaNumber& beta) {
  WordSource src;
  src.name = "uniform-admissible(" + beta.describe() + ")";
  src.words = [beta](size_t n) {
    if (count_admissible(beta, n) > 4000000)
      throw Error(ErrorKind::BudgetExceeded, "too many admissible words of length " + std::to_string(n));
    const PrefixGraph graph(beta, n);
    std::vector<Digits> all;
    Digits cur;
    const int b = beta.digit_bound();
    // Depth-first over G_beta in lexicographic order.
    std::vector<std::pair<size_t, int>> stack;  // (vertex, next digit to try)
    stack.emplace_back(0, 0);
    while (!stack.empty()) {
      auto& [v, d] = stack.back();
      if (cur.size() == n) {
        all.push_back(cur);
        stack.pop_back();
        if (!cur.empty()) cur.pop_back();
        continue;
      }
      if (d > b) {
        stack.pop_back();
        if (!cur.empty()) cur.pop_back();
        continue;
      }
      const Digit digit = static_cast<Digit>(d++);
      const auto next = graph.step(v, digit);
      if (!next) continue;
      cur.push_back(digit);
      stack.emplace_back(*next, 0);
    }
    const double w = 1.0 / static_cast<double>(all.size());
    std::vector<std::pair<Digits, double>> out;
    out.reserve(all.size());
    for (auto& word : all) out.emplace_back(std::move(word), w);
    return out;
  };
  src.closed_form_entropy = beta.log_value();
  return src;
}

WordSource bernoulli(std::vector<double> probs) {
  if (probs.size() < 2) throw Error(ErrorKind::Parse, "a Bernoulli source needs at least two symbols");
  double total = 0.0, h = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw Error(ErrorKind::Parse, "negative probability");
    total += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InsufficientSample, "probabilities must sum to 1");
  WordSource src;
  src.name = "bernoulli";
  src.closed_form_entropy = h;
  src.words = [probs](size_t n) {
    const size_t k = probs.size();
    double size = std::pow(static_cast<double>(k), static_cast<double>(n));
    if (size > 4e6) throw Error(ErrorKind::BudgetExceeded, "too many words of length " + std::to_string(n));
    std::vector<std::pair<Digits, double>> out;
    Digits cur(n, 0);
    while (true) {
      double w = 1.0;
      for (Digit d : cur) w *= probs[d];
      if (w > 0.0) out.emplace_back(cur, w);
      size_t i = n;
      while (i > 0 && cur[i - 1] + 1u == k) cur[--i] = 0;
      if (i == 0) break;
      ++cur[i - 1];
    }
    return out;
  };
  return src;
}

WordSource single_word(const Digits& w) {
  WordSource src;
  src.name = "single:" + format_digits(w);
  src.closed_form_entropy = 0.0;
  src.words = [w](size_t n) {
    Digits d(n, 0);
    for (size_t i = 0; i < n && i < w.size(); ++i) d[i] = w[i];
    return std::vector<std::pair<Digits, double>>{{d, 1.0}};
  };
  return src;
}

KatokReport katok_entropy_estimate(const WordSource& src, const MistakeFunction& g, double gamma,
                                   const std::vector<size_t>& n_list, int window) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::Parse, "gamma must lie in (0, 1)");
  if (window < 1) throw Error(ErrorKind::Parse, "window must be >= 1");
  if (n_list.empty()) throw Error(ErrorKind::InsufficientSample, "no word lengths requested");
  KatokReport rep;
  rep.source = src.name;
  rep.g_name = g.name();
  rep.gamma = gamma;
  rep.window = window;
  rep.closed_form_entropy = src.closed_form_entropy;
  for (size_t n : n_list) {
    if (n < 1) throw Error(ErrorKind::Parse, "word lengths must be >= 1");
    auto words = src.words(n);
    if (words.empty()) throw Error(ErrorKind::InsufficientSample, "source produced no words of length " + std::to_string(n));
    double total = 0.0;
    for (const auto& [w, p] : words) {
      if (w.size() != n) throw Error(ErrorKind::LengthMismatch, "source produced a word of the wrong length");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-6)
      throw Error(ErrorKind::InsufficientSample, "weights at length " + std::to_string(n) + " sum to " + std::to_string(total));
    std::stable_sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    SeparationInstance inst;
    inst.window = window;
    inst.g = g;
    double mass = 0.0;
    for (auto& [w, p] : words) {
      if (mass >= 1.0 - gamma - 1e-12) break;
      inst.words.push_back(std::move(w));
      mass += p;
    }
    KatokRow row;
    row.n = n;
    row.z_size = inst.words.size();
    row.z_mass = mass;
    row.g_value = g(n);
    // With no mistakes allowed the balls are single words, so Z itself is separated.
    row.separated_zero = inst.words.size();
    row.separated = row.g_value == 0 ? row.separated_zero : greedy_separated(inst).size();
    row.estimate = std::log(static_cast<double>(row.separated)) / static_cast<double>(n);
    row.estimate_zero = std::log(static_cast<double>(row.separated_zero)) / static_cast<double>(n);
    for (size_t i = 0; i < inst.words.size() && i < 8; ++i) row.z_sample.push_back(inst.words[i]);
    rep.rows.push_back(std::move(row));
  }
  rep.trend = rep.rows.back().estimate - rep.rows.front().estimate;
  return rep;
}

}  // namespace betalab
