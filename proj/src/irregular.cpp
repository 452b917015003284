#include "betalab/irregular.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "betalab/errors.hpp"
#include "betalab/parry.hpp"

namespace betalab {

namespace {

double to_double(const mpz_class& z) { return z.get_d(); }

mpz_class ipow(size_t base, size_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

bool is_full_shift(const BetaNumber& beta) {
  const auto q = beta.rational_value();
  return q && q->get_den() == 1;
}

// Zero the last nonzero digit; returns its offset.
std::int32_t repair_in_place(Digits& w) {
  for (size_t i = w.size(); i-- > 0;)
    if (w[i] != 0) {
      w[i] = 0;
      return static_cast<std::int32_t>(i);
    }
  return -1;
}

}  // namespace

IrregularSchedule validate_schedule(const std::vector<size_t>& n, const std::vector<size_t>& mult,
                                    const std::vector<double>& delta) {
  if (n.empty()) throw Error(ErrorKind::Parse, "schedule needs at least one level");
  if (mult.size() != n.size() || delta.size() != n.size())
    throw Error(ErrorKind::LengthMismatch, "n, N and delta must have the same number of levels");
  IrregularSchedule s{n, mult, delta, {}, {}};
  mpz_class t = 0;
  for (size_t k = 0; k < n.size(); ++k) {
    if (n[k] < 1 || mult[k] < 1) throw Error(ErrorKind::Parse, "block lengths and multiplicities must be >= 1");
    if (!(delta[k] > 0.0)) throw Error(ErrorKind::Parse, "tolerances must be positive");
    if (k > 0 && n[k] <= n[k - 1])
      throw Error(ErrorKind::GrowthViolation, "n_k not strictly increasing at k = " + std::to_string(k + 1));
    if (k > 0 && delta[k] >= delta[k - 1])
      throw Error(ErrorKind::GrowthViolation, "delta_k not strictly decreasing at k = " + std::to_string(k + 1));
    t += mpz_class(static_cast<unsigned long>(mult[k])) * static_cast<unsigned long>(n[k]);
    s.t.push_back(t);
  }
  for (size_t k = 0; k + 1 < n.size(); ++k) {
    const double a = static_cast<double>(n[k + 1]) / static_cast<double>(mult[k]);
    const double b = to_double(s.t[k]) / static_cast<double>(mult[k + 1]);
    s.cert.push_back(std::max(a, b));
    if (k > 0 && s.cert[k] >= s.cert[k - 1])
      throw Error(ErrorKind::GrowthViolation, "ratio certificate does not decrease at k = " + std::to_string(k + 1));
  }
  return s;
}

IrregularSchedule default_schedule(size_t levels, double delta1) {
  if (levels < 1) throw Error(ErrorKind::Parse, "levels must be >= 1");
  std::vector<size_t> n, mult;
  std::vector<double> delta;
  for (size_t k = 1; k <= levels + 1; ++k) n.push_back(size_t{1} << (k + 3));
  mpz_class t = 0;
  for (size_t k = 1; k <= levels; ++k) {
    if (k == 1) {
      mult.push_back(96);
    } else {
      const size_t nk = n[k - 1];
      const size_t nk1 = n[k];
      const mpz_class next = mpz_class(static_cast<unsigned long>(size_t{1} << k)) * (t + nk + nk1);
      if (!next.fits_ulong_p())
        throw Error(ErrorKind::BudgetExceeded, "default multiplicity too large at level " + std::to_string(k));
      mult.push_back(next.get_ui());
    }
    t += mpz_class(static_cast<unsigned long>(mult.back())) * static_cast<unsigned long>(n[k - 1]);
    delta.push_back(delta1 * 8.0 / static_cast<double>(k + 7));
  }
  n.resize(levels);
  return validate_schedule(n, mult, delta);
}

namespace {

// Exact lookahead bounds for window sums along G_beta, plus the search that
// uses them to draw words with a prescribed average.
class PoolSearch {
 public:
  PoolSearch(const BetaNumber& beta, const Observable& phi, size_t n)
      : graph_(beta, n), n_(n), r_(static_cast<size_t>(phi.range())), base_(static_cast<size_t>(phi.bound()) + 1) {
    size_t blocks = 1;
    for (size_t i = 0; i < r_; ++i) blocks *= base_;
    ctx_count_ = blocks / base_;
    table_.resize(blocks);
    Digits blk(r_);
    for (size_t code = 0; code < blocks; ++code) {
      size_t c = code;
      for (size_t i = r_; i-- > 0;) blk[i] = static_cast<Digit>(c % base_), c /= base_;
      table_[code] = phi.value(blk.data());
    }
    exact_bounds_ = static_cast<double>(n_) * static_cast<double>(n_ + 1) * static_cast<double>(ctx_count_) < 4e7;
    lo_ = *std::min_element(table_.begin(), table_.end());
    hi_ = *std::max_element(table_.begin(), table_.end());
    if (exact_bounds_) fill_bounds();
  }

  // Sum range reachable with m more digits from (vertex, context).
  std::pair<double, double> reach(size_t m, size_t v, size_t ctx) const {
    if (!exact_bounds_) {
      const double cnt = static_cast<double>(m);
      return {cnt * lo_, cnt * hi_};
    }
    const size_t idx = (m * (n_ + 1) + v) * ctx_count_ + ctx;
    return {min_[idx], max_[idx]};
  }

  // Depth-first search with random digit order; collects every qualifying word
  // when `all` is set, otherwise stops at the first. Returns false when the
  // node budget runs out.
  bool search(double lo_sum, double hi_sum, std::mt19937_64* rng, bool all, std::vector<Digits>& out,
              size_t node_budget) {
    Digits cur;
    lo_sum_ = lo_sum;
    hi_sum_ = hi_sum;
    rng_ = rng;
    all_ = all;
    nodes_ = 0;
    budget_ = node_budget;
    out_ = &out;
    found_ = false;
    return dfs(cur, 0, 0, 0.0);
  }

 private:
  void fill_bounds() {
    const size_t states = (n_ + 1) * ctx_count_;
    min_.assign((n_ + 1) * states, 0.0);
    max_.assign((n_ + 1) * states, 0.0);
    for (size_t m = 1; m <= n_; ++m) {
      for (size_t v = 0; v + m <= n_; ++v) {
        for (size_t ctx = 0; ctx < ctx_count_; ++ctx) {
          double mn = INFINITY, mx = -INFINITY;
          for (size_t d = 0; d < base_; ++d) {
            const auto next = graph_.step(v, static_cast<Digit>(d));
            if (!next) continue;
            const size_t code = ctx * base_ + d;
            const size_t nctx = code % ctx_count_;
            const double w = table_[code];
            const size_t idx = ((m - 1) * (n_ + 1) + *next) * ctx_count_ + nctx;
            mn = std::min(mn, w + min_[idx]);
            mx = std::max(mx, w + max_[idx]);
          }
          const size_t idx = (m * (n_ + 1) + v) * ctx_count_ + ctx;
          min_[idx] = mn;
          max_[idx] = mx;
        }
      }
    }
  }

  bool dfs(Digits& cur, size_t v, size_t ctx, double sum) {
    if (++nodes_ > budget_) return false;
    const size_t t = cur.size();
    if (t == n_) {
      if (sum > lo_sum_ && sum < hi_sum_) {
        out_->push_back(cur);
        found_ = true;
      }
      return true;
    }
    std::vector<Digit> order;
    for (size_t d = 0; d < base_; ++d) order.push_back(static_cast<Digit>(d));
    if (rng_) std::shuffle(order.begin(), order.end(), *rng_);
    for (Digit d : order) {
      const auto next = graph_.step(v, d);
      if (!next) continue;
      const size_t code = ctx * base_ + d;
      const size_t nctx = code % ctx_count_;
      const bool window_done = t + 1 >= r_;
      const double nsum = sum + (window_done ? table_[code] : 0.0);
      if (t + 2 >= r_) {  // the context now holds r - 1 real digits
        const auto [a, b] = reach(n_ - t - 1, *next, nctx);
        if (nsum + b <= lo_sum_ || nsum + a >= hi_sum_) continue;
      }
      cur.push_back(d);
      const bool ok = dfs(cur, *next, nctx, nsum);
      cur.pop_back();
      if (!ok) return false;
      if (found_ && !all_) return true;
    }
    return true;
  }

  PrefixGraph graph_;
  size_t n_, r_, base_, ctx_count_ = 1;
  std::vector<double> table_;
  bool exact_bounds_ = false;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> min_, max_;

  double lo_sum_ = 0.0, hi_sum_ = 0.0;
  std::mt19937_64* rng_ = nullptr;
  bool all_ = false;
  size_t nodes_ = 0, budget_ = 0;
  std::vector<Digits>* out_ = nullptr;
  bool found_ = false;
};

void thin(std::vector<Digits>& pool, const Digits& w, const PoolOptions& opt) {
  for (const auto& p : pool)
    if (hamming(p, w) < opt.min_distance) return;
  pool.push_back(w);
}

}  // namespace

std::vector<WordPool> build_word_pools(const BetaNumber& beta, const Observable& phi, double alpha1, double alpha2,
                                       const IrregularSchedule& schedule, const PoolOptions& opt) {
  if (phi.bound() != beta.digit_bound())
    throw Error(ErrorKind::AlphabetMismatch, "observable alphabet differs from the beta-shift");
  std::vector<WordPool> pools;
  std::mt19937_64 rng(opt.seed);
  for (size_t k = 1; k <= schedule.levels(); ++k) {
    WordPool pool;
    pool.level = k;
    pool.target = IrregularSchedule::rho(k);
    pool.alpha = pool.target == 1 ? alpha1 : alpha2;
    pool.delta = schedule.delta[k - 1];
    pool.length = schedule.n[k - 1];
    const size_t n = pool.length;
    if (n < static_cast<size_t>(phi.range()))
      throw Error(ErrorKind::LengthMismatch, "block length shorter than the observable range");
    const double windows = static_cast<double>(n - static_cast<size_t>(phi.range()) + 1);
    const double lo_sum = (pool.alpha - pool.delta) * windows;
    const double hi_sum = (pool.alpha + pool.delta) * windows;
    PoolSearch search(beta, phi, n);
    std::vector<Digits> found;
    if (to_double(count_admissible(beta, n)) <= opt.exhaustive_limit) {
      pool.exhaustive = true;
      search.search(lo_sum, hi_sum, nullptr, true, found, SIZE_MAX);
      pool.qualifying = mpz_class(static_cast<unsigned long>(found.size()));
      std::shuffle(found.begin(), found.end(), rng);
      for (const auto& w : found) {
        if (pool.words.size() >= opt.cap) break;
        thin(pool.words, w, opt);
      }
    } else {
      const size_t attempts = opt.cap * 40;
      for (size_t a = 0; a < attempts && pool.words.size() < opt.cap; ++a) {
        found.clear();
        search.search(lo_sum, hi_sum, &rng, false, found, 200 * n);
        if (!found.empty()) {
          thin(pool.words, found.front(), opt);
        } else if (a == 0) {
          // One deterministic search with a large budget settles reachability.
          search.search(lo_sum, hi_sum, nullptr, false, found, 1000000);
          if (found.empty()) break;
          thin(pool.words, found.front(), opt);
        }
      }
    }
    if (pool.words.empty())
      throw Error(ErrorKind::EmptyPool, "no admissible word of length " + std::to_string(n) + " has average within " +
                                            std::to_string(pool.delta) + " of " + std::to_string(pool.alpha));
    pool.min_average = INFINITY;
    pool.max_average = -INFINITY;
    for (const auto& w : pool.words) {
      const double a = phi.average(w, n);
      pool.min_average = std::min(pool.min_average, a);
      pool.max_average = std::max(pool.max_average, a);
    }
    pool.log_size_rate = std::log(static_cast<double>(pool.words.size())) / static_cast<double>(n);
    pools.push_back(std::move(pool));
  }
  return pools;
}

GluedPoint glue_blocks(const BetaNumber& beta, const std::vector<Digits>& blocks) {
  GluedPoint g;
  const bool repair = !is_full_shift(beta);
  AdmissibilityScanner scan(beta);
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (!is_admissible(blocks[i], beta))
      throw Error(ErrorKind::NotAdmissibleInput, "block " + std::to_string(i) + " is not admissible");
    Digits b = blocks[i];
    BlockRecord rec;
    rec.word = static_cast<std::uint32_t>(i);
    if (repair && i + 1 < blocks.size()) rec.changed = repair_in_place(b);
    if (rec.changed >= 0) ++g.edits, g.max_block_edits = 1;
    for (Digit d : b)
      if (!scan.step(d)) g.admissible = false;
    g.prefix.insert(g.prefix.end(), b.begin(), b.end());
    g.blocks.push_back(rec);
  }
  g.length = static_cast<unsigned long>(g.prefix.size());
  return g;
}

IrregularReport construct_irregular_point(const BetaNumber& beta, const Observable& phi, double alpha1, double alpha2,
                                          const IrregularSchedule& schedule, const std::vector<WordPool>& pools,
                                          std::uint64_t seed, size_t materialize) {
  const size_t levels = schedule.levels();
  if (pools.size() < levels) throw Error(ErrorKind::LengthMismatch, "fewer pools than schedule levels");
  if (schedule.t.back() > mpz_class("4000000000"))
    throw Error(ErrorKind::BudgetExceeded, "t_K = " + schedule.t.back().get_str() + " digits is too long to stream");
  for (size_t k = 0; k < levels; ++k) {
    if (pools[k].words.empty()) throw Error(ErrorKind::EmptyPool, "pool " + std::to_string(k + 1) + " is empty");
    if (pools[k].length != schedule.n[k]) throw Error(ErrorKind::LengthMismatch, "pool length differs from n_k");
  }
  const size_t r = static_cast<size_t>(phi.range());
  const bool repair = !is_full_shift(beta);
  std::mt19937_64 rng(seed);
  AdmissibilityScanner scan(beta);
  IrregularReport rep;
  GluedPoint& g = rep.point;

  Digits ring(r, 0);  // last r digits
  size_t pos = 0;
  double sum = 0.0;
  const double norm = phi.sup_norm();
  const double osc = phi.oscillation();
  std::vector<double> averages;
  size_t t_prev = 0;

  for (size_t k = 1; k <= levels; ++k) {
    const auto& pool = pools[k - 1];
    const size_t nk = schedule.n[k - 1];
    const size_t mk = schedule.mult[k - 1];
    const double alpha = IrregularSchedule::rho(k) == 1 ? alpha1 : alpha2;
    std::uniform_int_distribution<size_t> pick(0, pool.words.size() - 1);
    size_t level_edits = 0, level_max = 0;
    Digits b;
    for (size_t j = 0; j < mk; ++j) {
      const size_t idx = pick(rng);
      b = pool.words[idx];
      BlockRecord rec;
      rec.level = static_cast<std::uint32_t>(k);
      rec.word = static_cast<std::uint32_t>(idx);
      const bool terminal = k == levels && j + 1 == mk;
      if (repair && !terminal) rec.changed = repair_in_place(b);
      if (rec.changed >= 0) ++level_edits, level_max = 1;
      for (Digit d : b) {
        if (!scan.step(d)) g.admissible = false;
        ring[pos % r] = d;
        ++pos;
        if (pos >= r) {
          Digits window(r);
          for (size_t i = 0; i < r; ++i) window[i] = ring[(pos - r + i) % r];
          sum += phi.value(window.data());
        }
        if (g.prefix.size() < materialize) g.prefix.push_back(d);
      }
      g.blocks.push_back(rec);
    }
    g.edits += level_edits;
    g.max_block_edits = std::max(g.max_block_edits, level_max);

    const size_t tk = pos;
    const double windows = static_cast<double>(tk - r + 1);
    LevelReport lr;
    lr.level = k;
    lr.t = static_cast<unsigned long>(tk);
    lr.average = sum / windows;
    lr.alpha = alpha;
    lr.residual = std::abs(lr.average - alpha);
    lr.edits = level_edits;
    const double early = static_cast<double>(t_prev) * std::max(2.0 * norm, norm + std::abs(alpha));
    const double per_block = static_cast<double>(nk - r + 1) * schedule.delta[k - 1] +
                             osc * static_cast<double>(r * level_max) +
                             static_cast<double>(r - 1) * (norm + std::abs(alpha));
    lr.bound = (early + static_cast<double>(mk) * per_block) / windows;
    if (lr.residual > lr.bound) rep.within_bounds = false;
    averages.push_back(lr.average);
    rep.levels.push_back(lr);
    t_prev = tk;
  }
  g.length = static_cast<unsigned long>(pos);

  const double gap = std::abs(alpha1 - alpha2);
  rep.min_jump = INFINITY;
  for (size_t k = 1; k < averages.size(); ++k) rep.min_jump = std::min(rep.min_jump, std::abs(averages[k] - averages[k - 1]));
  if (averages.size() < 2) rep.min_jump = 0.0;
  rep.oscillates = gap > 0.0 && averages.size() >= 2 && rep.min_jump > gap / 2.0;
  if (!rep.within_bounds) {
    std::string diag;
    for (const auto& lr : rep.levels)
      diag += " k=" + std::to_string(lr.level) + " residual=" + std::to_string(lr.residual) +
              " bound=" + std::to_string(lr.bound);
    throw Error(ErrorKind::OscillationNotObserved, "residual above its bound:" + diag);
  }
  return rep;
}

GluedFamily enumerate_glued_family(const BetaNumber& beta, const std::vector<size_t>& mult,
                                   const std::vector<std::vector<Digits>>& pools, size_t budget) {
  if (mult.size() != pools.size() || pools.empty())
    throw Error(ErrorKind::LengthMismatch, "one multiplicity per pool is required");
  GluedFamily fam;
  fam.mult = mult;
  fam.expected = 1;
  fam.t.push_back(0);
  std::vector<size_t> slot_pool;
  for (size_t i = 0; i < pools.size(); ++i) {
    if (pools[i].empty()) throw Error(ErrorKind::EmptyPool, "pool " + std::to_string(i + 1) + " is empty");
    const size_t len = pools[i].front().size();
    for (const auto& w : pools[i])
      if (w.size() != len) throw Error(ErrorKind::LengthMismatch, "pool words must share one length");
    fam.pool_sizes.push_back(pools[i].size());
    fam.expected *= ipow(pools[i].size(), mult[i]);
    fam.t.push_back(fam.t.back() + mult[i] * len);
    for (size_t j = 0; j < mult[i]; ++j) slot_pool.push_back(i);
  }
  if (fam.expected > static_cast<unsigned long>(budget))
    throw Error(ErrorKind::BudgetExceeded, "family of size " + fam.expected.get_str() + " exceeds the budget");

  const size_t slots = slot_pool.size();
  std::vector<size_t> choice(slots, 0);
  std::vector<Digits> blocks(slots);
  while (true) {
    for (size_t s = 0; s < slots; ++s) blocks[s] = pools[slot_pool[s]][choice[s]];
    const auto g = glue_blocks(beta, blocks);
    if (!g.admissible) throw Error(ErrorKind::NotAdmissibleInput, "glued word left the shift");
    fam.max_block_edits = std::max(fam.max_block_edits, g.max_block_edits);
    fam.members.push_back(g.prefix);
    size_t s = slots;
    while (s > 0 && choice[s - 1] + 1 == pools[slot_pool[s - 1]].size()) choice[--s] = 0;
    if (s == 0) break;
    ++choice[s - 1];
  }

  std::vector<Digits> sorted = fam.members;
  std::sort(sorted.begin(), sorted.end());
  fam.distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() &&
                 mpz_class(static_cast<unsigned long>(sorted.size())) == fam.expected;

  // Two selections differ in some slot; they stay apart there iff the words
  // of that pool remain distinct after the repair that slot receives.
  const bool repair = !is_full_shift(beta);
  for (size_t s = 0; s < slots; ++s) {
    std::vector<Digits> seen;
    for (Digits w : pools[slot_pool[s]]) {
      if (repair && s + 1 < slots) repair_in_place(w);
      seen.push_back(w);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) fam.separated = false;
  }

  const double tk = static_cast<double>(fam.t.back());
  double expo = 0.0;
  for (size_t i = 0; i < pools.size(); ++i)
    expo += static_cast<double>(mult[i]) * std::log(static_cast<double>(pools[i].size()));
  fam.pool_exponent = expo / tk;
  fam.entropy_proxy = log_count(mpz_class(static_cast<unsigned long>(sorted.size()))) / tk;
  return fam;
}

EdpReport edp_ball_check(const GluedFamily& family, const std::vector<std::pair<Digits, size_t>>& balls) {
  EdpReport rep;
  if (family.members.empty()) throw Error(ErrorKind::InsufficientSample, "empty family");
  const double total = static_cast<double>(family.members.size());
  const size_t levels = family.pool_sizes.size();
  const size_t tk = family.t.back();
  rep.s = std::log(total) / static_cast<double>(tk);
  for (const auto& [center, n] : balls) {
    if (n > tk || n > center.size())
      throw Error(ErrorKind::LengthMismatch, "ball length beyond the glued prefix");
    BallCheck c;
    c.center = center;
    c.n = n;
    size_t hits = 0;
    for (const auto& m : family.members)
      if (std::equal(center.begin(), center.begin() + static_cast<long>(n), m.begin())) ++hits;
    c.measure = static_cast<double>(hits) / total;
    size_t j = 0;
    while (j < levels && family.t[j + 1] <= n) ++j;
    c.j = j;
    double log_bound = 0.0;
    for (size_t i = 0; i < j; ++i)
      log_bound -= static_cast<double>(family.mult[i]) * std::log(static_cast<double>(family.pool_sizes[i]));
    if (j < levels) {
      const size_t len = (family.t[j + 1] - family.t[j]) / family.mult[j];
      c.l = (n - family.t[j]) / len;
      log_bound -= static_cast<double>(c.l) * std::log(static_cast<double>(family.pool_sizes[j]));
    }
    c.coarse = c.l == 0;
    c.bound = std::exp(log_bound);
    c.ok = c.measure <= c.bound * (1.0 + 1e-12);
    rep.all_ok = rep.all_ok && c.ok;
    rep.k_needed = std::max(rep.k_needed, c.measure * std::exp(static_cast<double>(n) * rep.s));
    rep.balls.push_back(std::move(c));
  }
  return rep;
}

}  // namespace betalab
