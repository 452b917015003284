#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "betalab/beta.hpp"
#include "betalab/observable.hpp"
#include "betalab/symbols.hpp"

namespace betalab {

struct IrregularSchedule {
  std::vector<size_t> n;         // block lengths n_1..n_K
  std::vector<size_t> mult;      // multiplicities N_1..N_K
  std::vector<double> delta;     // tolerances delta_1..delta_K
  std::vector<mpz_class> t;      // t_k = sum_{i<=k} N_i n_i
  std::vector<double> cert;      // max(n_{k+1}/N_k, t_k/N_{k+1}) for k < K

  size_t levels() const { return n.size(); }
  /// Target index (1 or 2) for level k >= 1.
  static int rho(size_t k) { return static_cast<int>((k + 1) % 2) + 1; }
};

/// n_k = 2^{k+3}, N_1 = 96, N_{k+1} = 2^{k+1}(t_k + n_{k+1} + n_{k+2}),
/// delta_k = delta_1 * 8 / (k + 7).
IrregularSchedule default_schedule(size_t levels, double delta1 = 0.1);

/// Checks the raw sequences and computes t_k and the ratio certificates.
/// GrowthViolation when n or delta fail to be strictly monotone, or the
/// certificates fail to strictly decrease.
IrregularSchedule validate_schedule(const std::vector<size_t>& n, const std::vector<size_t>& mult,
                                    const std::vector<double>& delta);

struct WordPool {
  size_t level = 0;  // 1-based
  int target = 1;    // rho(level)
  double alpha = 0.0;
  double delta = 0.0;
  size_t length = 0;
  std::vector<Digits> words;
  double min_average = 0.0;
  double max_average = 0.0;
  bool exhaustive = false;
  std::optional<mpz_class> qualifying;  // all words meeting the target, when enumerated
  double log_size_rate = 0.0;           // (1/n_k) log |pool|
};

struct PoolOptions {
  size_t cap = 64;
  size_t min_distance = 3;  // pairwise Hamming distance > 2
  std::uint64_t seed = 7;
  double exhaustive_limit = 1e6;
};

/// Admissible words of length n_k with |A_{n_k} phi - alpha_rho(k)| < delta_k,
/// greedily thinned to pairwise Hamming distance >= min_distance. EmptyPool
/// when a target cannot be met.
std::vector<WordPool> build_word_pools(const BetaNumber& beta, const Observable& phi, double alpha1, double alpha2,
                                       const IrregularSchedule& schedule, const PoolOptions& opt = {});

struct BlockRecord {
  std::uint32_t level = 0;
  std::uint32_t word = 0;     // index into the pool, or into the selection list
  std::int32_t changed = -1;  // repaired offset inside the block
};

struct GluedPoint {
  Digits prefix;  // materialized digits (possibly a truncation of the stream)
  mpz_class length = 0;
  std::vector<BlockRecord> blocks;
  size_t edits = 0;
  size_t max_block_edits = 0;
  bool admissible = true;  // every prefix of the whole stream read in G_beta
};

/// Joins blocks, zeroing the last nonzero digit of every block but the final
/// one. On a full shift (integer beta) nothing needs repair and nothing
/// changes. NotAdmissibleInput when a block is not admissible by itself.
GluedPoint glue_blocks(const BetaNumber& beta, const std::vector<Digits>& blocks);

struct LevelReport {
  size_t level = 0;
  mpz_class t;
  double average = 0.0;  // A_{t_k} phi over t_k - r + 1 windows
  double alpha = 0.0;
  double residual = 0.0;
  double bound = 0.0;
  size_t edits = 0;
};

struct IrregularReport {
  GluedPoint point;
  std::vector<LevelReport> levels;
  double min_jump = 0.0;  // smallest |A_{t_k} - A_{t_{k-1}}|
  bool oscillates = false;
  bool within_bounds = true;
};

/// Glues N_k random words from pool k for each level, streaming the digits.
/// OscillationNotObserved when a residual exceeds its bound.
IrregularReport construct_irregular_point(const BetaNumber& beta, const Observable& phi, double alpha1, double alpha2,
                                          const IrregularSchedule& schedule, const std::vector<WordPool>& pools,
                                          std::uint64_t seed, size_t materialize = size_t{1} << 16);

struct GluedFamily {
  std::vector<Digits> members;
  std::vector<size_t> pool_sizes;
  std::vector<size_t> mult;
  std::vector<size_t> t;  // t_0 = 0, t_1, ..., t_k
  mpz_class expected;     // prod |S_i|^{N_i}
  bool distinct = true;
  bool separated = true;  // every pair differs inside some common block
  double entropy_proxy = 0.0;      // (1/t_k) log #T_k
  double pool_exponent = 0.0;      // (1/t_k) sum N_i log |S_i|
  size_t max_block_edits = 0;
};

/// Every glued word from prod |S_i|^{N_i} selections (budget 1e5).
GluedFamily enumerate_glued_family(const BetaNumber& beta, const std::vector<size_t>& mult,
                                   const std::vector<std::vector<Digits>>& pools, size_t budget = 100000);

struct BallCheck {
  Digits center;
  size_t n = 0;
  double measure = 0.0;
  size_t j = 0;  // complete levels inside [0, n)
  size_t l = 0;  // complete blocks of level j + 1 beyond t_j
  double bound = 1.0;
  bool coarse = false;  // l = 0: only (#T_j)^{-1} is claimed
  bool ok = true;
};

struct EdpReport {
  std::vector<BallCheck> balls;
  double s = 0.0;        // (1/t_k) log #T_k
  double k_needed = 0.0; // max over balls of mu * e^{n s}
  bool all_ok = true;
};

/// Uniform weights on the family; a ball is the cylinder of the first n digits
/// of its center (n = 0 is the whole space).
EdpReport edp_ball_check(const GluedFamily& family, const std::vector<std::pair<Digits, size_t>>& balls);

}  // namespace betalab
