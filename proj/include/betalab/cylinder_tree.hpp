#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "betalab/beta.hpp"
#include "betalab/interval.hpp"
#include "betalab/parry.hpp"
#include "betalab/symbols.hpp"

namespace betalab {

/// A finite set of cylinders stored as a digit trie. Identical subtrees are
/// shared, so a tree built from an automaton has at most (depth x states) nodes.
/// Leaves are the cylinders; a leaf never has children.
class CylinderTree {
 public:
  struct Node {
    std::uint32_t depth = 0;
    bool leaf = false;
    std::vector<std::pair<Digit, std::uint32_t>> children;  // sorted by digit
  };

  /// {"depth": D (optional), "bound": b (optional), "root": trie}; a trie node is
  /// an object {digit: subtree} with "$": true marking a leaf.
  static CylinderTree from_json(const std::string& text);
  std::string to_json() const;

  static CylinderTree full_shift(int bound, size_t depth);
  /// Admissible words of Sigma_beta of the given length.
  static CylinderTree from_beta(const BetaNumber& beta, size_t depth);
  /// Words accepted by the Markov approximation Sigma_beta(n).
  static CylinderTree from_markov(const MarkovApprox& m, size_t depth);
  static CylinderTree from_words(const std::vector<Digits>& words, int bound);
  static CylinderTree single_stream(const Digits& w, size_t depth);

  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::uint32_t root() const { return root_; }
  size_t node_count() const { return nodes_.size(); }
  int bound() const { return bound_; }
  /// Smallest and largest leaf depth.
  size_t min_leaf_depth() const { return min_depth_; }
  size_t max_leaf_depth() const { return max_depth_; }
  /// Number of tree paths reaching depth k (leaves above k do not count).
  mpz_class paths_at(size_t k) const;
  bool contains_prefix(const Digits& w) const;

 private:
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  int bound_ = 1;
  size_t min_depth_ = 0;
  size_t max_depth_ = 0;

  friend class TreeBuilder;
};

/// M(Z, s, N): minimal sum of exp(-s * depth) over covers of the leaves by tree
/// cylinders of depth >= N. DepthTooShallow when N exceeds the shallowest leaf.
double bowen_cover_sum(const CylinderTree& tree, double s, size_t n_min);

struct BowenReport {
  double entropy = 0.0;  // s with M(Z, s, N) = 1
  size_t n_min = 0;
  size_t depth = 0;
  double count_growth = 0.0;  // log(paths at depth) / depth, for cross-checking
  bool monotone_in_n = true;
  size_t grid_points = 0;
};

/// Bisection on s at N = n_min (0 means the shallowest leaf depth). The
/// certificate checks that M is nondecreasing in N on an (s, N) grid.
BowenReport bowen_entropy(const CylinderTree& tree, size_t n_min = 0, double tol = 1e-10);

struct CylinderDiameter {
  Interval lower;  // beta^-(n + z_n(beta))
  Interval upper;  // beta^-n
  Interval exact;  // beta^-(n + forced zeros after the word)
  long z_n = 0;
  long forced = 0;
  bool z_is_lower_bound = false;
  bool bounds_coincide = false;
};

/// Diameter of C_n(word) in the d_beta metric.
CylinderDiameter cylinder_diameter_bounds(const BetaNumber& beta, const SymbolWord& word);

struct DimensionBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool z_at_least_one = false;
  bool certified_equal = false;
};

/// upper = h / log beta; lower = h / ((1 + z) log beta) when z < 1. A
/// bounded-z certificate makes the two coincide.
DimensionBounds dimension_bounds(double h, const BetaNumber& beta, double z_ratio, bool bounded_z = false);

struct BoxRow {
  size_t depth = 0;
  double single_scale = 0.0;  // alpha with H(alpha, beta^-depth) = 1
  double two_scale = 0.0;     // box-counting slope between depth/2 and depth
};

struct BoxReport {
  std::vector<BoxRow> rows;
  double estimate = 0.0;  // two-scale value at the deepest depth
  double bowen_over_log_beta = 0.0;
  double sandwich_width = 0.0;
  bool consistent = true;  // |estimate - bowen/log beta| within the width (plus 0.05 slack)
};

/// Cover cost H(Z, alpha, delta = beta^-depth) over tree cylinders with d_beta
/// diameters; the diameter of a node is beta^-(k) with k the depth of its
/// first branching point (or its deepest leaf).
double box_cover_sum(const CylinderTree& tree, const BetaNumber& beta, double alpha, size_t depth);
/// Number of maximal tree cylinders with diameter <= beta^-depth.
double box_cover_count(const CylinderTree& tree, size_t depth);
BoxReport box_dimension_estimate(const CylinderTree& tree, const BetaNumber& beta, const std::vector<size_t>& depths,
                                 double z_ratio = 0.0);

}  // namespace betalab
