#include "betalab/cylinder_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include "json.hpp"

#include "betalab/errors.hpp"

namespace betalab {

class TreeBuilder {
 public:
  explicit TreeBuilder(int bound) { tree_.bound_ = bound; }

  std::uint32_t leaf(std::uint32_t depth) { return intern(depth, true, {}); }

  // Children must already be interned, so every child id is below its parent.
  std::uint32_t inner(std::uint32_t depth, std::vector<std::pair<Digit, std::uint32_t>> children) {
    std::sort(children.begin(), children.end());
    return intern(depth, false, std::move(children));
  }

  CylinderTree finish(std::uint32_t root) {
    tree_.root_ = root;
    size_t lo = SIZE_MAX, hi = 0;
    for (const auto& n : tree_.nodes_)
      if (n.leaf) lo = std::min<size_t>(lo, n.depth), hi = std::max<size_t>(hi, n.depth);
    tree_.min_depth_ = lo == SIZE_MAX ? 0 : lo;
    tree_.max_depth_ = hi;
    return std::move(tree_);
  }

 private:
  std::uint32_t intern(std::uint32_t depth, bool is_leaf, std::vector<std::pair<Digit, std::uint32_t>> children) {
    std::vector<std::uint32_t> key{depth, is_leaf ? 1u : 0u};
    for (const auto& [d, c] : children) key.push_back(d), key.push_back(c);
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(tree_.nodes_.size());
    tree_.nodes_.push_back({depth, is_leaf, std::move(children)});
    index_.emplace(std::move(key), id);
    return id;
  }

  CylinderTree tree_;
  std::map<std::vector<std::uint32_t>, std::uint32_t> index_;
};

namespace {

using Step = std::function<std::optional<size_t>(size_t state, Digit d)>;

// Hash-consed unrolling of a deterministic automaton to the given depth.
CylinderTree unroll(int bound, size_t depth, const Step& step) {
  TreeBuilder b(bound);
  std::map<std::pair<size_t, size_t>, std::optional<std::uint32_t>> memo;
  std::function<std::optional<std::uint32_t>(size_t, size_t)> go = [&](size_t k, size_t state) {
    const auto key = std::make_pair(k, state);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::optional<std::uint32_t> id;
    if (k == depth) {
      id = b.leaf(static_cast<std::uint32_t>(k));
    } else {
      std::vector<std::pair<Digit, std::uint32_t>> kids;
      for (int d = 0; d <= bound; ++d) {
        const auto next = step(state, static_cast<Digit>(d));
        if (!next) continue;
        if (auto c = go(k + 1, *next)) kids.emplace_back(static_cast<Digit>(d), *c);
      }
      if (!kids.empty()) id = b.inner(static_cast<std::uint32_t>(k), std::move(kids));
    }
    memo.emplace(key, id);
    return id;
  };
  const auto root = go(0, 0);
  if (!root) throw Error(ErrorKind::NotFound, "automaton accepts no word of length " + std::to_string(depth));
  return b.finish(*root);
}

void check_depth(size_t depth) {
  if (depth < 1) throw Error(ErrorKind::Parse, "tree depth must be >= 1");
}

}  // namespace

CylinderTree CylinderTree::full_shift(int bound, size_t depth) {
  check_depth(depth);
  return unroll(bound, depth, [](size_t, Digit) { return std::optional<size_t>(0); });
}

CylinderTree CylinderTree::from_beta(const BetaNumber& beta, size_t depth) {
  check_depth(depth);
  const PrefixGraph g(beta, depth);
  return unroll(beta.digit_bound(), depth, [&g](size_t v, Digit d) { return g.step(v, d); });
}

CylinderTree CylinderTree::from_markov(const MarkovApprox& m, size_t depth) {
  check_depth(depth);
  const Digits labels = m.approx().truncation;
  const size_t states = labels.size();
  return unroll(m.base().digit_bound(), depth, [&labels, states](size_t v, Digit d) -> std::optional<size_t> {
    if (d < labels[v]) return 0;
    if (d == labels[v] && v + 1 < states) return v + 1;
    return std::nullopt;
  });
}

CylinderTree CylinderTree::single_stream(const Digits& w, size_t depth) {
  check_depth(depth);
  if (w.size() < depth) throw Error(ErrorKind::LengthMismatch, "stream prefix shorter than the tree depth");
  return unroll(std::max(1, max_digit(w)), depth,
                [&w](size_t k, Digit d) { return d == w[k] ? std::optional<size_t>(k + 1) : std::nullopt; });
}

CylinderTree CylinderTree::from_words(const std::vector<Digits>& words, int bound) {
  if (words.empty()) throw Error(ErrorKind::Parse, "no words given");
  std::vector<Digits> sorted(words);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& w : sorted) {
    if (w.empty()) throw Error(ErrorKind::Parse, "empty word in a cylinder set");
    if (max_digit(w) > bound) throw Error(ErrorKind::AlphabetMismatch, "digit above the bound in " + format_digits(w));
  }
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    const auto& a = sorted[i];
    const auto& b = sorted[i + 1];
    if (a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin()))
      throw Error(ErrorKind::Parse, "cylinder " + format_digits(a) + " contains " + format_digits(b));
  }
  TreeBuilder b(bound);
  // Sorted words sharing a prefix are contiguous.
  std::function<std::uint32_t(size_t, size_t, size_t)> go = [&](size_t lo, size_t hi, size_t k) {
    if (sorted[lo].size() == k) return b.leaf(static_cast<std::uint32_t>(k));
    std::vector<std::pair<Digit, std::uint32_t>> kids;
    size_t i = lo;
    while (i < hi) {
      const Digit d = sorted[i][k];
      size_t j = i;
      while (j < hi && sorted[j][k] == d) ++j;
      kids.emplace_back(d, go(i, j, k + 1));
      i = j;
    }
    return b.inner(static_cast<std::uint32_t>(k), std::move(kids));
  };
  return b.finish(go(0, sorted.size(), 0));
}

CylinderTree CylinderTree::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("tree JSON: ") + e.what());
  }
  const nlohmann::json& trie = doc.contains("root") ? doc["root"] : doc;
  std::vector<Digits> words;
  int bound = 1;
  Digits path;
  std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& node) {
    if (!node.is_object()) throw Error(ErrorKind::Parse, "tree nodes must be JSON objects");
    bool leaf = false;
    size_t kids = 0;
    for (const auto& [key, value] : node.items()) {
      if (key == "$") {
        leaf = value.is_boolean() ? value.get<bool>() : true;
        continue;
      }
      Digits d;
      try {
        d = parse_digits(key);
      } catch (const Error&) {
        throw Error(ErrorKind::Parse, "bad digit key in tree: " + key);
      }
      if (d.size() != 1) throw Error(ErrorKind::Parse, "tree keys must be single digits: " + key);
      bound = std::max<int>(bound, d[0]);
      path.push_back(d[0]);
      walk(value);
      path.pop_back();
      ++kids;
    }
    if (leaf && kids > 0) throw Error(ErrorKind::Parse, "leaf " + format_digits(path) + " has children");
    if (!leaf && kids == 0) throw Error(ErrorKind::Parse, "node " + format_digits(path) + " is neither leaf nor branch");
    if (leaf) words.push_back(path);
  };
  walk(trie);
  if (doc.contains("bound")) bound = std::max(bound, doc["bound"].get<int>());
  auto tree = from_words(words, bound);
  if (doc.contains("depth") && doc["depth"].get<size_t>() != tree.max_leaf_depth())
    throw Error(ErrorKind::LengthMismatch, "declared depth differs from the deepest leaf");
  return tree;
}

std::string CylinderTree::to_json() const {
  if (paths_at(max_depth_) > 1000000) throw Error(ErrorKind::BudgetExceeded, "tree too large to expand as JSON");
  std::function<nlohmann::json(std::uint32_t)> emit = [&](std::uint32_t id) {
    nlohmann::json j = nlohmann::json::object();
    const Node& n = nodes_[id];
    if (n.leaf) j["$"] = true;
    for (const auto& [d, c] : n.children) j[format_digits({d})] = emit(c);
    return j;
  };
  nlohmann::json doc;
  doc["depth"] = max_depth_;
  doc["bound"] = bound_;
  doc["root"] = emit(root_);
  return doc.dump();
}

mpz_class CylinderTree::paths_at(size_t k) const {
  std::vector<mpz_class> cnt(nodes_.size());
  for (size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.depth == k) {
      cnt[id] = 1;
    } else if (n.depth > k || n.leaf) {
      cnt[id] = 0;
    } else {
      cnt[id] = 0;
      for (const auto& [d, c] : n.children) cnt[id] += cnt[c];
    }
  }
  return cnt[root_];
}

bool CylinderTree::contains_prefix(const Digits& w) const {
  std::uint32_t id = root_;
  for (Digit d : w) {
    const Node& n = nodes_[id];
    if (n.leaf) return true;
    const auto it = std::find_if(n.children.begin(), n.children.end(), [d](const auto& p) { return p.first == d; });
    if (it == n.children.end()) return false;
    id = it->second;
  }
  return true;
}

double bowen_cover_sum(const CylinderTree& tree, double s, size_t n_min) {
  if (n_min > tree.min_leaf_depth())
    throw Error(ErrorKind::DepthTooShallow, "N = " + std::to_string(n_min) + " exceeds the leaf depth " +
                                                std::to_string(tree.min_leaf_depth()));
  std::vector<double> cost(tree.node_count());
  for (size_t id = 0; id < cost.size(); ++id) {
    const auto& n = tree.node(static_cast<std::uint32_t>(id));
    const double own = std::exp(-s * n.depth);
    if (n.leaf) {
      cost[id] = own;
      continue;
    }
    double sum = 0.0;
    for (const auto& [d, c] : n.children) sum += cost[c];
    cost[id] = n.depth >= n_min ? std::min(own, sum) : sum;
  }
  return cost[tree.root()];
}

namespace {

// Root of a decreasing function f on [0, infinity) with f(0) >= 0, or 0.
double decreasing_root(const std::function<double(double)>& f, double hi, double tol) {
  if (f(0.0) <= 0.0) return 0.0;
  int guard = 0;
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw Error(ErrorKind::NotFound, "no sign change while bracketing");
  }
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BowenReport bowen_entropy(const CylinderTree& tree, size_t n_min, double tol) {
  const size_t depth = tree.min_leaf_depth();
  if (n_min == 0) n_min = depth;
  BowenReport r;
  r.n_min = n_min;
  r.depth = depth;
  const double hi = std::log(static_cast<double>(tree.bound() + 1)) + 1.0;
  r.entropy = decreasing_root([&](double s) { return std::log(bowen_cover_sum(tree, s, n_min)); }, hi, tol);
  r.count_growth = log_count(tree.paths_at(depth)) / static_cast<double>(depth);
  for (int i = 0; i <= 10; ++i) {
    const double s = hi * i / 10.0;
    double prev = bowen_cover_sum(tree, s, 1);
    for (size_t n = 2; n <= depth; ++n) {
      const double cur = bowen_cover_sum(tree, s, n);
      if (cur < prev * (1.0 - 1e-12)) r.monotone_in_n = false;
      prev = cur;
      ++r.grid_points;
    }
  }
  return r;
}

CylinderDiameter cylinder_diameter_bounds(const BetaNumber& beta, const SymbolWord& word) {
  const size_t n = word.size();
  if (n < 1) throw Error(ErrorKind::Parse, "cylinder word must be nonempty");
  if (!is_admissible(word.digits, beta))
    throw Error(ErrorKind::NotAdmissibleInput, "word is not admissible: " + format_digits(word.digits));
  const ZReport z = z_values(beta, n);
  const PrefixGraph g(beta, n);
  const size_t v = *g.read(word.digits);
  CylinderDiameter out;
  out.z_n = z.z[n - 1];
  out.z_is_lower_bound = z.lower_bound[n - 1];
  out.forced = v == 0 ? 0 : g.z(v);
  const Interval inv = Interval::point(1, 128) / beta.value(128);
  out.upper = inv.pow(static_cast<unsigned>(n));
  out.lower = inv.pow(static_cast<unsigned>(n + static_cast<size_t>(out.z_n)));
  out.exact = inv.pow(static_cast<unsigned>(n + static_cast<size_t>(out.forced)));
  out.bounds_coincide = out.forced == out.z_n;
  return out;
}

DimensionBounds dimension_bounds(double h, const BetaNumber& beta, double z_ratio, bool bounded_z) {
  if (h < 0.0 || z_ratio < 0.0) throw Error(ErrorKind::Parse, "entropy and z ratio must be >= 0");
  DimensionBounds d;
  const double lb = beta.log_value();
  d.upper = h / lb;
  if (bounded_z) {
    d.lower = d.upper;
    d.certified_equal = true;
  } else if (z_ratio < 1.0) {
    d.lower = h / ((1.0 + z_ratio) * lb);
  } else {
    d.lower = 0.0;
    d.z_at_least_one = true;
  }
  return d;
}

namespace {

// Depth of the first branching point at or below each node (the leaf depth
// for a chain ending in a leaf).
std::vector<std::uint32_t> branch_depths(const CylinderTree& tree) {
  std::vector<std::uint32_t> e(tree.node_count());
  for (size_t id = 0; id < e.size(); ++id) {
    const auto& n = tree.node(static_cast<std::uint32_t>(id));
    e[id] = n.children.size() == 1 ? e[n.children.front().second] : n.depth;
  }
  return e;
}

}  // namespace

double box_cover_sum(const CylinderTree& tree, const BetaNumber& beta, double alpha, size_t depth) {
  if (depth > tree.min_leaf_depth())
    throw Error(ErrorKind::DepthTooShallow, "scale depth " + std::to_string(depth) + " exceeds the leaf depth " +
                                                std::to_string(tree.min_leaf_depth()));
  const auto e = branch_depths(tree);
  const double lb = beta.log_value();
  std::vector<double> cost(tree.node_count());
  for (size_t id = 0; id < cost.size(); ++id) {
    const auto& n = tree.node(static_cast<std::uint32_t>(id));
    const double own = std::exp(-alpha * lb * e[id]);
    double sum = 0.0;
    for (const auto& [d, c] : n.children) sum += cost[c];
    const bool allowed = e[id] >= depth;
    cost[id] = n.leaf ? own : (allowed ? std::min(own, sum) : sum);
  }
  return cost[tree.root()];
}

double box_cover_count(const CylinderTree& tree, size_t depth) {
  if (depth > tree.min_leaf_depth())
    throw Error(ErrorKind::DepthTooShallow, "scale depth " + std::to_string(depth) + " exceeds the leaf depth " +
                                                std::to_string(tree.min_leaf_depth()));
  const auto e = branch_depths(tree);
  std::vector<double> cnt(tree.node_count());
  for (size_t id = 0; id < cnt.size(); ++id) {
    const auto& n = tree.node(static_cast<std::uint32_t>(id));
    if (n.leaf || e[id] >= depth) {
      cnt[id] = 1.0;
      continue;
    }
    cnt[id] = 0.0;
    for (const auto& [d, c] : n.children) cnt[id] += cnt[c];
  }
  return cnt[tree.root()];
}

BoxReport box_dimension_estimate(const CylinderTree& tree, const BetaNumber& beta, const std::vector<size_t>& depths,
                                 double z_ratio) {
  if (depths.empty()) throw Error(ErrorKind::Parse, "no depths given");
  BoxReport rep;
  const double hi = std::log(static_cast<double>(tree.bound() + 1)) / beta.log_value() + 1.0;
  for (size_t d : depths) {
    if (d < 2) throw Error(ErrorKind::Parse, "box depths must be >= 2");
    BoxRow row;
    row.depth = d;
    row.single_scale =
        decreasing_root([&](double a) { return std::log(box_cover_sum(tree, beta, a, d)); }, hi, 1e-10);
    // Box-counting slope between two scales cancels the constant factor that biases a single scale.
    row.two_scale = (std::log(box_cover_count(tree, d)) - std::log(box_cover_count(tree, d / 2))) /
                    (static_cast<double>(d - d / 2) * beta.log_value());
    rep.rows.push_back(row);
  }
  const auto deepest = std::max_element(rep.rows.begin(), rep.rows.end(),
                                        [](const BoxRow& a, const BoxRow& b) { return a.depth < b.depth; });
  rep.estimate = deepest->two_scale;
  const auto bowen = bowen_entropy(tree, deepest->depth);
  const auto bounds = dimension_bounds(bowen.entropy, beta, z_ratio);
  rep.bowen_over_log_beta = bounds.upper;
  rep.sandwich_width = bounds.upper - bounds.lower;
  rep.consistent = std::abs(rep.estimate - rep.bowen_over_log_beta) <= rep.sandwich_width + 0.05;
  return rep;
}

}  // namespace betalab
