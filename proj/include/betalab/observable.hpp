#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "betalab/symbols.hpp"

namespace betalab {

/// Locally constant observable of range r: its value at a point depends only
/// on the first r digits.
class Observable {
 public:
  Observable(int range, int bound, std::vector<double> table, std::string name);

  /// "freq:d" (indicator of digit d), "const:c", "digit" (value of the first
  /// digit), "block:PATTERN" (indicator that the point starts with PATTERN).
  static Observable parse(std::string_view spec, int bound);

  int range() const { return r_; }
  int bound() const { return bound_; }
  const std::string& name() const { return name_; }
  double value(const Digit* block) const;
  double sup_norm() const { return norm_; }
  /// max - min over all blocks.
  double oscillation() const { return osc_; }

  /// Birkhoff average over the first n digits of w, truncated to the
  /// n - r + 1 complete windows.
  double average(const Digits& w, size_t n) const;
  double sum(const Digit* w, size_t n) const;
  /// Exact per-period average along v repeated forever.
  double periodic_average(const Digits& v) const;

 private:
  int r_;
  int bound_;
  std::vector<double> table_;
  std::string name_;
  double norm_ = 0.0;
  double osc_ = 0.0;
};

}  // namespace betalab
