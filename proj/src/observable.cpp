#include "betalab/observable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "betalab/errors.hpp"

namespace betalab {

Observable::Observable(int range, int bound, std::vector<double> table, std::string name)
    : r_(range), bound_(bound), table_(std::move(table)), name_(std::move(name)) {
  if (r_ < 1) throw Error(ErrorKind::Parse, "observable range must be >= 1");
  double lo = table_.empty() ? 0.0 : table_[0], hi = lo;
  for (double v : table_) {
    norm_ = std::max(norm_, std::abs(v));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  osc_ = hi - lo;
}

Observable Observable::parse(std::string_view spec, int bound) {
  const int base = bound + 1;
  const std::string s(spec);
  const size_t colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (head == "freq") {
    char* end = nullptr;
    const long d = std::strtol(arg.c_str(), &end, 10);
    if (arg.empty() || *end != '\0' || d < 0 || d > bound) throw Error(ErrorKind::Parse, "bad observable '" + s + "'");
    std::vector<double> t(static_cast<size_t>(base), 0.0);
    t[static_cast<size_t>(d)] = 1.0;
    return Observable(1, bound, t, s);
  }
  if (head == "const") {
    char* end = nullptr;
    const double c = std::strtod(arg.c_str(), &end);
    if (arg.empty() || *end != '\0') throw Error(ErrorKind::Parse, "bad observable '" + s + "'");
    return Observable(1, bound, std::vector<double>(static_cast<size_t>(base), c), s);
  }
  if (head == "digit") {
    std::vector<double> t(static_cast<size_t>(base));
    for (int d = 0; d < base; ++d) t[static_cast<size_t>(d)] = d;
    return Observable(1, bound, t, s);
  }
  if (head == "block") {
    const Digits pat = parse_digits(arg);
    if (pat.empty() || pat.size() > 12 || max_digit(pat) > bound) throw Error(ErrorKind::Parse, "bad observable '" + s + "'");
    size_t size = 1;
    for (size_t i = 0; i < pat.size(); ++i) size *= static_cast<size_t>(base);
    std::vector<double> t(size, 0.0);
    size_t idx = 0;
    for (Digit d : pat) idx = idx * static_cast<size_t>(base) + d;
    t[idx] = 1.0;
    return Observable(static_cast<int>(pat.size()), bound, t, s);
  }
  throw Error(ErrorKind::Parse, "unknown observable '" + s + "'");
}

double Observable::value(const Digit* block) const {
  size_t idx = 0;
  for (int i = 0; i < r_; ++i) idx = idx * static_cast<size_t>(bound_ + 1) + block[i];
  return table_[idx];
}

double Observable::sum(const Digit* w, size_t n) const {
  double s = 0.0;
  if (n < static_cast<size_t>(r_)) return s;
  for (size_t i = 0; i + static_cast<size_t>(r_) <= n; ++i) s += value(w + i);
  return s;
}

double Observable::average(const Digits& w, size_t n) const {
  n = std::min(n, w.size());
  if (n < static_cast<size_t>(r_)) return 0.0;
  return sum(w.data(), n) / static_cast<double>(n - static_cast<size_t>(r_) + 1);
}

double Observable::periodic_average(const Digits& v) const {
  const size_t p = v.size();
  Digits ext(p + static_cast<size_t>(r_));
  for (size_t i = 0; i < ext.size(); ++i) ext[i] = v[i % p];
  double s = 0.0;
  for (size_t i = 0; i < p; ++i) s += value(ext.data() + i);
  return s / static_cast<double>(p);
}

}  // namespace betalab
