#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace betalab {

using Digit = std::uint8_t;
using Digits = std::vector<Digit>;

/// Finite word over {0, ..., bound}.
struct SymbolWord {
  Digits digits;
  int bound = 1;

  SymbolWord() = default;
  SymbolWord(Digits d, int b);
  size_t size() const { return digits.size(); }
  Digit operator[](size_t i) const { return digits[i]; }
  friend bool operator==(const SymbolWord& a, const SymbolWord& b) { return a.digits == b.digits; }
};

/// prefix followed by period repeated forever; an empty period means
/// trailing zeros (a finite sequence).
struct DigitSequence {
  Digits prefix;
  Digits period;

  bool finite() const { return period.empty(); }
  Digit at(size_t i) const;
  Digits take(size_t n) const;
};

/// Infinite stream with a lazily materialized prefix.
class SymbolStream {
 public:
  SymbolStream(std::function<Digit(size_t)> gen, int bound) : gen_(std::move(gen)), bound_(bound) {}
  static SymbolStream periodic(const DigitSequence& seq, int bound);

  Digit at(size_t i);
  SymbolWord take(size_t n);
  size_t materialized() const { return prefix_.size(); }
  int bound() const { return bound_; }

 private:
  std::function<Digit(size_t)> gen_;
  int bound_;
  Digits prefix_;
};

/// "201001", "[10]3[11]". Throws Error(Parse).
Digits parse_digits(std::string_view text);
/// Same syntax plus an optional "(period)" tail.
DigitSequence parse_digit_sequence(std::string_view text);

std::string format_digits(const Digits& d);
std::string format_sequence(const DigitSequence& s);

/// Lexicographic comparison over the first n symbols of both.
int compare_prefix(const Digit* a, const Digit* b, size_t n);

int max_digit(const Digits& d);
size_t hamming(const Digits& a, const Digits& b);

}  // namespace betalab
