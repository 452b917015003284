#include "betalab/symbols.hpp"

#include <algorithm>
#include <cctype>

#include "betalab/errors.hpp"

namespace betalab {

SymbolWord::SymbolWord(Digits d, int b) : digits(std::move(d)), bound(b) {
  for (Digit x : digits)
    if (x > bound) throw Error(ErrorKind::AlphabetMismatch, "digit " + std::to_string(x) + " exceeds bound " + std::to_string(b));
}

Digit DigitSequence::at(size_t i) const {
  if (i < prefix.size()) return prefix[i];
  if (period.empty()) return 0;
  return period[(i - prefix.size()) % period.size()];
}

Digits DigitSequence::take(size_t n) const {
  Digits out(n);
  for (size_t i = 0; i < n; ++i) out[i] = at(i);
  return out;
}

SymbolStream SymbolStream::periodic(const DigitSequence& seq, int bound) {
  return SymbolStream([seq](size_t i) { return seq.at(i); }, bound);
}

Digit SymbolStream::at(size_t i) {
  while (prefix_.size() <= i) prefix_.push_back(gen_(prefix_.size()));
  return prefix_[i];
}

SymbolWord SymbolStream::take(size_t n) {
  if (n > 0) at(n - 1);
  return SymbolWord(Digits(prefix_.begin(), prefix_.begin() + static_cast<long>(n)), bound_);
}

namespace {

void parse_run(std::string_view text, size_t& pos, Digits& out, char stop) {
  while (pos < text.size() && text[pos] != stop) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<Digit>(c - '0'));
      ++pos;
    } else if (c == '[') {
      const size_t close = text.find(']', pos);
      if (close == std::string_view::npos || close == pos + 1)
        throw Error(ErrorKind::Parse, "unterminated bracketed symbol in '" + std::string(text) + "'");
      int v = 0;
      for (size_t k = pos + 1; k < close; ++k) {
        if (!std::isdigit(static_cast<unsigned char>(text[k])))
          throw Error(ErrorKind::Parse, "bad bracketed symbol in '" + std::string(text) + "'");
        v = v * 10 + (text[k] - '0');
        if (v > 255) throw Error(ErrorKind::Parse, "symbol too large in '" + std::string(text) + "'");
      }
      out.push_back(static_cast<Digit>(v));
      pos = close + 1;
    } else if (c == ',' || c == ' ') {
      ++pos;
    } else {
      throw Error(ErrorKind::Parse, std::string("unexpected character '") + c + "' in '" + std::string(text) + "'");
    }
  }
}

}  // namespace

Digits parse_digits(std::string_view text) {
  Digits out;
  size_t pos = 0;
  parse_run(text, pos, out, '\0');
  return out;
}

DigitSequence parse_digit_sequence(std::string_view text) {
  DigitSequence seq;
  size_t pos = 0;
  parse_run(text, pos, seq.prefix, '(');
  if (pos < text.size()) {
    ++pos;
    parse_run(text, pos, seq.period, ')');
    if (pos >= text.size()) throw Error(ErrorKind::Parse, "missing ')' in '" + std::string(text) + "'");
    if (pos + 1 != text.size()) throw Error(ErrorKind::Parse, "text after period in '" + std::string(text) + "'");
    if (seq.period.empty()) throw Error(ErrorKind::Parse, "empty period in '" + std::string(text) + "'");
    if (std::all_of(seq.period.begin(), seq.period.end(), [](Digit d) { return d == 0; })) seq.period.clear();
  }
  return seq;
}

std::string format_digits(const Digits& d) {
  std::string s;
  for (Digit x : d) {
    if (x < 10)
      s.push_back(static_cast<char>('0' + x));
    else
      s += "[" + std::to_string(x) + "]";
  }
  return s;
}

std::string format_sequence(const DigitSequence& s) {
  if (s.finite()) return format_digits(s.prefix);
  return format_digits(s.prefix) + "(" + format_digits(s.period) + ")";
}

int compare_prefix(const Digit* a, const Digit* b, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

int max_digit(const Digits& d) {
  int m = 0;
  for (Digit x : d) m = std::max(m, static_cast<int>(x));
  return m;
}

size_t hamming(const Digits& a, const Digits& b) {
  size_t n = 0;
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) n += a[i] != b[i];
  return n + std::max(a.size(), b.size()) - std::min(a.size(), b.size());
}

}  // namespace betalab
