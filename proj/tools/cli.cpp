#include "cli.hpp"

#include <gmpxx.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "betalab/beta.hpp"
#include "betalab/cylinder_tree.hpp"
#include "betalab/errors.hpp"
#include "betalab/exotic.hpp"
#include "betalab/irregular.hpp"
#include "betalab/mistake.hpp"
#include "betalab/observable.hpp"
#include "betalab/parry.hpp"
#include "json.hpp"

namespace betalab::cli {

namespace {

using json = nlohmann::ordered_json;

struct Report {
  json results = json::object();
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void check(const std::string& name, bool ok) { checks.emplace_back(name, ok); }
  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    rows.push_back(std::move(r));
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(const mpz_class& z) { return z.get_str(); }
  static std::string cell(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
  }
  template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
  static std::string cell(I i) {
    return std::to_string(i);
  }
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  for (const auto& t : split(s, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stol(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad integer '" + t + "'");
    }
  }
  return out;
}

std::vector<size_t> parse_sizes(const std::string& s) {
  std::vector<size_t> out;
  for (long v : parse_longs(s)) {
    if (v < 0) throw Error(ErrorKind::Parse, "negative size " + std::to_string(v));
    out.push_back(static_cast<size_t>(v));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad number '" + t + "'");
    }
  }
  return out;
}

/// "1/4", "0.25", "3".
mpq_class parse_rational(std::string t) {
  if (t.empty()) throw Error(ErrorKind::Parse, "empty number");
  mpq_class q;
  const auto dot = t.find('.');
  if (dot == std::string::npos) {
    if (q.set_str(t, 10) != 0 || q.get_den() == 0) throw Error(ErrorKind::Parse, "bad rational '" + t + "'");
    q.canonicalize();
    return q;
  }
  std::string frac = t.substr(dot + 1);
  std::string whole = t.substr(0, dot);
  const bool neg = !whole.empty() && whole[0] == '-';
  if (neg) whole.erase(0, 1);
  if (whole.empty()) whole = "0";
  for (char c : whole + frac)
    if (c < '0' || c > '9') throw Error(ErrorKind::Parse, "bad decimal '" + t + "'");
  mpz_class num(whole + frac, 10), den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  q = mpq_class(num, den);
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

/// "2", "1.8", "7/4", "phi", "tribonacci", "figure", "poly:1,-1,-1", "digits:10(10)".
BetaNumber parse_beta(const std::string& spec) {
  if (spec == "phi" || spec == "golden") return BetaNumber::from_polynomial({1, -1, -1});
  if (spec == "tribonacci") return BetaNumber::from_polynomial({1, -1, -1, -1});
  if (spec == "figure") return beta_from_expansion(parse_digit_sequence("20(100)"));
  if (spec.rfind("poly:", 0) == 0) return BetaNumber::from_polynomial(parse_longs(spec.substr(5)));
  if (spec.rfind("digits:", 0) == 0) return beta_from_expansion(parse_digit_sequence(spec.substr(7)));
  return BetaNumber::from_decimal(spec);
}

// Exact integers stay numbers while they fit, strings beyond that.
json big_json(const mpz_class& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

json digits_json(const Digits& d) { return format_digits(d); }

std::vector<Digits> read_words(const std::string& file, const std::string& inline_list) {
  std::vector<Digits> out;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Parse, "cannot read " + file);
    std::string line;
    while (std::getline(in, line)) {
      const auto a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos || line[a] == '#') continue;
      const auto b = line.find_last_not_of(" \t\r");
      out.push_back(parse_digits(line.substr(a, b - a + 1)));
    }
  }
  for (const auto& t : split(inline_list, ',')) out.push_back(parse_digits(t));
  if (out.empty()) throw Error(ErrorKind::Parse, "no words given (--words or --words-file)");
  return out;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::NotIncreasing:
    case ErrorKind::NotSelfAdmissible:
    case ErrorKind::AlphabetMismatch:
    case ErrorKind::LengthMismatch:
    case ErrorKind::InvalidBeta:
      return 2;
    case ErrorKind::UndecidableAtPrecision:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::DepthTooShallow:
      return 3;
    default:
      return 1;
  }
}

// Greedy pool of admissible words of length n, pairwise Hamming distance >= 3.
std::vector<Digits> small_pool(const BetaNumber& beta, size_t n, size_t want) {
  std::vector<Digits> pool;
  PrefixGraph g(beta, n + 1);
  Digits cur;
  std::function<void(size_t)> dfs = [&](size_t v) {
    if (pool.size() >= want) return;
    if (cur.size() == n) {
      for (const auto& p : pool)
        if (hamming(p, cur) < 3) return;
      pool.push_back(cur);
      return;
    }
    for (int d = 0; d <= beta.digit_bound(); ++d) {
      const auto nx = g.step(v, static_cast<Digit>(d));
      if (!nx) continue;
      cur.push_back(static_cast<Digit>(d));
      dfs(*nx);
      cur.pop_back();
    }
  };
  dfs(0);
  if (pool.size() < want)
    throw Error(ErrorKind::EmptyPool, "only " + std::to_string(pool.size()) + " separated words of length " +
                                          std::to_string(n));
  return pool;
}

struct Common {
  std::string emit = "json";
  std::string out_file;
  std::uint64_t seed = 7;
  long precision_bits = 0;
};

struct Command {
  CLI::App* app;
  std::function<void(Report&)> run;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--emit", c.emit, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--out", c.out_file, "Write the report to this file instead of stdout");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--precision-bits", c.precision_bits,
                  "Guard-bit cap (default 256, or BETALAB_PRECISION_BITS)");
}

struct BetaOpt {
  std::string beta;
  std::string digits;
  std::map<CLI::App*, std::string> fallback;

  void add(CLI::App* sub, const std::string& dflt = "") {
    auto* o = sub->add_option("--beta", beta,
                              "2, 1.8, 7/4, phi, tribonacci, figure, poly:c_d,...,c_0 or digits:w(period)");
    if (!dflt.empty()) {
      o->default_str(dflt);
      fallback[sub] = dflt;
    }
    sub->add_option("--beta-digits", digits, "Expansion of 1, e.g. 10(10); overrides --beta");
  }
  // Only one subcommand runs, so its default is filled in after parsing.
  void resolve(CLI::App* chosen) {
    if (beta.empty() && fallback.count(chosen)) beta = fallback[chosen];
  }
  BetaNumber get() const {
    if (!digits.empty()) return beta_from_expansion(parse_digit_sequence(digits));
    if (beta.empty()) throw UsageError("--beta or --beta-digits is required");
    return parse_beta(beta);
  }
};

json beta_json(const BetaNumber& b) {
  return json{{"describe", b.describe()},
              {"approx", b.approx()},
              {"digit_bound", b.digit_bound()},
              {"source", std::string(source_name(b.source()))}};
}

json interval_json(const Interval& i) { return json{{"lo", i.lower()}, {"hi", i.upper()}}; }

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"betalab: beta-shift computations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common common;
  BetaOpt bopt;
  std::map<std::string, Command> cmds;

  auto sub = [&](const std::string& name, const std::string& desc, const std::string& csv) {
    auto* s = app.add_subcommand(name, desc + "\nCSV columns: " + csv);
    add_common(s, common);
    return s;
  };

  // ---- beta_core
  size_t n = 16;
  std::string x_text = "0";
  {
    auto* s = sub("expand", "Greedy expansion of a rational x in [0,1)", "j, digit");
    bopt.add(s);
    s->add_option("--x", x_text, "x as 1/4 or 0.25")->capture_default_str();
    s->add_option("--n", n, "Digits")->capture_default_str();
    cmds["expand"] = {s, [&](Report& r) {
                        const auto beta = bopt.get();
                        const mpq_class x = parse_rational(x_text);
                        const auto w = greedy_expansion(x, beta, n);
                        r.results = {{"beta", beta_json(beta)}, {"x", x.get_str()}, {"digits", digits_json(w.digits)}};
                        r.check("reconstruction_within_beta_pow_minus_n", reconstruction_ok(x, w, beta));
                        r.check("admissible", is_admissible(w, beta));
                        r.columns = {"j", "digit"};
                        for (size_t j = 0; j < w.size(); ++j) r.row(j + 1, static_cast<int>(w[j]));
                      }};
  }
  {
    auto* s = sub("expansion-of-one", "First n digits of w(beta)", "j, digit");
    bopt.add(s);
    s->add_option("--n", n, "Digits")->capture_default_str();
    cmds["expansion-of-one"] = {s, [&](Report& r) {
                                  const auto beta = bopt.get();
                                  const auto w = expansion_of_one(beta, n);
                                  r.results = {{"beta", beta_json(beta)}, {"digits", digits_json(w.digits)}};
                                  if (auto ex = beta.w_exact()) r.results["exact"] = format_sequence(*ex);
                                  r.check("prefix_self_admissible", is_self_admissible(DigitSequence{w.digits, {}}));
                                  r.columns = {"j", "digit"};
                                  for (size_t j = 0; j < w.size(); ++j) r.row(j + 1, static_cast<int>(w[j]));
                                }};
  }
  std::string digit_seq;
  {
    auto* s = sub("beta-from-digits", "The beta whose expansion of 1 is the given sequence", "field, value");
    s->add_option("--digits", digit_seq, "Eventually periodic digits, e.g. 20(100)")->required();
    s->add_option("--n", n, "Digits to compare")->capture_default_str();
    cmds["beta-from-digits"] = {s, [&](Report& r) {
                                  const auto seq = parse_digit_sequence(digit_seq);
                                  const auto beta = beta_from_expansion(seq);
                                  const auto w = beta.w_prefix(n);
                                  const auto lit = quasi_greedy_form(seq).take(n);
                                  r.results = {{"beta", beta_json(beta)},
                                               {"enclosure", beta.value(128).to_string(25)},
                                               {"w_prefix", digits_json(w)}};
                                  r.check("expansion_matches_input", w == seq.take(n) || w == lit);
                                  r.columns = {"field", "value"};
                                  r.row("approx", beta.approx());
                                  r.row("digit_bound", beta.digit_bound());
                                  r.row("w_prefix", format_digits(w));
                                }};
  }

  // ---- parry_automaton
  std::string word;
  {
    auto* s = sub("admissible", "Parry criterion on a finite word", "word, admissible");
    bopt.add(s);
    s->add_option("--word", word, "Digits")->required();
    cmds["admissible"] = {s, [&](Report& r) {
                            const auto beta = bopt.get();
                            const auto w = parse_digits(word);
                            if (max_digit(w) > beta.digit_bound())
                              throw Error(ErrorKind::AlphabetMismatch, "digit above the bound of beta");
                            const bool ok = is_admissible(w, beta);
                            r.results = {{"beta", beta_json(beta)}, {"word", word}, {"admissible", ok}};
                            r.columns = {"word", "admissible"};
                            r.row(word, ok);
                          }};
  }
  {
    auto* s = sub("graph", "Truncated labelled graph G_beta", "vertex, label, back_edges, z, z_lower_bound");
    bopt.add(s);
    s->add_option("--n", n, "Vertices")->capture_default_str();
    cmds["graph"] = {s, [&](Report& r) {
                       const auto beta = bopt.get();
                       PrefixGraph g(beta, n);
                       json vs = json::array();
                       r.columns = {"vertex", "label", "back_edges", "z", "z_lower_bound"};
                       for (size_t i = 0; i < n; ++i) {
                         std::string back;
                         for (Digit d : g.back_edges(i)) back += std::to_string(d);
                         vs.push_back({{"vertex", i + 1},
                                       {"label", g.forward_label(i)},
                                       {"back_edges", back},
                                       {"z", g.z(i)},
                                       {"z_lower_bound", static_cast<bool>(g.z_is_lower_bound(i))}});
                         r.row(i + 1, static_cast<int>(g.forward_label(i)), back, g.z(i),
                               static_cast<bool>(g.z_is_lower_bound(i)));
                       }
                       r.results = {{"beta", beta_json(beta)}, {"vertices", vs}};
                     }};
  }
  {
    auto* s = sub("count", "Admissible words of each length up to n", "n, count, log_count_over_n");
    bopt.add(s);
    s->add_option("--n", n, "Largest length")->capture_default_str();
    cmds["count"] = {s, [&](Report& r) {
                       const auto beta = bopt.get();
                       const auto c = count_series(beta, n);
                       r.columns = {"n", "count", "log_count_over_n"};
                       json rows = json::array();
                       bool monotone = true;
                       double prev = INFINITY;
                       for (size_t k = 1; k <= n; ++k) {
                         const double rate = log_count(c[k]) / static_cast<double>(k);
                         monotone = monotone && rate <= prev + 1e-12;
                         prev = rate;
                         rows.push_back({{"n", k}, {"count", big_json(c[k])}, {"log_count_over_n", rate}});
                         r.row(k, c[k], rate);
                       }
                       r.results = {{"beta", beta_json(beta)},
                                    {"count", big_json(c[n])},
                                    {"log_beta", beta.log_value()},
                                    {"rate_nonincreasing", monotone},
                                    {"series", rows}};
                     }};
  }
  size_t nmax_z = 64, nmax_katok = 12, nmax_dims = 64, nmax_exotic = 14;
  {
    auto* s = sub("zvalues", "z_n(beta): forced zeros after the prefix of w(beta)", "n, z, lower_bound");
    bopt.add(s);
    s->add_option("--nmax", nmax_z, "Largest n")->capture_default_str();
    cmds["zvalues"] = {s, [&](Report& r) {
                         const auto beta = bopt.get();
                         const auto z = z_values(beta, nmax_z);
                         r.results = {{"beta", beta_json(beta)},
                                      {"z", z.z},
                                      {"ratio_sup", z.ratio_sup.get_str()},
                                      {"ratio_argmax", z.ratio_argmax},
                                      {"max_z", z.max_z},
                                      {"max_z_first_half", z.max_z_first_half},
                                      {"max_already_in_first_half", z.max_in_first_half}};
                         r.columns = {"n", "z", "lower_bound"};
                         for (size_t k = 0; k < z.z.size(); ++k)
                           r.row(k + 1, z.z[k], static_cast<bool>(z.lower_bound[k]));
                       }};
  }
  std::string then_word;
  {
    auto* s = sub("repair", "Single-symbol repair of a concatenation", "field, value");
    bopt.add(s);
    s->add_option("--word", word, "Admissible digits")->required();
    s->add_option("--then", then_word, "Admissible continuation glued after the repaired word");
    cmds["repair"] = {s, [&](Report& r) {
                        const auto beta = bopt.get();
                        const SymbolWord w(parse_digits(word), beta.digit_bound());
                        const auto rep = repair_word(w, beta);
                        r.results = {{"beta", beta_json(beta)}, {"input", word}, {"output", format_digits(rep.word.digits)}};
                        r.results["changed"] = rep.changed ? json(*rep.changed) : json(nullptr);
                        r.check("output_admissible", is_admissible(rep.word, beta));
                        r.check("at_most_one_change", hamming(w.digits, rep.word.digits) <= 1);
                        if (!then_word.empty()) {
                          const auto nx = parse_digits(then_word);
                          if (!is_admissible(nx, beta))
                            throw Error(ErrorKind::NotAdmissibleInput, "continuation is not admissible");
                          Digits glued = rep.word.digits;
                          glued.insert(glued.end(), nx.begin(), nx.end());
                          r.results["glued"] = format_digits(glued);
                          r.check("glued_admissible", is_admissible(glued, beta));
                        }
                        r.columns = {"field", "value"};
                        r.row("output", format_digits(rep.word.digits));
                        r.row("changed", rep.changed ? std::to_string(*rep.changed) : std::string("none"));
                      }};
  }
  size_t depth = 10, tree_depth = 20;
  {
    auto* s = sub("markov", "Simple beta-number approximation beta(n) and its Markov shift",
                  "field, value");
    bopt.add(s);
    s->add_option("--n", n, "Truncation index")->capture_default_str();
    s->add_option("--depth", depth, "Exhaustive length for the sub-language check")->capture_default_str();
    cmds["markov"] = {s, [&](Report& r) {
                        const auto beta = bopt.get();
                        MarkovApprox m(beta, n);
                        const auto& a = m.approx();
                        bool sub_language = true;
                        size_t accepted = 0;
                        for (size_t len = 1; len <= depth; ++len) {
                          Digits w(len, 0);
                          const int b = beta.digit_bound();
                          while (true) {
                            if (m.accepts(w)) {
                              ++accepted;
                              sub_language = sub_language && is_admissible(w, beta);
                            }
                            size_t i = len;
                            while (i > 0 && w[i - 1] == b) w[--i] = 0;
                            if (i == 0) break;
                            ++w[i - 1];
                          }
                        }
                        const double bn = a.beta.approx();
                        r.results = {{"beta", beta_json(beta)},
                                     {"beta_n", bn},
                                     {"requested_index", a.requested_index},
                                     {"effective_index", a.effective_index},
                                     {"truncation", format_digits(a.truncation)},
                                     {"states", m.states()},
                                     {"gap", beta.approx() - bn},
                                     {"entropy_from_counts", m.entropy_from_counts(32)},
                                     {"log_beta_n", a.beta.log_value()},
                                     {"accepted_words_checked", accepted}};
                        r.check("beta_n_at_most_beta", !(a.beta.value(128).lower() > beta.value(128).upper()));
                        r.check("accepted_words_admissible", sub_language);
                        r.columns = {"field", "value"};
                        r.row("beta_n", bn);
                        r.row("effective_index", a.effective_index);
                        r.row("gap", beta.approx() - bn);
                      }};
  }
  std::string phi_spec = "freq:1";
  size_t max_period = 8;
  {
    auto* s = sub("witnesses", "Periodic points with extreme averages of an observable",
                  "which, period, average");
    bopt.add(s);
    s->add_option("--phi", phi_spec, "freq:d, const:c, digit, block:PATTERN")->capture_default_str();
    s->add_option("--max-period", max_period, "Longest period tried")->capture_default_str();
    cmds["witnesses"] = {s, [&](Report& r) {
                           const auto beta = bopt.get();
                           const auto phi = Observable::parse(phi_spec, beta.digit_bound());
                           const auto wp = periodic_witnesses(beta, phi, max_period);
                           r.results = {{"beta", beta_json(beta)},
                                        {"phi", phi.name()},
                                        {"low", format_digits(wp.low)},
                                        {"low_average", wp.low_average},
                                        {"high", format_digits(wp.high)},
                                        {"high_average", wp.high_average},
                                        {"candidates", wp.candidates}};
                           r.check("low_periodic_admissible", periodic_admissible(wp.low, beta));
                           r.check("high_periodic_admissible", periodic_admissible(wp.high, beta));
                           r.check("averages_differ", wp.low_average < wp.high_average);
                           r.columns = {"which", "period", "average"};
                           r.row("low", format_digits(wp.low), wp.low_average);
                           r.row("high", format_digits(wp.high), wp.high_average);
                         }};
  }

  // ---- mistake_entropy
  std::string g_spec = "zero", words_file, words_inline;
  int window = 1;
  bool exact = false;
  size_t n_expect = 0;
  auto set_cmd = [&](const std::string& name, bool separated) {
    auto* s = sub(name,
                  separated ? "Largest (g; n, eps)-separated subset of a word set"
                            : "Smallest (g; n, eps)-spanning subset of a word set",
                  "role, index, word");
    s->add_option("--n", n_expect, "Expected word length (0: from the words)");
    s->add_option("--g", g_spec, "zero, const:k, log, sqrt, optional 2* prefix")->capture_default_str();
    s->add_option("--window", window, "Window m of eps(m)")->capture_default_str();
    s->add_option("--words-file", words_file, "One word per line");
    s->add_option("--words", words_inline, "Comma separated words");
    s->add_flag("--exact", exact, "Exact search (|Z| <= 20, n <= 12); otherwise greedy bounds");
    cmds[name] = {s, [&, separated](Report& r) {
                    SeparationInstance inst;
                    inst.words = read_words(words_file, words_inline);
                    inst.window = window;
                    inst.g = MistakeFunction::parse(g_spec);
                    inst.validate();
                    if (n_expect != 0 && inst.length() != n_expect)
                      throw Error(ErrorKind::LengthMismatch, "words have length " + std::to_string(inst.length()));
                    const auto sep = max_separated(inst, exact);
                    const auto span = min_spanning(inst, exact);
                    auto doubled = inst;
                    doubled.g = inst.g.scaled(2);
                    const auto sep2 = max_separated(doubled, exact);
                    auto wlist = [&](const std::vector<size_t>& idx) {
                      json a = json::array();
                      for (size_t i : idx) a.push_back(format_digits(inst.words[i]));
                      return a;
                    };
                    r.results = {{"n", inst.length()},
                                 {"size", inst.words.size()},
                                 {"g", inst.g.name()},
                                 {"g_of_n", inst.g(inst.length())},
                                 {"window", window},
                                 {"separated", sep.size},
                                 {"separated_exact", sep.exact},
                                 {"spanning", span.size},
                                 {"spanning_exact", span.exact},
                                 {"separated_2g", sep2.size},
                                 {separated ? "witness" : "centers", wlist(separated ? sep.witness : span.witness)}};
                    r.check("witness_separated", is_separated(inst, sep.witness));
                    r.check("witness_spanning", is_spanning(inst, span.witness));
                    if (sep.exact && span.exact) {
                      r.check("spanning_le_separated", span.size <= sep.size);
                      r.check("separated_2g_le_spanning", sep2.size <= span.size);
                    }
                    r.columns = {"role", "index", "word"};
                    for (size_t i : sep.witness) r.row("separated", i, format_digits(inst.words[i]));
                    for (size_t i : span.witness) r.row("spanning", i, format_digits(inst.words[i]));
                  }};
  };
  set_cmd("separated", true);
  set_cmd("spanning", false);

  double gamma = 0.1;
  size_t nmin = 2;
  std::string source = "uniform";
  {
    auto* s = sub("katok", "Finite-scale modified Katok entropy estimates",
                  "n, z_size, z_mass, g, separated, estimate, separated_zero, estimate_zero");
    bopt.add(s, "2");
    s->add_option("--source", source, "uniform (admissible words) or bernoulli:p0,p1,...")->capture_default_str();
    s->add_option("--gamma", gamma, "Mass left out of Z")->capture_default_str();
    s->add_option("--g", g_spec, "Mistake function")->capture_default_str();
    s->add_option("--window", window, "Window m")->capture_default_str();
    s->add_option("--nmin", nmin, "Smallest n")->capture_default_str();
    s->add_option("--nmax", nmax_katok, "Largest n")->capture_default_str();
    cmds["katok"] = {s, [&](Report& r) {
                       WordSource src = source.rfind("bernoulli:", 0) == 0 ? bernoulli(parse_doubles(source.substr(10)))
                                        : source == "uniform"
                                            ? uniform_admissible(bopt.get())
                                            : throw Error(ErrorKind::Parse, "unknown source '" + source + "'");
                       if (nmin < 1 || nmax_katok < nmin) throw Error(ErrorKind::Parse, "need 1 <= nmin <= nmax");
                       std::vector<size_t> ns;
                       for (size_t k = nmin; k <= nmax_katok; ++k) ns.push_back(k);
                       const auto rep = katok_entropy_estimate(src, MistakeFunction::parse(g_spec), gamma, ns, window);
                       json rows = json::array();
                       r.columns = {"n", "z_size", "z_mass", "g", "separated", "estimate", "separated_zero",
                                    "estimate_zero"};
                       for (const auto& k : rep.rows) {
                         rows.push_back({{"n", k.n},
                                         {"z_size", k.z_size},
                                         {"z_mass", k.z_mass},
                                         {"g", k.g_value},
                                         {"separated", k.separated},
                                         {"estimate", k.estimate},
                                         {"separated_zero", k.separated_zero},
                                         {"estimate_zero", k.estimate_zero}});
                         r.row(k.n, k.z_size, k.z_mass, k.g_value, k.separated, k.estimate, k.separated_zero,
                               k.estimate_zero);
                       }
                       r.results = {{"source", rep.source}, {"g", rep.g_name}, {"gamma", gamma},
                                    {"window", window},     {"rows", rows},      {"trend", rep.trend}};
                       r.results["closed_form_entropy"] =
                           rep.closed_form_entropy ? json(*rep.closed_form_entropy) : json(nullptr);
                       for (const auto& k : rep.rows) r.check("mass_covered_n" + std::to_string(k.n), k.z_mass >= 1 - gamma - 1e-12);
                     }};
  }
  std::string tree_file;
  size_t markov_n = 0;
  int full_bound = 0;
  auto build_tree = [&](size_t d) {
    if (!tree_file.empty()) {
      std::ifstream in(tree_file);
      if (!in) throw Error(ErrorKind::Parse, "cannot read " + tree_file);
      std::stringstream ss;
      ss << in.rdbuf();
      return CylinderTree::from_json(ss.str());
    }
    if (full_bound > 0) return CylinderTree::full_shift(full_bound, d);
    const auto beta = bopt.get();
    if (markov_n > 0) return CylinderTree::from_markov(MarkovApprox(beta, markov_n), d);
    return CylinderTree::from_beta(beta, d);
  };
  size_t n_min = 0;
  {
    auto* s = sub("bowen", "Bowen entropy of a cylinder tree", "N, s, cover_sum");
    bopt.add(s);
    s->add_option("--tree", tree_file, "CylinderTree JSON file");
    s->add_option("--full", full_bound, "Full shift on {0..b} instead of a tree file");
    s->add_option("--markov", markov_n, "Use the Markov approximation beta(n) of --beta");
    s->add_option("--depth", tree_depth, "Depth when the tree is generated")->capture_default_str();
    s->add_option("--n-min", n_min, "N (0: shallowest leaf)")->capture_default_str();
    cmds["bowen"] = {s, [&](Report& r) {
                       const auto tree = build_tree(tree_depth);
                       const auto rep = bowen_entropy(tree, n_min);
                       r.results = {{"entropy", rep.entropy},        {"n_min", rep.n_min},
                                    {"depth", rep.depth},            {"count_growth", rep.count_growth},
                                    {"monotone_in_n", rep.monotone_in_n}, {"grid_points", rep.grid_points},
                                    {"nodes", tree.node_count()}};
                       r.check("cover_sum_nondecreasing_in_N", rep.monotone_in_n);
                       r.columns = {"N", "s", "cover_sum"};
                       for (size_t N = 1; N <= rep.n_min; ++N)
                         r.row(N, rep.entropy, bowen_cover_sum(tree, rep.entropy, N));
                     }};
  }
  {
    auto* s = sub("diam", "d_beta diameter of the cylinder of a word", "field, lo, hi");
    bopt.add(s);
    s->add_option("--word", word, "Admissible digits")->required();
    cmds["diam"] = {s, [&](Report& r) {
                      const auto beta = bopt.get();
                      const auto w = parse_digits(word);
                      if (!is_admissible(w, beta)) throw Error(ErrorKind::NotAdmissibleInput, "word is not admissible");
                      const auto d = cylinder_diameter_bounds(beta, SymbolWord(w, beta.digit_bound()));
                      r.results = {{"beta", beta_json(beta)},
                                   {"word", word},
                                   {"lower", interval_json(d.lower)},
                                   {"upper", interval_json(d.upper)},
                                   {"exact", interval_json(d.exact)},
                                   {"z_n", d.z_n},
                                   {"forced", d.forced},
                                   {"z_is_lower_bound", d.z_is_lower_bound},
                                   {"bounds_coincide", d.bounds_coincide}};
                      r.check("lower_le_exact", d.lower.lower() <= d.exact.upper());
                      r.check("exact_le_upper", d.exact.lower() <= d.upper.upper());
                      r.columns = {"field", "lo", "hi"};
                      r.row("lower", d.lower.lower(), d.lower.upper());
                      r.row("exact", d.exact.lower(), d.exact.upper());
                      r.row("upper", d.upper.lower(), d.upper.upper());
                    }};
  }
  double h = -1.0, z_ratio = -1.0;
  bool bounded_z = false;
  {
    auto* s = sub("dims", "Hausdorff dimension bounds from entropy and z(beta)", "field, value");
    bopt.add(s);
    s->add_option("--entropy", h, "Entropy of the set (default log beta)");
    s->add_option("--z-ratio", z_ratio, "z(beta) (default: sup z_n/n up to --nmax)");
    s->add_option("--nmax", nmax_dims, "Horizon for the z(beta) estimate")->capture_default_str();
    s->add_flag("--bounded-z", bounded_z, "Assert z_n is bounded (certifies equality)");
    cmds["dims"] = {s, [&](Report& r) {
                      const auto beta = bopt.get();
                      const double hh = h >= 0 ? h : beta.log_value();
                      const double zr = z_ratio >= 0 ? z_ratio : z_values(beta, nmax_dims).ratio_sup.get_d();
                      const auto d = dimension_bounds(hh, beta, zr, bounded_z);
                      r.results = {{"beta", beta_json(beta)},  {"h", hh},
                                   {"z_ratio", zr},            {"lower", d.lower},
                                   {"upper", d.upper},         {"z_at_least_one", d.z_at_least_one},
                                   {"certified_equal", d.certified_equal}};
                      r.check("lower_le_upper", d.lower <= d.upper + 1e-15);
                      r.columns = {"field", "value"};
                      r.row("lower", d.lower);
                      r.row("upper", d.upper);
                    }};
  }
  std::string depths_text = "12,24", metric_text;
  {
    auto* s = sub("boxdim", "Box-counting dimension of a cylinder tree in the d_beta metric",
                  "depth, single_scale, two_scale");
    bopt.add(s);
    s->add_option("--metric", metric_text, "beta of the metric (default --beta)");
    s->add_option("--tree", tree_file, "CylinderTree JSON file");
    s->add_option("--markov", markov_n, "Tree of the Markov approximation beta(n) of --beta");
    s->add_option("--depths", depths_text, "Comma separated depths")->capture_default_str();
    cmds["boxdim"] = {s, [&](Report& r) {
                        const auto ds = parse_sizes(depths_text);
                        if (ds.empty()) throw Error(ErrorKind::Parse, "no depths");
                        const auto metric = metric_text.empty() ? bopt.get() : parse_beta(metric_text);
                        const auto tree = build_tree(*std::max_element(ds.begin(), ds.end()));
                        const auto rep = box_dimension_estimate(tree, metric, ds);
                        json rows = json::array();
                        r.columns = {"depth", "single_scale", "two_scale"};
                        for (const auto& k : rep.rows) {
                          rows.push_back({{"depth", k.depth}, {"single_scale", k.single_scale}, {"two_scale", k.two_scale}});
                          r.row(k.depth, k.single_scale, k.two_scale);
                        }
                        r.results = {{"metric", beta_json(metric)},
                                     {"rows", rows},
                                     {"estimate", rep.estimate},
                                     {"bowen_over_log_beta", rep.bowen_over_log_beta},
                                     {"sandwich_width", rep.sandwich_width}};
                        if (markov_n > 0 && metric_text.empty())
                          r.results["log_beta_n_over_log_beta"] =
                              MarkovApprox(metric, markov_n).approx().beta.log_value() / metric.log_value();
                        r.check("box_consistent_with_bowen", rep.consistent);
                      }};
  }

  // ---- irregular_builder
  size_t levels = 3;
  double delta1 = 0.1;
  std::string n_list, mult_list, delta_list;
  auto make_schedule = [&]() {
    if (n_list.empty()) return default_schedule(levels, delta1);
    return validate_schedule(parse_sizes(n_list), parse_sizes(mult_list), parse_doubles(delta_list));
  };
  auto schedule_opts = [&](CLI::App* s) {
    s->add_option("--levels", levels, "Levels of the default schedule")->capture_default_str();
    s->add_option("--delta1", delta1, "delta_1 of the default schedule")->capture_default_str();
    s->add_option("--block-lengths", n_list, "Explicit n_k list (with --multiplicities, --deltas)");
    s->add_option("--multiplicities", mult_list, "Explicit N_k list");
    s->add_option("--deltas", delta_list, "Explicit delta_k list");
  };
  auto schedule_json = [](const IrregularSchedule& s) {
    json t = json::array();
    for (const auto& v : s.t) t.push_back(big_json(v));
    return json{{"n", s.n}, {"N", s.mult}, {"delta", s.delta}, {"t", t}, {"cert", s.cert}};
  };
  {
    auto* s = sub("schedule", "Block lengths, multiplicities, tolerances and growth certificates",
                  "k, n, N, delta, t, cert");
    schedule_opts(s);
    cmds["schedule"] = {s, [&](Report& r) {
                          const auto sc = make_schedule();
                          r.results = schedule_json(sc);
                          bool dec = true;
                          for (size_t k = 1; k < sc.cert.size(); ++k) dec = dec && sc.cert[k] < sc.cert[k - 1];
                          r.check("certificates_decrease", dec);
                          r.columns = {"k", "n", "N", "delta", "t", "cert"};
                          for (size_t k = 0; k < sc.levels(); ++k)
                            r.row(k + 1, sc.n[k], sc.mult[k], sc.delta[k], sc.t[k],
                                  k < sc.cert.size() ? sc.cert[k] : NAN);
                        }};
  }
  std::string alpha_text = "0.5,0";
  size_t cap = 64;
  auto alphas = [&]() {
    const auto a = parse_doubles(alpha_text);
    if (a.size() != 2) throw Error(ErrorKind::Parse, "--alpha takes two targets");
    return a;
  };
  auto pool_json = [](const WordPool& p) {
    json words = json::array();
    for (size_t i = 0; i < std::min<size_t>(p.words.size(), 4); ++i) words.push_back(format_digits(p.words[i]));
    json j = {{"level", p.level},         {"target", p.target},           {"alpha", p.alpha},
              {"delta", p.delta},         {"length", p.length},           {"size", p.words.size()},
              {"min_average", p.min_average}, {"max_average", p.max_average}, {"exhaustive", p.exhaustive},
              {"log_size_rate", p.log_size_rate}, {"sample", words}};
    j["qualifying"] = p.qualifying ? big_json(*p.qualifying) : json(nullptr);
    return j;
  };
  {
    auto* s = sub("pools", "Separated pools of admissible words near each target",
                  "level, target, length, size, min_average, max_average, exhaustive");
    bopt.add(s, "phi");
    s->add_option("--phi", phi_spec, "Observable")->capture_default_str();
    s->add_option("--alpha", alpha_text, "Targets alpha1,alpha2")->capture_default_str();
    s->add_option("--cap", cap, "Pool size cap")->capture_default_str();
    schedule_opts(s);
    cmds["pools"] = {s, [&](Report& r) {
                       const auto beta = bopt.get();
                       const auto phi = Observable::parse(phi_spec, beta.digit_bound());
                       const auto a = alphas();
                       PoolOptions po;
                       po.cap = cap;
                       po.seed = common.seed;
                       const auto pools = build_word_pools(beta, phi, a[0], a[1], make_schedule(), po);
                       json pj = json::array();
                       r.columns = {"level", "target", "length", "size", "min_average", "max_average", "exhaustive"};
                       for (const auto& p : pools) {
                         pj.push_back(pool_json(p));
                         r.row(p.level, p.target, p.length, p.words.size(), p.min_average, p.max_average, p.exhaustive);
                         bool sep = true;
                         for (size_t i = 0; i < p.words.size(); ++i)
                           for (size_t j = i + 1; j < p.words.size(); ++j) sep = sep && hamming(p.words[i], p.words[j]) >= 3;
                         r.check("pool" + std::to_string(p.level) + "_separated", sep);
                         r.check("pool" + std::to_string(p.level) + "_within_delta",
                                 p.min_average > p.alpha - p.delta && p.max_average < p.alpha + p.delta);
                       }
                       r.results = {{"beta", beta_json(beta)}, {"phi", phi.name()}, {"pools", pj}};
                     }};
  }
  {
    auto* s = sub("irregular", "Glue pool words into a point whose averages oscillate",
                  "level, t, average, alpha, residual, bound, edits");
    bopt.add(s, "phi");
    s->add_option("--phi", phi_spec, "Observable")->capture_default_str();
    s->add_option("--alpha", alpha_text, "Targets alpha1,alpha2")->capture_default_str();
    s->add_option("--cap", cap, "Pool size cap")->capture_default_str();
    schedule_opts(s);
    cmds["irregular"] = {s, [&](Report& r) {
                           const auto beta = bopt.get();
                           const auto phi = Observable::parse(phi_spec, beta.digit_bound());
                           const auto a = alphas();
                           const auto sc = make_schedule();
                           PoolOptions po;
                           po.cap = cap;
                           po.seed = common.seed;
                           const auto pools = build_word_pools(beta, phi, a[0], a[1], sc, po);
                           const auto rep = construct_irregular_point(beta, phi, a[0], a[1], sc, pools, common.seed);
                           json lv = json::array(), sizes = json::array();
                           for (const auto& p : pools) sizes.push_back(p.words.size());
                           r.columns = {"level", "t", "average", "alpha", "residual", "bound", "edits"};
                           for (const auto& l : rep.levels) {
                             lv.push_back({{"level", l.level},
                                           {"t", big_json(l.t)},
                                           {"average", l.average},
                                           {"alpha", l.alpha},
                                           {"residual", l.residual},
                                           {"bound", l.bound},
                                           {"edits", l.edits}});
                             r.row(l.level, l.t, l.average, l.alpha, l.residual, l.bound, l.edits);
                           }
                           r.results = {{"beta", beta_json(beta)},
                                        {"phi", phi.name()},
                                        {"schedule", schedule_json(sc)},
                                        {"pool_sizes", sizes},
                                        {"length", big_json(rep.point.length)},
                                        {"prefix_head", format_digits(Digits(rep.point.prefix.begin(),
                                                                             rep.point.prefix.begin() +
                                                                                 static_cast<long>(std::min<size_t>(
                                                                                     64, rep.point.prefix.size()))))},
                                        {"edits", rep.point.edits},
                                        {"max_block_edits", rep.point.max_block_edits},
                                        {"levels", lv},
                                        {"min_jump", rep.min_jump},
                                        {"oscillates", rep.oscillates}};
                           r.check("prefix_admissible", rep.point.admissible);
                           r.check("block_edits_at_most_one", rep.point.max_block_edits <= 1);
                           r.check("residuals_within_bounds", rep.within_bounds);
                           r.check("averages_oscillate", rep.oscillates);
                         }};
  }
  size_t pool_size = 2, multiplicity = 2;
  size_t balls = 16;
  auto family = [&](const BetaNumber& beta) {
    std::vector<std::vector<Digits>> pools;
    std::vector<size_t> mult;
    for (size_t i = 1; i <= levels; ++i) {
      pools.push_back(small_pool(beta, 8 * i, pool_size));
      mult.push_back(multiplicity);
    }
    return enumerate_glued_family(beta, mult, pools);
  };
  auto family_opts = [&](CLI::App* s) {
    bopt.add(s, "phi");
    s->add_option("--levels", levels, "Levels (block length 8k at level k)")->capture_default_str();
    s->add_option("--pool-size", pool_size, "Words per pool")->capture_default_str();
    s->add_option("--multiplicity", multiplicity, "Blocks per level")->capture_default_str();
  };
  {
    auto* s = sub("glued-family", "Enumerate every glued word of a small schedule", "index, word");
    family_opts(s);
    cmds["glued-family"] = {s, [&](Report& r) {
                              const auto beta = bopt.get();
                              const auto fam = family(beta);
                              r.results = {{"beta", beta_json(beta)},
                                           {"pool_sizes", fam.pool_sizes},
                                           {"multiplicities", fam.mult},
                                           {"t", fam.t},
                                           {"members", fam.members.size()},
                                           {"expected", big_json(fam.expected)},
                                           {"distinct", fam.distinct},
                                           {"separated", fam.separated},
                                           {"entropy_proxy", fam.entropy_proxy},
                                           {"pool_exponent", fam.pool_exponent},
                                           {"max_block_edits", fam.max_block_edits}};
                              r.check("count_matches_product", mpz_class(fam.members.size()) == fam.expected);
                              r.check("members_distinct", fam.distinct);
                              r.check("members_separated", fam.separated);
                              bool adm = true;
                              for (const auto& m : fam.members) adm = adm && is_admissible(m, beta);
                              r.check("members_admissible", adm);
                              r.columns = {"index", "word"};
                              for (size_t i = 0; i < fam.members.size(); ++i) r.row(i, format_digits(fam.members[i]));
                            }};
  }
  {
    auto* s = sub("edp", "Ball measures of the uniform measure on a glued family against the counting bound",
                  "center, n, measure, j, l, bound, coarse, ok");
    family_opts(s);
    s->add_option("--balls", balls, "Random balls")->capture_default_str();
    cmds["edp"] = {s, [&](Report& r) {
                     const auto beta = bopt.get();
                     const auto fam = family(beta);
                     std::mt19937_64 rng(common.seed);
                     std::vector<std::pair<Digits, size_t>> bl;
                     const size_t tk = fam.t.back();
                     for (size_t i = 0; i < balls; ++i)
                       bl.emplace_back(fam.members[rng() % fam.members.size()], static_cast<size_t>(rng() % (tk + 1)));
                     const auto rep = edp_ball_check(fam, bl);
                     json bj = json::array();
                     r.columns = {"center", "n", "measure", "j", "l", "bound", "coarse", "ok"};
                     for (const auto& b : rep.balls) {
                       bj.push_back({{"center", format_digits(b.center)},
                                     {"n", b.n},
                                     {"measure", b.measure},
                                     {"j", b.j},
                                     {"l", b.l},
                                     {"bound", b.bound},
                                     {"coarse", b.coarse},
                                     {"ok", b.ok}});
                       r.row(format_digits(b.center), b.n, b.measure, b.j, b.l, b.bound, b.coarse, b.ok);
                     }
                     r.results = {{"beta", beta_json(beta)},
                                  {"members", fam.members.size()},
                                  {"s", rep.s},
                                  {"k_needed", rep.k_needed},
                                  {"balls", bj}};
                     r.check("all_balls_within_bound", rep.all_ok);
                   }};
  }

  // ---- exotic_shifts
  std::string big_n = "4,6";
  size_t ex_levels = 2;
  {
    auto* s = sub("exotic", "Nested forbidden-power shifts: periodic points, single-edit repair, entropy",
                  "level, rate, drop, epsilon, drop_ok");
    s->add_option("--levels", ex_levels, "Levels k")->capture_default_str();
    s->add_option("--N", big_n, "N_1,...,N_k")->capture_default_str();
    s->add_option("--nmax", nmax_exotic, "Length for counts and entropy rates")->capture_default_str();
    cmds["exotic"] = {s, [&](Report& r) {
                        const auto sh = build_nested(parse_sizes(big_n), ex_levels);
                        const auto per = no_short_periodics(sh, ex_levels);
                        json fj = json::array();
                        bool abundant = true, repaired = true;
                        size_t min_good = SIZE_MAX;
                        for (size_t i = 0; i < sh.levels(); ++i) {
                          for (const auto& w : sh.F[i]) {
                            const size_t good = clean_edit_positions(w, sh, ex_levels);
                            min_good = std::min(min_good, good);
                            const double need = static_cast<double>(w.size()) * (1.0 - 2.0 / static_cast<double>(sh.N[0]));
                            abundant = abundant && static_cast<double>(good) >= need;
                            const auto rep = single_edit_repair(w, sh, ex_levels);
                            repaired = repaired && sh.admissible(rep.word, ex_levels);
                            fj.push_back({{"level", i + 1},
                                          {"word", format_digits(w)},
                                          {"working_positions", good},
                                          {"required", need},
                                          {"repair_edits", rep.edits.size()}});
                          }
                        }
                        const auto ent = nested_entropy_report(sh, ex_levels, nmax_exotic);
                        json lv = json::array();
                        r.columns = {"level", "rate", "drop", "epsilon", "drop_ok"};
                        for (const auto& l : ent.levels) {
                          json j = {{"level", l.level},
                                    {"count_at_nmax", big_json(l.counts.back())},
                                    {"rate", l.rate},
                                    {"drop", l.drop},
                                    {"epsilon", l.epsilon},
                                    {"drop_ok", l.drop_ok}};
                          j["minimal_passing_N"] = l.minimal_passing_N ? json(*l.minimal_passing_N) : json(nullptr);
                          lv.push_back(j);
                          r.row(l.level, l.rate, l.drop, l.epsilon, l.drop_ok);
                        }
                        json survivors = json::array();
                        for (const auto& c : per.candidates)
                          if (!c.excluded) survivors.push_back(format_digits(c.period));
                        r.results = {{"N", sh.N},
                                     {"forbidden", fj},
                                     {"periodic_candidates", per.candidates.size()},
                                     {"periodic_survivors", survivors},
                                     {"levels", lv},
                                     {"deepest_rate", ent.deepest_rate},
                                     {"positivity_floor", ent.positivity_floor},
                                     {"min_working_positions", min_good}};
                        r.check("no_periodic_points_of_period_le_k", per.none_survive);
                        r.check("single_edit_abundance", abundant);
                        r.check("repairs_admissible", repaired);
                      }};
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  json params = json::object();
  for (const CLI::Option* o : chosen->get_options()) {
    if (o->get_name() == "--help" || o->get_name() == "--out") continue;
    std::string key = o->get_name();
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    if (o->count() > 0) {
      if (o->get_type_size() == 0) {
        params[key] = true;
      } else {
        const auto res = o->results();
        params[key] = res.size() == 1 ? json(res[0]) : json(res);
      }
    } else {
      const auto d = o->get_default_str();
      params[key] = d.empty() ? json(nullptr) : json(d);
    }
  }

  bopt.resolve(chosen);
  const auto t0 = std::chrono::steady_clock::now();
  if (common.precision_bits > 0) set_precision_cap_bits(common.precision_bits);
  Report rep;
  json payload = {{"subcommand", name}, {"params", params}, {"seed", common.seed}, {"version", kVersion}};
  int code = 0;
  try {
    cmds.at(name).run(rep);
  } catch (const Error& e) {
    code = exit_code(e.kind());
    err << "betalab " << name << ": " << e.what() << "\n";
    payload["error"] = {{"kind", std::string(kind_name(e.kind()))}, {"message", e.what()}, {"exit_code", code}};
  } catch (const UsageError& e) {
    code = 2;
    err << "betalab " << name << ": " << e.what() << "\n";
    payload["error"] = {{"kind", "Usage"}, {"message", e.what()}, {"exit_code", code}};
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  json checks = json::array();
  bool all = true;
  for (const auto& [k, ok] : rep.checks) {
    checks.push_back({{"name", k}, {"pass", ok}});
    if (!ok && all) {
      err << "betalab " << name << ": check failed: " << k << "\n";
      all = false;
    }
  }
  if (code == 0 && !all) code = 1;
  payload["results"] = rep.results;
  payload["checks"] = checks;
  payload["pass"] = code == 0;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!common.out_file.empty()) {
    file.open(common.out_file);
    if (!file) {
      err << "betalab: cannot write " << common.out_file << "\n";
      return 2;
    }
    sink = &file;
  }
  if (common.emit == "csv" && !payload.contains("error")) {
    auto quote = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    for (size_t i = 0; i < rep.columns.size(); ++i) *sink << (i ? "," : "") << quote(rep.columns[i]);
    *sink << "\n";
    for (const auto& row : rep.rows) {
      for (size_t i = 0; i < row.size(); ++i) *sink << (i ? "," : "") << quote(row[i]);
      *sink << "\n";
    }
  } else {
    json doc = {{"schema", kSchema}, {"payload", payload}, {"wall_time_ms", ms}};
    *sink << doc.dump(2) << "\n";
  }
  return code;
}

}  // namespace betalab::cli
