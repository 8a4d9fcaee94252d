#pragma once

// Finite combinatorics of subshifts of finite type: words, cylinders, the
// dyadic metric, Birkhoff sums, Hamming separation and greedy extraction of
// separated sets.
//
// Metric convention. One-sided: d(x, y) = 2^-min{j >= 0 : x_j != y_j}.
// Two-sided: d(x, y) = 2^-min{|j| : x_j != y_j}. Under this metric the
// dynamical ball B_n(x, eps) is exactly the cylinder on coordinates
// [0, n + m) with m = ball_depth(eps), so covers and separated sets are
// cylinder combinatorics.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermo/errors.hpp"

namespace thermo {

using Symbol = std::uint8_t;

enum class Sidedness { one_sided, two_sided };

class Subshift {
 public:
  // Validates that every row and column has a 1 and that the transition
  // graph is strongly connected.
  Subshift(Eigen::MatrixXi transition, Sidedness sided = Sidedness::one_sided);

  static Subshift full(int alphabet_size, Sidedness sided = Sidedness::one_sided);
  // Binary shift forbidding the word "11".
  static Subshift golden_mean(Sidedness sided = Sidedness::one_sided);

  int alphabet_size() const { return static_cast<int>(transition_.rows()); }
  const Eigen::MatrixXi &transition() const { return transition_; }
  Sidedness sided() const { return sided_; }
  bool is_full() const { return (transition_.array() == 1).all(); }

  bool allowed(Symbol a, Symbol b) const { return transition_(a, b) != 0; }
  bool admissible(std::span<const Symbol> symbols) const;

  friend bool operator==(const Subshift &a, const Subshift &b) {
    return a.sided_ == b.sided_ && a.transition_ == b.transition_;
  }

 private:
  Eigen::MatrixXi transition_;
  Sidedness sided_;
};

// A finite block of symbols. For two-sided shifts `origin` is the coordinate
// of symbols[0] (so the window is [origin, origin + size)); one-sided words
// always start at coordinate 0.
struct Word {
  std::vector<Symbol> symbols;
  int origin = 0;

  std::size_t size() const { return symbols.size(); }
  Symbol operator[](std::size_t i) const { return symbols[i]; }
  std::span<const Symbol> view() const { return symbols; }

  // Digits '0'..'9'.
  static Word parse(std::string_view digits, int origin = 0);
  std::string str() const;

  friend bool operator==(const Word &, const Word &) = default;
  friend auto operator<=>(const Word &a, const Word &b) { return a.symbols <=> b.symbols; }
};

// Base-k code of a block of symbols, most significant symbol first. This is
// also the lexicographic rank among all k^|block| blocks.
std::uint64_t word_code(std::span<const Symbol> symbols, int alphabet_size);

// Locally constant potential of finite depth: phi(x) depends on x_0..x_{depth-1}.
class Potential {
 public:
  // `values` lists one number per admissible depth-word in lexicographic order.
  Potential(const Subshift &system, int depth, const std::vector<double> &values);

  static Potential constant(const Subshift &system, double c, int depth = 1);
  // Keys are digit strings of length `depth`; must cover every admissible word.
  static Potential from_words(const Subshift &system, int depth,
                              const std::vector<std::pair<std::string, double>> &table);

  int depth() const { return depth_; }
  int alphabet_size() const { return alphabet_size_; }
  const Subshift &system() const { return system_; }

  double operator()(std::span<const Symbol> window) const;
  double at_code(std::uint64_t code) const { return table_[code]; }
  bool defined_at_code(std::uint64_t code) const { return defined_[code]; }

  double min_value() const;
  double max_value() const;

  // phi + c and t * phi, same depth.
  Potential shifted(double c) const;
  Potential scaled(double t) const;
  // Same function viewed at a larger depth (ignores the extra coordinates).
  Potential lifted(int new_depth) const;

 private:
  Potential(const Subshift &system, int depth);

  Subshift system_;
  int depth_;
  int alphabet_size_;
  std::vector<double> table_;  // dense over all k^depth codes
  std::vector<bool> defined_;
};

// eta(delta) = -delta log2 delta - (1 - delta) log2 (1 - delta).
class HammingParams {
 public:
  explicit HammingParams(double delta);
  double delta() const { return delta_; }
  double eta() const { return eta_; }
  // Separation threshold on an integer count: ">= delta * n" means
  // ">= ceil(delta * n)".
  int threshold(int n) const;

 private:
  double delta_;
  double eta_;
};

// ---------------------------------------------------------------------------
// Operations

// Number of admissible n-words, 1^T A^(n-1) 1.
std::uint64_t word_count(const Subshift &s, int n);

// Visits every admissible n-word in lexicographic order. The span passed to
// `visit` is only valid for the duration of the call.
template <typename Visitor>
void for_each_word(const Subshift &s, int n, Visitor &&visit) {
  if (n < 1) throw ValidationError("for_each_word: length must be >= 1");
  const int k = s.alphabet_size();
  std::vector<Symbol> buf(static_cast<std::size_t>(n), 0);
  std::vector<int> next(static_cast<std::size_t>(n), 0);
  int pos = 0;
  next[0] = 0;
  while (pos >= 0) {
    if (next[pos] >= k) {
      --pos;
      continue;
    }
    const auto a = static_cast<Symbol>(next[pos]++);
    if (pos > 0 && !s.allowed(buf[pos - 1], a)) continue;
    buf[pos] = a;
    if (pos + 1 == n) {
      visit(std::span<const Symbol>(buf));
    } else {
      ++pos;
      next[pos] = 0;
    }
  }
}

std::vector<Word> enumerate_words(const Subshift &s, int n);

// Sum of phi over the |w| - depth + 1 windows of w.
double birkhoff_sum(const Potential &phi, std::span<const Symbol> w);
inline double birkhoff_sum(const Potential &phi, const Word &w) { return birkhoff_sum(phi, w.view()); }

// Sum of phi over the first n windows of w (needs |w| >= n + depth - 1).
double birkhoff_sum_n(const Potential &phi, std::span<const Symbol> w, int n);

// sup of S_n phi over all points of the cylinder [prefix], taken over every
// admissible completion of the coordinates the prefix leaves undetermined.
double sup_birkhoff_over_cylinder(const Potential &phi, std::span<const Symbol> prefix, int n);
double inf_birkhoff_over_cylinder(const Potential &phi, std::span<const Symbol> prefix, int n);

// The unique m >= 0 with 2^-(m+1) < eps <= 2^-m.
int ball_depth(double eps);

int hamming_distance(const Word &v, const Word &w);
int hamming_distance(std::span<const Symbol> v, std::span<const Symbol> w);

// #{j < n : v[j..j+m] != w[j..j+m]}: the number of times in [0, n) at which
// the orbits of v and w are at least 2^-m apart. With m = 0 this is the
// Hamming distance on the first n coordinates.
int block_distance(std::span<const Symbol> v, std::span<const Symbol> w, int n, int m);

// Exact size of a radius-floor(delta n) Hamming ball in {0..k-1}^n.
std::uint64_t hamming_ball_count(int k, int n, double delta);

// 2^(n eta(delta)) (k - 1)^e with e = exponent_floor ? floor(delta n) : delta n.
double hamming_ball_bound(int k, int n, double delta, bool exponent_floor = true);

// How two equal-length words are compared when extracting separated sets.
struct SeparationRule {
  enum class Mode { n_eps, hamming } mode = Mode::n_eps;
  int n = 0;        // number of time steps compared
  int m = 0;        // ball depth of eps
  double delta = 0; // used by the hamming mode only

  static SeparationRule n_eps(int n, int m) { return {Mode::n_eps, n, m, 0.0}; }
  static SeparationRule hamming(int n, int m, double delta) { return {Mode::hamming, n, m, delta}; }

  // Minimum block_distance for two words to count as separated.
  int threshold() const;
  bool separated(std::span<const Symbol> v, std::span<const Symbol> w) const;
};

// Greedy maximal separated subset: scans the input in lexicographic order and
// keeps a word iff it is separated from everything kept so far.
std::vector<Word> extract_separated(std::vector<Word> words, const SeparationRule &rule);

}  // namespace thermo
