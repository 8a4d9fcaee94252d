#include "thermo/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_set>

#include "thermo/linalg.hpp"

namespace thermo {

// ---------------------------------------------------------------------------
// Subshift

Subshift::Subshift(Eigen::MatrixXi transition, Sidedness sided)
    : transition_(std::move(transition)), sided_(sided) {
  const auto k = transition_.rows();
  if (k < 2 || transition_.cols() != k) throw ValidationError("subshift: transition must be square with alphabet size >= 2");
  if (k > 10) throw ValidationError("subshift: alphabet sizes above 10 are not supported");
  if (((transition_.array() != 0) && (transition_.array() != 1)).any())
    throw ValidationError("subshift: transition entries must be 0 or 1");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (transition_.row(i).sum() == 0) throw ValidationError("subshift: transition row " + std::to_string(i) + " is empty");
    if (transition_.col(i).sum() == 0) throw ValidationError("subshift: transition column " + std::to_string(i) + " is empty");
  }
  if (!linalg::is_irreducible(transition_)) throw ValidationError("subshift: transition matrix is not irreducible");
}

Subshift Subshift::full(int alphabet_size, Sidedness sided) {
  return Subshift(Eigen::MatrixXi::Ones(alphabet_size, alphabet_size), sided);
}

Subshift Subshift::golden_mean(Sidedness sided) {
  Eigen::MatrixXi a(2, 2);
  a << 1, 1, 1, 0;
  return Subshift(a, sided);
}

bool Subshift::admissible(std::span<const Symbol> symbols) const {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= alphabet_size()) return false;
    if (i > 0 && !allowed(symbols[i - 1], symbols[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Word

Word Word::parse(std::string_view digits, int origin) {
  Word w;
  w.origin = origin;
  w.symbols.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw ValidationError("word: invalid symbol '" + std::string(1, c) + "'");
    w.symbols.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

std::string Word::str() const {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) out.push_back(static_cast<char>('0' + s));
  return out;
}

std::uint64_t word_code(std::span<const Symbol> symbols, int alphabet_size) {
  std::uint64_t code = 0;
  for (Symbol s : symbols) code = code * static_cast<std::uint64_t>(alphabet_size) + s;
  return code;
}

namespace {

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void decode(std::uint64_t code, int k, std::span<Symbol> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Symbol>(code % static_cast<std::uint64_t>(k));
    code /= static_cast<std::uint64_t>(k);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Potential

Potential::Potential(const Subshift &system, int depth)
    : system_(system), depth_(depth), alphabet_size_(system.alphabet_size()) {
  if (depth < 1) throw ValidationError("potential: depth must be >= 1");
  if (depth > 8) throw ValidationError("potential: depth above 8 is not supported");
  const auto size = ipow(static_cast<std::uint64_t>(alphabet_size_), depth);
  table_.assign(size, 0.0);
  defined_.assign(size, false);
}

Potential::Potential(const Subshift &system, int depth, const std::vector<double> &values)
    : Potential(system, depth) {
  std::size_t i = 0;
  for_each_word(system, depth, [&](std::span<const Symbol> w) {
    if (i >= values.size()) throw ValidationError("potential: too few values for the admissible words");
    if (!std::isfinite(values[i])) throw ValidationError("potential: values must be finite");
    const auto code = word_code(w, alphabet_size_);
    table_[code] = values[i++];
    defined_[code] = true;
  });
  if (i != values.size()) throw ValidationError("potential: more values than admissible words");
}

Potential Potential::constant(const Subshift &system, double c, int depth) {
  return Potential(system, depth, std::vector<double>(word_count(system, depth), c));
}

Potential Potential::from_words(const Subshift &system, int depth,
                                const std::vector<std::pair<std::string, double>> &table) {
  Potential phi(system, depth);
  for (const auto &[key, value] : table) {
    const Word w = Word::parse(key);
    if (static_cast<int>(w.size()) != depth) throw ValidationError("potential: key '" + key + "' has the wrong length");
    if (!system.admissible(w.view())) throw ValidationError("potential: key '" + key + "' is not admissible");
    if (!std::isfinite(value)) throw ValidationError("potential: values must be finite");
    const auto code = word_code(w.view(), phi.alphabet_size_);
    if (phi.defined_[code]) throw ValidationError("potential: duplicate key '" + key + "'");
    phi.table_[code] = value;
    phi.defined_[code] = true;
  }
  for_each_word(system, depth, [&](std::span<const Symbol> w) {
    if (!phi.defined_[word_code(w, phi.alphabet_size_)])
      throw ValidationError("potential: missing value for admissible word " + Word{{w.begin(), w.end()}}.str());
  });
  return phi;
}

double Potential::operator()(std::span<const Symbol> window) const {
  if (static_cast<int>(window.size()) < depth_) throw ValidationError("potential: undetermined evaluation");
  const auto code = word_code(window.first(static_cast<std::size_t>(depth_)), alphabet_size_);
  if (!defined_[code]) throw ValidationError("potential: evaluation on an inadmissible window");
  return table_[code];
}

double Potential::min_value() const {
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (defined_[i]) v = std::min(v, table_[i]);
  return v;
}

double Potential::max_value() const {
  double v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (defined_[i]) v = std::max(v, table_[i]);
  return v;
}

Potential Potential::shifted(double c) const {
  Potential out = *this;
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (defined_[i]) out.table_[i] += c;
  return out;
}

Potential Potential::scaled(double t) const {
  Potential out = *this;
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (defined_[i]) out.table_[i] *= t;
  return out;
}

Potential Potential::lifted(int new_depth) const {
  if (new_depth < depth_) throw ValidationError("potential: cannot lift to a smaller depth");
  Potential out(system_, new_depth);
  for_each_word(system_, new_depth, [&](std::span<const Symbol> w) {
    const auto code = word_code(w, alphabet_size_);
    out.table_[code] = (*this)(w);
    out.defined_[code] = true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Hamming

HammingParams::HammingParams(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("hamming: delta must lie in (0, 1)");
  eta_ = -delta * std::log2(delta) - (1.0 - delta) * std::log2(1.0 - delta);
}

int HammingParams::threshold(int n) const {
  // Guard against delta * n landing a rounding error above an integer.
  return static_cast<int>(std::ceil(delta_ * n - 1e-9));
}

// ---------------------------------------------------------------------------
// Operations

std::uint64_t word_count(const Subshift &s, int n) {
  if (n < 1) throw ValidationError("word_count: length must be >= 1");
  using Matrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>;
  const Matrix a = s.transition().cast<std::uint64_t>();
  Vector v = Vector::Ones(a.rows());
  for (int i = 1; i < n; ++i) v = a * v;
  return v.sum();
}

std::vector<Word> enumerate_words(const Subshift &s, int n) {
  std::vector<Word> out;
  out.reserve(word_count(s, n));
  for_each_word(s, n, [&](std::span<const Symbol> w) { out.push_back(Word{{w.begin(), w.end()}, 0}); });
  return out;
}

double birkhoff_sum_n(const Potential &phi, std::span<const Symbol> w, int n) {
  if (n < 0 || static_cast<int>(w.size()) < n + phi.depth() - 1 || static_cast<int>(w.size()) < phi.depth())
    throw ValidationError("birkhoff_sum: undetermined evaluation");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += phi(w.subspan(static_cast<std::size_t>(i)));
  return sum;
}

double birkhoff_sum(const Potential &phi, std::span<const Symbol> w) {
  if (static_cast<int>(w.size()) < phi.depth()) throw ValidationError("birkhoff_sum: undetermined evaluation");
  return birkhoff_sum_n(phi, w, static_cast<int>(w.size()) - phi.depth() + 1);
}

namespace {

// Extreme of S_n phi over the cylinder [prefix]; `better` picks sup or inf.
template <typename Better>
double extreme_birkhoff_over_cylinder(const Potential &phi, std::span<const Symbol> prefix, int n, double worst,
                                      Better better, const char *who) {
  if (n < 1) throw ValidationError(std::string(who) + ": n must be >= 1");
  if (prefix.empty()) throw ValidationError(std::string(who) + ": empty cylinder");
  const int needed = n + phi.depth() - 1;
  const int have = static_cast<int>(prefix.size());
  if (have >= needed) return birkhoff_sum_n(phi, prefix, n);

  // Windows fully inside the prefix, then the extreme admissible completion.
  const int determined = std::max(0, have - phi.depth() + 1);
  double base = 0.0;
  for (int i = 0; i < determined; ++i) base += phi(prefix.subspan(static_cast<std::size_t>(i)));

  const Subshift &s = phi.system();
  std::vector<Symbol> buf(prefix.begin(), prefix.end());
  buf.resize(static_cast<std::size_t>(needed));
  double best = worst;
  auto recurse = [&](auto &&self, int pos) -> void {
    if (pos == needed) {
      double tail = 0.0;
      for (int i = determined; i < n; ++i) tail += phi(std::span<const Symbol>(buf).subspan(static_cast<std::size_t>(i)));
      if (better(tail, best)) best = tail;
      return;
    }
    for (int a = 0; a < s.alphabet_size(); ++a) {
      if (!s.allowed(buf[pos - 1], static_cast<Symbol>(a))) continue;
      buf[pos] = static_cast<Symbol>(a);
      self(self, pos + 1);
    }
  };
  recurse(recurse, have);
  return base + best;
}

}  // namespace

double sup_birkhoff_over_cylinder(const Potential &phi, std::span<const Symbol> prefix, int n) {
  return extreme_birkhoff_over_cylinder(phi, prefix, n, -std::numeric_limits<double>::infinity(), std::greater<>{},
                                        "sup_birkhoff_over_cylinder");
}

double inf_birkhoff_over_cylinder(const Potential &phi, std::span<const Symbol> prefix, int n) {
  return extreme_birkhoff_over_cylinder(phi, prefix, n, std::numeric_limits<double>::infinity(), std::less<>{},
                                        "inf_birkhoff_over_cylinder");
}

int ball_depth(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("ball_depth: eps must lie in (0, 1]");
  int m = 0;
  while (eps <= std::ldexp(1.0, -(m + 1))) ++m;
  return m;
}

int hamming_distance(std::span<const Symbol> v, std::span<const Symbol> w) {
  if (v.size() != w.size()) throw ValidationError("hamming_distance: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) d += v[i] != w[i];
  return d;
}

int hamming_distance(const Word &v, const Word &w) { return hamming_distance(v.view(), w.view()); }

int block_distance(std::span<const Symbol> v, std::span<const Symbol> w, int n, int m) {
  if (v.size() != w.size()) throw ValidationError("block_distance: length mismatch");
  if (static_cast<int>(v.size()) < n + m) throw ValidationError("block_distance: words shorter than n + m");
  int count = 0;
  // A block [j, j+m] differs iff some differing position lies in it; track
  // the last differing position seen while sweeping right to left.
  int next_diff = std::numeric_limits<int>::max();
  for (int p = n + m - 1; p >= 0; --p) {
    if (v[p] != w[p]) next_diff = p;
    if (p < n && next_diff <= p + m) ++count;
  }
  return count;
}

std::uint64_t hamming_ball_count(int k, int n, double delta) {
  if (k < 2 || n < 1) throw ValidationError("hamming_ball_count: need k >= 2 and n >= 1");
  const double max_delta = static_cast<double>(k - 1) / k;
  if (!(delta >= 0.0 && delta <= max_delta + 1e-12)) throw ValidationError("hamming_ball_count: delta out of range");
  const int radius = static_cast<int>(std::floor(delta * n + 1e-9));
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, j)
  std::uint64_t power = 1;  // (k-1)^j
  for (int j = 0; j <= radius; ++j) {
    total += binom * power;
    binom = binom * static_cast<std::uint64_t>(n - j) / static_cast<std::uint64_t>(j + 1);
    power *= static_cast<std::uint64_t>(k - 1);
  }
  return total;
}

double hamming_ball_bound(int k, int n, double delta, bool exponent_floor) {
  const HammingParams h(delta);
  const double e = exponent_floor ? std::floor(delta * n + 1e-9) : delta * n;
  return std::exp2(n * h.eta()) * std::pow(static_cast<double>(k - 1), e);
}

// ---------------------------------------------------------------------------
// Separated sets

int SeparationRule::threshold() const {
  if (mode == Mode::n_eps) return 1;
  return HammingParams(delta).threshold(n);
}

bool SeparationRule::separated(std::span<const Symbol> v, std::span<const Symbol> w) const {
  return block_distance(v, w, n, m) >= threshold();
}

namespace {

// Number of words that could conflict with a given one: fewer than `t`
// changes in [0, n), anything in [n, len).
double neighbourhood_size(int k, int n, int len, int t) {
  double ball = 0.0, binom = 1.0;
  for (int j = 0; j < t && j <= n; ++j) {
    ball += binom * std::pow(k - 1.0, j);
    binom = binom * (n - j) / (j + 1);
  }
  return ball * std::pow(static_cast<double>(k), len - n);
}

}  // namespace

std::vector<Word> extract_separated(std::vector<Word> words, const SeparationRule &rule) {
  if (words.empty()) return words;
  const std::size_t len = words.front().size();
  for (const auto &w : words)
    if (w.size() != len) throw ValidationError("extract_separated: words must share one length");
  if (static_cast<int>(len) < rule.n + rule.m) throw ValidationError("extract_separated: words shorter than n + m");
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());

  int k = 2;
  for (const auto &w : words)
    for (Symbol s : w.symbols) k = std::max(k, s + 1);
  const int t = rule.threshold();
  const double hood = neighbourhood_size(k, rule.n, static_cast<int>(len), t);
  const bool enumerate = len * std::log2(k) < 63.0 && hood < 1e5;

  std::vector<Word> kept;
  if (!enumerate) {
    for (auto &w : words) {
      const bool ok = std::all_of(kept.begin(), kept.end(), [&](const Word &u) { return rule.separated(u.view(), w.view()); });
      if (ok) kept.push_back(std::move(w));
    }
    return kept;
  }

  // Probe every word that could conflict and look it up among those kept.
  std::unordered_set<std::uint64_t> kept_codes;
  std::vector<Symbol> probe(len);
  for (auto &w : words) {
    bool conflict = false;
    std::copy(w.symbols.begin(), w.symbols.end(), probe.begin());
    auto visit_tail = [&](auto &&self, std::size_t pos) -> void {
      if (conflict) return;
      if (pos == len) {
        if (kept_codes.count(word_code(probe, k)) && !rule.separated(probe, w.view())) conflict = true;
        return;
      }
      for (int a = 0; a < k && !conflict; ++a) {
        probe[pos] = static_cast<Symbol>(a);
        self(self, pos + 1);
      }
      probe[pos] = w.symbols[pos];
    };
    auto change_head = [&](auto &&self, int from, int budget) -> void {
      if (conflict) return;
      visit_tail(visit_tail, static_cast<std::size_t>(rule.n));
      if (budget == 0) return;
      for (int p = from; p < rule.n && !conflict; ++p) {
        for (int a = 0; a < k && !conflict; ++a) {
          if (a == w.symbols[p]) continue;
          probe[p] = static_cast<Symbol>(a);
          self(self, p + 1, budget - 1);
        }
        probe[p] = w.symbols[p];
      }
    };
    change_head(change_head, 0, t - 1);
    if (!conflict) {
      kept_codes.insert(word_code(w.view(), k));
      kept.push_back(std::move(w));
    }
  }
  return kept;
}

}  // namespace thermo
