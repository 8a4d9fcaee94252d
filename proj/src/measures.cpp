#include "thermo/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermo/linalg.hpp"

namespace thermo {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_probability_vector(const Eigen::VectorXd &p, const std::string &what) {
  if (p.size() < 2) throw ValidationError(what + ": probability vector needs at least two entries");
  if (!p.allFinite() || (p.array() < 0.0).any()) throw ValidationError(what + ": entries must be finite and >= 0");
  if (std::abs(p.sum() - 1.0) > kProbTol) throw ValidationError(what + ": entries must sum to 1");
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double log_sum_exp(const std::vector<double> &xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

double log_mass(const Bernoulli &b, std::span<const Symbol> w) {
  double acc = 0.0;
  for (Symbol s : w) {
    if (s >= b.p.size() || b.p(s) <= 0.0) return kNegInf;
    acc += std::log(b.p(s));
  }
  return acc;
}

double log_mass(const Markov &m, std::span<const Symbol> w) {
  const auto k = m.pi.size();
  if (w[0] >= k || m.pi(w[0]) <= 0.0) return kNegInf;
  double acc = std::log(m.pi(w[0]));
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] >= k) return kNegInf;
    const double p = m.P(w[i - 1], w[i]);
    if (p <= 0.0) return kNegInf;
    acc += std::log(p);
  }
  return acc;
}

double log_mass_ergodic(const ErgodicMeasure &mu, std::span<const Symbol> w) {
  if (w.empty()) return 0.0;
  return std::visit([&](const auto &m) { return log_mass(m, w); }, mu);
}

double entropy_ergodic(const ErgodicMeasure &mu) {
  if (const auto *b = std::get_if<Bernoulli>(&mu)) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < b->p.size(); ++i) h -= xlogx(b->p(i));
    return h;
  }
  const auto &m = std::get<Markov>(mu);
  double h = 0.0;
  for (Eigen::Index i = 0; i < m.P.rows(); ++i)
    for (Eigen::Index j = 0; j < m.P.cols(); ++j) h -= m.pi(i) * xlogx(m.P(i, j));
  return h;
}

bool same_ergodic(const ErgodicMeasure &a, const ErgodicMeasure &b) {
  if (a.index() != b.index()) return false;
  if (const auto *x = std::get_if<Bernoulli>(&a)) {
    const auto &y = std::get<Bernoulli>(b);
    return x->p.size() == y.p.size() && (x->p - y.p).cwiseAbs().maxCoeff() <= kProbTol;
  }
  const auto &x = std::get<Markov>(a);
  const auto &y = std::get<Markov>(b);
  return x.P.rows() == y.P.rows() && (x.P - y.P).cwiseAbs().maxCoeff() <= kProbTol;
}

ErgodicMeasure as_ergodic(const MeasureSpec &m) {
  if (const auto *b = std::get_if<Bernoulli>(&m.kind())) return *b;
  if (const auto *mk = std::get_if<Markov>(&m.kind())) return *mk;
  throw ValidationError("mixture: nested mixtures are not allowed");
}

std::string fmt_vec(const Eigen::VectorXd &v) {
  std::ostringstream os;
  os.precision(6);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// MeasureSpec

MeasureSpec MeasureSpec::bernoulli(Eigen::VectorXd p) {
  check_probability_vector(p, "bernoulli");
  return MeasureSpec(Bernoulli{std::move(p)});
}

MeasureSpec MeasureSpec::bernoulli2(double p) {
  Eigen::VectorXd v(2);
  v << p, 1.0 - p;
  return bernoulli(v);
}

MeasureSpec MeasureSpec::markov(Eigen::MatrixXd P, std::optional<Eigen::VectorXd> pi) {
  const auto k = P.rows();
  if (k < 2 || P.cols() != k) throw ValidationError("markov: P must be square with at least two states");
  for (Eigen::Index i = 0; i < k; ++i) check_probability_vector(P.row(i).transpose(), "markov: row " + std::to_string(i));
  if (!linalg::is_irreducible(P)) throw ValidationError("markov: P must be irreducible");
  Eigen::VectorXd stat = pi ? *pi : linalg::stationary_vector(P);
  check_probability_vector(stat, "markov: pi");
  if ((stat.transpose() * P - stat.transpose()).cwiseAbs().maxCoeff() > kProbTol)
    throw ValidationError("markov: pi is not stationary for P");
  return MeasureSpec(Markov{std::move(P), std::move(stat)});
}

MeasureSpec MeasureSpec::mixture(Eigen::VectorXd weights, std::vector<MeasureSpec> components) {
  check_probability_vector(weights, "mixture: weights");
  if (static_cast<std::size_t>(weights.size()) != components.size())
    throw ValidationError("mixture: one weight per component required");
  Mixture mix{std::move(weights), {}};
  for (const auto &c : components) {
    auto e = as_ergodic(c);
    for (const auto &prev : mix.components)
      if (same_ergodic(prev, e)) throw ValidationError("mixture: components must be pairwise distinct");
    mix.components.push_back(std::move(e));
  }
  const int k = components.front().alphabet_size();
  for (const auto &c : components)
    if (c.alphabet_size() != k) throw ValidationError("mixture: components must share an alphabet");
  return MeasureSpec(std::move(mix));
}

int MeasureSpec::alphabet_size() const {
  return std::visit(
      [](const auto &m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Bernoulli>) return static_cast<int>(m.p.size());
        else if constexpr (std::is_same_v<T, Markov>) return static_cast<int>(m.pi.size());
        else return std::visit([](const auto &c) -> int {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, Bernoulli>) return static_cast<int>(c.p.size());
            else return static_cast<int>(c.pi.size());
          }, m.components.front());
      },
      kind_);
}

std::vector<std::pair<double, MeasureSpec>> MeasureSpec::components() const {
  if (const auto *mix = std::get_if<Mixture>(&kind_)) {
    std::vector<std::pair<double, MeasureSpec>> out;
    for (std::size_t i = 0; i < mix->components.size(); ++i)
      out.emplace_back(mix->weights(static_cast<Eigen::Index>(i)),
                       std::visit([](const auto &c) { return MeasureSpec(c); }, mix->components[i]));
    return out;
  }
  return {{1.0, *this}};
}

MeasureSpec MeasureSpec::component(std::size_t i) const {
  auto all = components();
  if (i >= all.size()) throw ValidationError("measure: component index out of range");
  return all[i].second;
}

void MeasureSpec::validate_on(const Subshift &s) const {
  if (alphabet_size() != s.alphabet_size()) throw ValidationError("measure: alphabet size does not match the subshift");
  for (const auto &[w, c] : components()) {
    if (const auto *b = std::get_if<Bernoulli>(&c.kind_)) {
      for (int a = 0; a < s.alphabet_size(); ++a)
        for (int bb = 0; bb < s.alphabet_size(); ++bb)
          if (b->p(a) > 0.0 && b->p(bb) > 0.0 && !s.allowed(static_cast<Symbol>(a), static_cast<Symbol>(bb)))
            throw ValidationError("measure: bernoulli support charges a forbidden transition");
    } else {
      const auto &m = std::get<Markov>(c.kind_);
      for (int a = 0; a < s.alphabet_size(); ++a)
        for (int bb = 0; bb < s.alphabet_size(); ++bb)
          if (m.P(a, bb) > 0.0 && !s.allowed(static_cast<Symbol>(a), static_cast<Symbol>(bb)))
            throw ValidationError("measure: markov P is not supported on the transition matrix");
    }
  }
}

std::string MeasureSpec::describe() const {
  if (const auto *b = std::get_if<Bernoulli>(&kind_)) return "bernoulli(" + fmt_vec(b->p) + ")";
  if (const auto *m = std::get_if<Markov>(&kind_)) return "markov(pi=" + fmt_vec(m->pi) + ")";
  std::string out = "mixture(";
  const auto parts = components();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::ostringstream os;
    os.precision(6);
    os << parts[i].first;
    out += (i ? " + " : "") + os.str() + "*" + parts[i].second.describe();
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// Masses, entropy, integrals

double log_cylinder_mass(const MeasureSpec &mu, std::span<const Symbol> w) {
  if (const auto *mix = std::get_if<Mixture>(&mu.kind())) {
    std::vector<double> terms;
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      const double c = mix->weights(static_cast<Eigen::Index>(i));
      if (c <= 0.0) continue;
      terms.push_back(std::log(c) + log_mass_ergodic(mix->components[i], w));
    }
    return log_sum_exp(terms);
  }
  return log_mass_ergodic(as_ergodic(mu), w);
}

double cylinder_mass(const MeasureSpec &mu, std::span<const Symbol> w) {
  if (const auto *mix = std::get_if<Mixture>(&mu.kind())) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mix->components.size(); ++i)
      acc += mix->weights(static_cast<Eigen::Index>(i)) * std::exp(log_mass_ergodic(mix->components[i], w));
    return acc;
  }
  return std::exp(log_mass_ergodic(as_ergodic(mu), w));
}

EntropyValue entropy(const MeasureSpec &mu) {
  EntropyValue out{0.0, {}};
  for (const auto &[c, comp] : mu.components()) {
    const double h = entropy_ergodic(as_ergodic(comp));
    out.components.push_back(h);
    out.value += c * h;
  }
  return out;
}

double integrate(const MeasureSpec &mu, const Potential &phi) {
  if (mu.alphabet_size() != phi.alphabet_size()) throw ValidationError("integrate: alphabet mismatch");
  double acc = 0.0;
  for_each_word(phi.system(), phi.depth(), [&](std::span<const Symbol> w) { acc += cylinder_mass(mu, w) * phi(w); });
  return acc;
}

EntropyValue free_energy(const MeasureSpec &mu, const Potential &phi) {
  EntropyValue out{0.0, {}};
  for (const auto &[c, comp] : mu.components()) {
    const double f = entropy_ergodic(as_ergodic(comp)) + integrate(comp, phi);
    out.components.push_back(f);
    out.value += c * f;
  }
  return out;
}

double block_entropy(const Subshift &s, const MeasureSpec &mu, int n) {
  double h = 0.0;
  for_each_word(s, n, [&](std::span<const Symbol> w) { h -= xlogx(cylinder_mass(mu, w)); });
  return h;
}

// ---------------------------------------------------------------------------
// Empirical measures and neighbourhoods

EmpiricalMeasure empirical_of_word(std::span<const Symbol> w, int L, int alphabet_size) {
  if (L < 1) throw ValidationError("empirical_of_word: depth must be >= 1");
  if (static_cast<int>(w.size()) < L) throw ValidationError("empirical_of_word: word shorter than depth");
  std::size_t size = 1;
  for (int i = 0; i < L; ++i) size *= static_cast<std::size_t>(alphabet_size);
  std::vector<double> freq(size, 0.0);
  const std::size_t windows = w.size() - static_cast<std::size_t>(L) + 1;
  for (std::size_t i = 0; i < windows; ++i) freq[word_code(w.subspan(i, static_cast<std::size_t>(L)), alphabet_size)] += 1.0;
  for (double &f : freq) f /= static_cast<double>(windows);
  return EmpiricalMeasure(alphabet_size, L, std::move(freq));
}

NeighborhoodSpec::NeighborhoodSpec(const Subshift &s, MeasureSpec center, int depth, double radius)
    : center_(std::move(center)), depth_(depth), radius_(radius) {
  if (depth < 1) throw ValidationError("neighborhood: depth must be >= 1");
  if (!(radius > 0.0 && radius <= 2.0)) throw ValidationError("neighborhood: radius must lie in (0, 2]");
  center_.validate_on(s);
  std::size_t size = 1;
  for (int i = 0; i < depth; ++i) size *= static_cast<std::size_t>(s.alphabet_size());
  marginal_.assign(size, 0.0);
  for_each_word(s, depth, [&](std::span<const Symbol> w) {
    marginal_[word_code(w, s.alphabet_size())] = cylinder_mass(center_, w);
  });
}

double NeighborhoodSpec::tv_distance(const EmpiricalMeasure &e) const {
  if (e.depth() != depth_) throw ValidationError("in_neighborhood: depth mismatch");
  const auto &f = e.frequencies();
  if (f.size() != marginal_.size()) throw ValidationError("in_neighborhood: alphabet mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) tv += std::abs(f[i] - marginal_[i]);
  return 0.5 * tv;
}

bool in_neighborhood(const EmpiricalMeasure &e, const NeighborhoodSpec &F) { return F.tv_distance(e) < F.radius(); }

// ---------------------------------------------------------------------------
// Sampling

namespace {

Symbol draw(const Eigen::Ref<const Eigen::VectorXd> &p, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  Symbol last = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    acc += p(i);
    last = static_cast<Symbol>(i);
    if (x < acc) return last;
  }
  return last;
}

}  // namespace

OrbitSample sample_orbit(const Subshift &s, const MeasureSpec &mu, std::size_t length, std::uint64_t seed,
                         std::optional<int> component) {
  mu.validate_on(s);
  if (length == 0) throw ValidationError("sample_orbit: length must be positive");
  std::mt19937_64 rng(seed);
  const auto parts = mu.components();
  int id = 0;
  if (component) {
    if (*component < 0 || *component >= static_cast<int>(parts.size()))
      throw ValidationError("sample_orbit: component index out of range");
    id = *component;
  } else if (parts.size() > 1) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) w(static_cast<Eigen::Index>(i)) = parts[i].first;
    id = draw(w, rng);
  }
  const auto &chosen = parts[static_cast<std::size_t>(id)].second;

  OrbitSample out;
  out.seed = seed;
  out.component_id = id;
  out.word.symbols.resize(length);
  if (const auto *b = std::get_if<Bernoulli>(&chosen.kind())) {
    for (auto &sym : out.word.symbols) sym = draw(b->p, rng);
  } else {
    const auto &m = std::get<Markov>(chosen.kind());
    out.word.symbols[0] = draw(m.pi, rng);
    for (std::size_t i = 1; i < length; ++i) out.word.symbols[i] = draw(m.P.row(out.word.symbols[i - 1]).transpose(), rng);
  }
  return out;
}

MeasureSpec bernoulli_with_entropy(int k, double h) {
  if (k < 2) throw ValidationError("bernoulli_with_entropy: alphabet size must be >= 2");
  const double hmax = std::log(static_cast<double>(k));
  if (!(h >= 0.0 && h <= hmax)) throw ValidationError("bernoulli_with_entropy: entropy out of range");
  // q in [1/k, 1]: entropy decreases from log k to 0.
  auto vec = [k](double q) {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(k, (1.0 - q) / (k - 1));
    p(0) = q;
    return p;
  };
  auto ent = [&](double q) {
    const auto p = vec(q);
    double e = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) e -= xlogx(p(i));
    return e;
  };
  double lo = 1.0 / k, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ent(mid) > h ? lo : hi) = mid;
  }
  Eigen::VectorXd p = vec(0.5 * (lo + hi));
  p /= p.sum();
  return MeasureSpec::bernoulli(p);
}

}  // namespace thermo
