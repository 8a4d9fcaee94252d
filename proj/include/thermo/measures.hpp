#pragma once

// Shift-invariant measures on subshifts: Bernoulli, Markov and finite convex
// mixtures of those. Mixture weights play the role of the ergodic
// decomposition.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "thermo/symbolic.hpp"

namespace thermo {

struct Bernoulli {
  Eigen::VectorXd p;
};

struct Markov {
  Eigen::MatrixXd P;   // row stochastic
  Eigen::VectorXd pi;  // stationary: pi P = pi
};

using ErgodicMeasure = std::variant<Bernoulli, Markov>;

struct Mixture {
  Eigen::VectorXd weights;
  std::vector<ErgodicMeasure> components;
};

class MeasureSpec {
 public:
  using Kind = std::variant<Bernoulli, Markov, Mixture>;

  static MeasureSpec bernoulli(Eigen::VectorXd p);
  // Convenience for two symbols: (p, 1 - p).
  static MeasureSpec bernoulli2(double p);
  // The stationary vector is solved for when omitted.
  static MeasureSpec markov(Eigen::MatrixXd P, std::optional<Eigen::VectorXd> pi = std::nullopt);
  static MeasureSpec mixture(Eigen::VectorXd weights, std::vector<MeasureSpec> components);

  const Kind &kind() const { return kind_; }
  bool is_ergodic() const { return !std::holds_alternative<Mixture>(kind_); }
  int alphabet_size() const;

  // The ergodic pieces with their weights; an ergodic measure is one piece of
  // weight 1.
  std::vector<std::pair<double, MeasureSpec>> components() const;
  MeasureSpec component(std::size_t i) const;

  // Support compatibility with a subshift (Bernoulli support must be a full
  // block of the transition matrix, Markov P must live on it).
  void validate_on(const Subshift &s) const;

  std::string describe() const;

 private:
  explicit MeasureSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// ---------------------------------------------------------------------------

double cylinder_mass(const MeasureSpec &mu, std::span<const Symbol> w);
inline double cylinder_mass(const MeasureSpec &mu, const Word &w) { return cylinder_mass(mu, w.view()); }
// log of the mass, computed without underflow for long words; -inf for
// inadmissible words.
double log_cylinder_mass(const MeasureSpec &mu, std::span<const Symbol> w);

struct EntropyValue {
  double value;                    // h_mu(f), affine in the measure
  std::vector<double> components;  // per ergodic component (one entry if ergodic)
};

EntropyValue entropy(const MeasureSpec &mu);
double integrate(const MeasureSpec &mu, const Potential &phi);
EntropyValue free_energy(const MeasureSpec &mu, const Potential &phi);

// Shannon entropy of the depth-n marginal, -sum mu(w) log mu(w).
double block_entropy(const Subshift &s, const MeasureSpec &mu, int n);

// Sliding-window frequencies of depth-L words (no wraparound).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(int alphabet_size, int depth, std::vector<double> frequencies)
      : k_(alphabet_size), depth_(depth), freq_(std::move(frequencies)) {}

  int depth() const { return depth_; }
  int alphabet_size() const { return k_; }
  // Dense over all k^L codes.
  const std::vector<double> &frequencies() const { return freq_; }
  double frequency(std::span<const Symbol> w) const { return freq_[word_code(w, k_)]; }

 private:
  int k_;
  int depth_;
  std::vector<double> freq_;
};

EmpiricalMeasure empirical_of_word(std::span<const Symbol> w, int L, int alphabet_size);
inline EmpiricalMeasure empirical_of_word(const Word &w, int L, int alphabet_size) {
  return empirical_of_word(w.view(), L, alphabet_size);
}

// A weak-star neighbourhood: total variation ball of radius theta around the
// depth-L cylinder marginal of `center`.
class NeighborhoodSpec {
 public:
  NeighborhoodSpec(const Subshift &s, MeasureSpec center, int depth, double radius);

  const MeasureSpec &center() const { return center_; }
  int depth() const { return depth_; }
  double radius() const { return radius_; }
  // Dense over all k^L codes; zero off the admissible words.
  const std::vector<double> &marginal() const { return marginal_; }

  double tv_distance(const EmpiricalMeasure &e) const;

 private:
  MeasureSpec center_;
  int depth_;
  double radius_;
  std::vector<double> marginal_;
};

bool in_neighborhood(const EmpiricalMeasure &e, const NeighborhoodSpec &F);

// ---------------------------------------------------------------------------
// Sampling

struct OrbitSample {
  Word word;
  std::uint64_t seed = 0;
  int component_id = 0;
};

// Draws a word of the given length from mu with a seeded generator. For
// mixtures the component is drawn from the weights unless `component` pins it.
OrbitSample sample_orbit(const Subshift &s, const MeasureSpec &mu, std::size_t length, std::uint64_t seed,
                         std::optional<int> component = std::nullopt);

// Bernoulli measure on k symbols of the form (q, (1-q)/(k-1), ...) with the
// requested entropy, for 0 <= h <= log k.
MeasureSpec bernoulli_with_entropy(int k, double h);

}  // namespace thermo
