#pragma once

// Dimension of invariant measures on symbolic models of expanding interval
// maps and of hyperbolic surfaces.
//
// A RepellerModel codes points of a Cantor-like subset of the line: the
// cylinder [x_0 .. x_{n-1}] is an interval of length exp(-S_n phi_geom). The
// Bowen root t0 solves P_mu(-t phi_geom) = 0 where P_mu is the
// measure-theoretic pressure (maximum over ergodic components).

#include <string>
#include <vector>

#include "thermo/measures.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

class RepellerModel {
 public:
  RepellerModel(Subshift base, Potential geometry, std::string name = "");

  static RepellerModel middle_third();
  // Two branches contracting by 1/2 and 1/4.
  static RepellerModel ratios_half_quarter();

  const Subshift &base() const { return base_; }
  const Potential &geometry() const { return geometry_; }
  int ambient_dim() const { return 1; }
  const std::string &name() const { return name_; }
  RepellerModel rescaled(double c) const;

 private:
  Subshift base_;
  Potential geometry_;
  std::string name_;
};

class HyperbolicModel {
 public:
  HyperbolicModel(Subshift base, Potential unstable, Potential stable, bool volume_preserving = true,
                  std::string name = "");

  // Two-sided full 3-shift with phi_u = log lambda, phi_s = -log lambda,
  // lambda = (3 + sqrt 5) / 2.
  static HyperbolicModel cat_surrogate();
  static double cat_expansion();

  const Subshift &base() const { return base_; }
  const Potential &unstable() const { return unstable_; }
  const Potential &stable() const { return stable_; }
  bool volume_preserving() const { return volume_preserving_; }
  int ambient_dim() const { return 2; }
  const std::string &name() const { return name_; }

  // Throws unless int phi_u d nu = -int phi_s d nu (to 1e-12) for every
  // positive-weight component of mu.
  void check_volume_condition(const MeasureSpec &mu) const;

 private:
  Subshift base_;
  Potential unstable_;
  Potential stable_;
  bool volume_preserving_;
  std::string name_;
};

struct RootData {
  double root = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

struct DimensionResult {
  enum class Method { bowen_root, closed_form, box_count };
  double value = 0.0;
  Method method = Method::closed_form;
  std::vector<RootData> roots;  // t0, or (t_s, t_u)
};

std::string method_name(DimensionResult::Method m);

// Root of a continuous strictly decreasing function with f(0) >= 0: the
// bracket [0, T] is grown by doubling until f(T) < 0, then bisected.
// Monotonicity is checked on every evaluation pair.
template <typename F>
RootData decreasing_root(F &&f, double tolerance);

inline constexpr double kBowenTolerance = 1e-12;

DimensionResult bowen_root(const MeasureSpec &mu, const RepellerModel &model, double tolerance = kBowenTolerance);
DimensionResult hausdorff_dim_oracle(const MeasureSpec &mu, const RepellerModel &model);

struct PointwiseDimPoint {
  double radius;
  int depth;     // deepest n with |I_n(x)| >= r
  double value;  // log mu(I_n) / log r
  double lower;  // same as value
  double upper;  // log mu(I_{n+1}) / log r
  double gap() const { return upper - lower; }
};

struct PointwiseDimReport {
  std::vector<PointwiseDimPoint> trace;
  double estimate;  // value at the smallest radius
  double target;    // h / lambda of the sampled component
  bool zero_mass = false;
};

PointwiseDimReport pointwise_dim_estimate(const MeasureSpec &mu, const RepellerModel &model, const OrbitSample &o,
                                          const std::vector<double> &radii);

DimensionResult hyperbolic_roots(const MeasureSpec &mu, const HyperbolicModel &model,
                                 double tolerance = kBowenTolerance);
// Maximum over positive-weight components of h (1/lambda_u - 1/lambda_s).
double hyperbolic_dim_oracle(const MeasureSpec &mu, const HyperbolicModel &model);

}  // namespace thermo

#include "thermo/dimension_impl.hpp"
