#pragma once

// Pressure functionals at finite scale on subshifts of finite type.
//
// * pressure_oracle: log of the Perron root of the weighted higher-block
//   transfer matrix (ground truth for the classical topological pressure).
// * Caratheodory-Pesin cover functionals M and R over unions of cylinders,
//   and the jump-up (critical) exponent alpha where M crosses 1.
// * Separated-set pressures over X_{n,F}, the set of points whose empirical
//   measure lies in a weak-star neighbourhood F.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermo/measures.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

struct ScaleParams {
  std::optional<int> n;
  std::optional<int> eps_depth;  // m with eps = 2^-m
  std::optional<double> delta;
  std::optional<double> theta;
  std::optional<int> L;
  std::optional<int> D;
};

struct TracePoint {
  double scale;  // n or N, depending on the estimator
  double value;
  ScaleParams params;
};

// Finite-scale estimate with its convergence trace. `value` equals the last
// trace entry. `flag` is empty unless the value is a meaningful non-number
// (e.g. -inf for an empty X_{n,F}).
struct EstimateReport {
  double value = 0.0;
  ScaleParams params;
  std::vector<TracePoint> trace;
  std::string flag;
};

// Z in the cover functionals: a finite union of cylinders of one length. The
// whole space is the single empty cylinder.
struct CylinderSet {
  int length = 0;
  std::vector<Word> cylinders;

  static CylinderSet whole_space() { return {0, {Word{}}}; }
  static CylinderSet of(std::vector<Word> words);
  // The point a^infinity, represented by its length-`length` cylinder.
  static CylinderSet constant_orbit(Symbol a, int length);
};

// Weight of a ball in a cover. A ball is a cylinder and any of its points can
// serve as the center, so the infimum over covers sees inf S_n phi over the
// cylinder. `sup` is the conservative variant: it can only raise M.
enum class BallWeight { inf, sup };

struct CpParams {
  double alpha = 0.0;
  int N = 1;    // minimum ball length
  int m = 0;    // eps = 2^-m
  int D = 16;   // maximum ball length
  BallWeight weight = BallWeight::inf;
};

// Depth cap used when none is given: 16 for two symbols, 10 for three, 8 above.
int default_depth_cap(int alphabet_size);

double pressure_oracle(const Potential &phi);

// Cylinder tree of all cylinders of length <= D + m meeting Z, with the ball
// weight S_n phi attached to each eligible ball. Built once and reused for
// every (alpha, N) query.
class CoverTree {
 public:
  CoverTree(const Potential &phi, const CylinderSet &Z, int m, int D, BallWeight weight = BallWeight::inf);

  int m() const { return m_; }
  int D() const { return D_; }
  std::size_t size() const { return parent_.size(); }

  // log M(Z, phi, alpha, N, eps) restricted to balls with N <= n_i <= D.
  double log_cover_value(double alpha, int N) const;
  // log R(Z, phi, alpha, N, eps): all balls of the single length N.
  double log_uniform_value(double alpha, int N) const;

 private:
  int m_;
  int D_;
  std::vector<int> level_start_;      // index of the first node at each level
  std::vector<std::int32_t> parent_;  // -1 at the root
  std::vector<double> ball_sum_;      // inf or sup of S_{level-m} phi over the cylinder
};

double cp_cover_value(const Potential &phi, const CylinderSet &Z, const CpParams &p);
double cp_uniform_value(const Potential &phi, const CylinderSet &Z, double alpha, int N, int m,
                        BallWeight weight = BallWeight::inf);

// Critical alpha where M(..., alpha, N, eps) = 1 for each N in the schedule;
// trace holds (N, crossing) and the value is the last crossing.
EstimateReport jump_up_point(const Potential &phi, const CylinderSet &Z, const std::vector<int> &N_schedule, int m,
                             int D, double tolerance = 1e-6, BallWeight weight = BallWeight::inf);

struct LowerUpper {
  double lower;
  double upper;
  EstimateReport trace;  // (N, (1/N) log sum over length-N balls)
};

// Normalized crossings of R over N_range; lower/upper are their min/max.
LowerUpper cp_lower_upper(const Potential &phi, const CylinderSet &Z, int m, const std::vector<int> &N_range,
                          BallWeight weight = BallWeight::inf);

struct SeparationMode {
  enum class Kind { n_eps, hamming } kind = Kind::n_eps;
  double delta = 0.0;

  static SeparationMode n_eps() { return {}; }
  static SeparationMode hamming(double d) { return {Kind::hamming, d}; }
  std::string name() const;
};

// (1/n) log P(F; phi, n, eps) (or P(F; phi, delta, n, eps) in hamming mode)
// at a single scale.
EstimateReport separated_pressure(const Potential &phi, const NeighborhoodSpec &F, int n, int m,
                                  const SeparationMode &mode);

struct SpSchedulePoint {
  int n;
  int m;
  double theta;
};

// Nested schedule: for each eps (outermost, decreasing) the n values increase
// with theta = min(theta_cap, theta_scale / sqrt(n)).
std::vector<SpSchedulePoint> coupled_schedule(const std::vector<int> &eps_depths, const std::vector<int> &ns,
                                              double theta_scale, double theta_cap = 2.0);

EstimateReport sp_estimate(const Potential &phi, const MeasureSpec &mu, int L,
                           const std::vector<SpSchedulePoint> &schedule, const SeparationMode &mode);

}  // namespace thermo
