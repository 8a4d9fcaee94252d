#pragma once

// Point-wise and measure-theoretic pressure. Along a sampled orbit the
// dynamical ball B_n(x, eps) is the cylinder of length n + m, so local
// entropy is read off exact cylinder masses. For finite mixtures the
// measure-theoretic pressure is the maximum of the component free energies
// over positive-weight components.

#include <cstdint>
#include <vector>

#include "thermo/measures.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

struct LocalEntropy {
  double raw;        // -(1/n) log mu[x_0 .. x_{n+m-1}]
  double corrected;  // -(1/(n+m)) log mu[x_0 .. x_{n+m-1}]
  int n;
  int m;
  bool infinite;     // zero mass: the sample is not in the support of mu
};

LocalEntropy local_entropy(const MeasureSpec &mu, const OrbitSample &o, int n, int m);

double birkhoff_average(const Potential &phi, const OrbitSample &o, int n);

struct PointwisePressure {
  double value;  // local_entropy.raw + birkhoff_average
  LocalEntropy local;
  double birkhoff;
};

PointwisePressure pointwise_pressure(const MeasureSpec &mu, const Potential &phi, const OrbitSample &o, int n, int m);

// Maximum of h_i + int phi d nu_i over components with c_i > 0.
double mt_pressure(const MeasureSpec &mu, const Potential &phi);

struct MtEntropy {
  double E;    // ess-sup entropy
  double h;    // Kolmogorov-Sinai entropy (affine)
  double gap;  // E - h >= 0
};

MtEntropy mt_entropy(const MeasureSpec &mu);

struct EssSupPlan {
  int n = 10000;
  int m = 0;
  std::vector<std::uint64_t> seeds;  // used for every component
};

struct ComponentCluster {
  int component;
  double weight;
  double oracle;  // free energy of the component
  std::vector<double> values;
  double mean;
  double max_deviation;  // max |value - oracle|
};

struct EssSupReport {
  std::vector<ComponentCluster> clusters;
  double sample_max;  // max over all samples of positive-weight components
  double oracle;      // mt_pressure
};

EssSupReport esssup_consistency_check(const Subshift &s, const MeasureSpec &mu, const Potential &phi,
                                      const EssSupPlan &plan);

}  // namespace thermo
