#include "thermo/measure_pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

LocalEntropy local_entropy(const MeasureSpec &mu, const OrbitSample &o, int n, int m) {
  if (n < 1 || m < 0) throw ValidationError("local_entropy: need n >= 1 and m >= 0");
  if (static_cast<std::size_t>(n + m) > o.word.size()) throw ValidationError("local_entropy: sample too short for n + m");
  const double lm = log_cylinder_mass(mu, o.word.view().first(static_cast<std::size_t>(n + m)));
  LocalEntropy out{-lm / n, -lm / (n + m), n, m, false};
  if (!std::isfinite(lm)) {
    out.infinite = true;
    out.raw = out.corrected = std::numeric_limits<double>::infinity();
  }
  return out;
}

double birkhoff_average(const Potential &phi, const OrbitSample &o, int n) {
  if (n < 1) throw ValidationError("birkhoff_average: n must be >= 1");
  return birkhoff_sum_n(phi, o.word.view(), n) / n;
}

PointwisePressure pointwise_pressure(const MeasureSpec &mu, const Potential &phi, const OrbitSample &o, int n, int m) {
  const auto local = local_entropy(mu, o, n, m);
  const double b = birkhoff_average(phi, o, n);
  return {local.raw + b, local, b};
}

double mt_pressure(const MeasureSpec &mu, const Potential &phi) {
  const auto fe = free_energy(mu, phi);
  const auto parts = mu.components();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].first > 0.0) best = std::max(best, fe.components[i]);
  return best;
}

MtEntropy mt_entropy(const MeasureSpec &mu) {
  const auto h = entropy(mu);
  const auto parts = mu.components();
  double E = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].first > 0.0) E = std::max(E, h.components[i]);
  return {E, h.value, E - h.value};
}

EssSupReport esssup_consistency_check(const Subshift &s, const MeasureSpec &mu, const Potential &phi,
                                      const EssSupPlan &plan) {
  if (plan.seeds.empty()) throw ValidationError("esssup_consistency_check: no seeds");
  const auto parts = mu.components();
  const auto fe = free_energy(mu, phi);
  EssSupReport report{{}, -std::numeric_limits<double>::infinity(), mt_pressure(mu, phi)};
  const std::size_t length = static_cast<std::size_t>(plan.n + plan.m + phi.depth());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    ComponentCluster c{static_cast<int>(i), parts[i].first, fe.components[i], {}, 0.0, 0.0};
    for (auto seed : plan.seeds) {
      const auto o = sample_orbit(s, mu, length, seed, static_cast<int>(i));
      const double v = pointwise_pressure(mu, phi, o, plan.n, plan.m).value;
      c.values.push_back(v);
      c.mean += v / static_cast<double>(plan.seeds.size());
      c.max_deviation = std::max(c.max_deviation, std::abs(v - c.oracle));
      if (c.weight > 0.0) report.sample_max = std::max(report.sample_max, v);
    }
    report.clusters.push_back(std::move(c));
  }
  return report;
}

}  // namespace thermo
