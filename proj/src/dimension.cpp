#include "thermo/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermo/measure_pressure.hpp"

namespace thermo {

// ---------------------------------------------------------------------------
// Models

RepellerModel::RepellerModel(Subshift base, Potential geometry, std::string name)
    : base_(std::move(base)), geometry_(std::move(geometry)), name_(std::move(name)) {
  if (base_.sided() != Sidedness::one_sided) throw ValidationError("repeller: base subshift must be one-sided");
  if (!(geometry_.system() == base_)) throw ValidationError("repeller: geometry lives on another subshift");
  if (!(geometry_.min_value() > 0.0)) throw ValidationError("repeller: geometric potential must be positive");
}

RepellerModel RepellerModel::middle_third() {
  const auto s = Subshift::full(2);
  return RepellerModel(s, Potential::constant(s, std::log(3.0)), "middle-third");
}

RepellerModel RepellerModel::ratios_half_quarter() {
  const auto s = Subshift::full(2);
  return RepellerModel(s, Potential(s, 1, {std::log(2.0), std::log(4.0)}), "ratios-1/2-1/4");
}

RepellerModel RepellerModel::rescaled(double c) const {
  if (!(c > 0.0)) throw ValidationError("repeller: rescaling factor must be positive");
  return RepellerModel(base_, geometry_.scaled(c), name_);
}

HyperbolicModel::HyperbolicModel(Subshift base, Potential unstable, Potential stable, bool volume_preserving,
                                 std::string name)
    : base_(std::move(base)),
      unstable_(std::move(unstable)),
      stable_(std::move(stable)),
      volume_preserving_(volume_preserving),
      name_(std::move(name)) {
  if (base_.sided() != Sidedness::two_sided) throw ValidationError("hyperbolic: base subshift must be two-sided");
  if (!(unstable_.system() == base_) || !(stable_.system() == base_))
    throw ValidationError("hyperbolic: potentials live on another subshift");
  if (!(unstable_.min_value() > 0.0)) throw ValidationError("hyperbolic: unstable potential must be positive");
  if (!(stable_.max_value() < 0.0)) throw ValidationError("hyperbolic: stable potential must be negative");
}

double HyperbolicModel::cat_expansion() { return (3.0 + std::sqrt(5.0)) / 2.0; }

HyperbolicModel HyperbolicModel::cat_surrogate() {
  const auto s = Subshift::full(3, Sidedness::two_sided);
  const double l = std::log(cat_expansion());
  return HyperbolicModel(s, Potential::constant(s, l), Potential::constant(s, -l), true, "cat-surrogate");
}

void HyperbolicModel::check_volume_condition(const MeasureSpec &mu) const {
  if (!volume_preserving_)
    throw ValidationError("hyperbolic dimension formula requires a volume-preserving model");
  for (const auto &[c, nu] : mu.components()) {
    if (c <= 0.0) continue;
    const double u = integrate(nu, unstable_);
    const double s = integrate(nu, stable_);
    if (std::abs(u + s) > 1e-12)
      throw ValidationError("hyperbolic dimension formula requires a volume-preserving model: "
                            "int phi_u dnu != -int phi_s dnu");
  }
}

std::string method_name(DimensionResult::Method m) {
  switch (m) {
    case DimensionResult::Method::bowen_root: return "bowen_root";
    case DimensionResult::Method::closed_form: return "closed_form";
    case DimensionResult::Method::box_count: return "box_count";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Repellers

DimensionResult bowen_root(const MeasureSpec &mu, const RepellerModel &model, double tolerance) {
  mu.validate_on(model.base());
  const auto &geom = model.geometry();
  // P(t) = P_mu(-t phi_geom), evaluated through the measure-theoretic pressure.
  auto P = [&](double t) { return mt_pressure(mu, geom.scaled(-t)); };
  DimensionResult out;
  out.method = DimensionResult::Method::bowen_root;
  out.roots.push_back(decreasing_root(P, tolerance));
  out.value = out.roots.back().root;
  return out;
}

DimensionResult hausdorff_dim_oracle(const MeasureSpec &mu, const RepellerModel &model) {
  mu.validate_on(model.base());
  const auto h = entropy(mu);
  const auto parts = mu.components();
  double best = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].first <= 0.0) continue;
    best = std::max(best, h.components[i] / integrate(parts[i].second, model.geometry()));
  }
  DimensionResult out;
  out.method = DimensionResult::Method::closed_form;
  out.value = best;
  return out;
}

PointwiseDimReport pointwise_dim_estimate(const MeasureSpec &mu, const RepellerModel &model, const OrbitSample &o,
                                          const std::vector<double> &radii) {
  const auto &geom = model.geometry();
  const auto parts = mu.components();
  if (o.component_id < 0 || o.component_id >= static_cast<int>(parts.size()))
    throw ValidationError("pointwise_dim_estimate: sample component out of range");
  const auto &nu = parts[static_cast<std::size_t>(o.component_id)].second;

  PointwiseDimReport report;
  report.target = entropy(nu).value / integrate(nu, geom);

  // log |I_n| = -S_n phi_geom for every n the sample determines.
  const auto w = o.word.view();
  const int max_n = static_cast<int>(w.size()) - geom.depth() + 1;
  std::vector<double> log_len{0.0};
  for (int n = 1; n <= max_n; ++n) log_len.push_back(log_len.back() - geom(w.subspan(static_cast<std::size_t>(n - 1))));

  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("pointwise_dim_estimate: radii must lie in (0, 1)");
    const double log_r = std::log(r);
    int n = 0;
    while (n + 1 <= max_n && log_len[static_cast<std::size_t>(n + 1)] >= log_r - 1e-9) ++n;
    if (n + 1 > max_n) throw ValidationError("pointwise_dim_estimate: sample too short for this radius");
    const double mass_n = log_cylinder_mass(mu, w.first(static_cast<std::size_t>(n)));
    const double mass_next = log_cylinder_mass(mu, w.first(static_cast<std::size_t>(n + 1)));
    if (!std::isfinite(mass_next)) report.zero_mass = true;
    PointwiseDimPoint pt{r, n, mass_n / log_r, mass_n / log_r, mass_next / log_r};
    report.trace.push_back(pt);
  }
  if (report.trace.empty()) throw ValidationError("pointwise_dim_estimate: empty radius schedule");
  report.estimate = report.trace.back().value;
  return report;
}

// ---------------------------------------------------------------------------
// Hyperbolic

DimensionResult hyperbolic_roots(const MeasureSpec &mu, const HyperbolicModel &model, double tolerance) {
  mu.validate_on(model.base());
  model.check_volume_condition(mu);
  auto Ps = [&](double t) { return mt_pressure(mu, model.stable().scaled(t)); };
  auto Pu = [&](double t) { return mt_pressure(mu, model.unstable().scaled(-t)); };
  DimensionResult out;
  out.method = DimensionResult::Method::bowen_root;
  out.roots.push_back(decreasing_root(Ps, tolerance));
  out.roots.push_back(decreasing_root(Pu, tolerance));
  out.value = out.roots[0].root + out.roots[1].root;
  return out;
}

double hyperbolic_dim_oracle(const MeasureSpec &mu, const HyperbolicModel &model) {
  const auto h = entropy(mu);
  const auto parts = mu.components();
  double best = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].first <= 0.0) continue;
    const double lu = integrate(parts[i].second, model.unstable());
    const double ls = integrate(parts[i].second, model.stable());
    best = std::max(best, h.components[i] * (1.0 / lu - 1.0 / ls));
  }
  return best;
}

}  // namespace thermo
