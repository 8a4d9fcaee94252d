#include <doctest.h>

#include "oracles.hpp"
#include "thermo/builtins.hpp"
#include "thermo/dimension.hpp"
#include "thermo/dimension_impl.hpp"

using namespace thermo;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

MeasureSpec B(double p) { return MeasureSpec::bernoulli2(p); }

std::vector<MeasureSpec> grid_measures() {
  return {B(0.5), B(0.7), B(0.9), *builtins::measure("mix-A", 2), *builtins::measure("mix-B", 2)};
}

std::vector<RepellerModel> grid_models() { return {RepellerModel::middle_third(), RepellerModel::ratios_half_quarter()}; }

std::vector<double> radii_for(const std::vector<int> &depths, double lambda) {
  std::vector<double> out;
  for (int d : depths) out.push_back(std::exp(-d * lambda));
  return out;
}

}  // namespace

TEST_CASE("bowen roots on the middle-third model") {
  const auto model = RepellerModel::middle_third();
  CHECK(oracle::near(bowen_root(B(0.5), model).value, kLog2 / kLog3, 1e-10));
  CHECK(oracle::near(bowen_root(B(1.0), model).value, 0.0, 1e-10));
  CHECK(oracle::near(bowen_root(*builtins::measure("mix-A", 2), model).value, kLog2 / kLog3, 1e-10));
}

TEST_CASE("closed-form dimensions") {
  const auto ratios = RepellerModel::ratios_half_quarter();
  for (double p : {0.1, 0.5, 0.7, 0.9})
    CHECK(hausdorff_dim_oracle(B(p), ratios).value ==
          doctest::Approx(oracle::H(p) / (p * kLog2 + (1 - p) * 2 * kLog2)).epsilon(1e-14));
  CHECK(hausdorff_dim_oracle(B(0.5), RepellerModel::middle_third()).value == doctest::Approx(kLog2 / kLog3));
  CHECK(hausdorff_dim_oracle(B(1.0), ratios).value == 0.0);
}

TEST_CASE("bowen root equals the closed form on the built-in grid") {
  for (const auto &model : grid_models())
    for (const auto &mu : grid_measures()) {
      const auto root = bowen_root(mu, model);
      CHECK(oracle::near(root.value, hausdorff_dim_oracle(mu, model).value, 1e-8));
      CHECK(root.value >= 0.0);
      CHECK(root.value <= model.ambient_dim());
    }
}

TEST_CASE("bowen root of a mixture is the max over components") {
  for (const auto &model : grid_models())
    for (const auto &name : {"mix-A", "mix-B"}) {
      const auto mu = *builtins::measure(name, 2);
      double best = 0.0;
      for (const auto &[c, nu] : mu.components()) best = std::max(best, bowen_root(nu, model).value);
      CHECK(oracle::near(bowen_root(mu, model).value, best, 1e-8));
    }
}

TEST_CASE("bowen root scales inversely with the geometric potential") {
  for (const auto &model : grid_models())
    for (const auto &mu : grid_measures()) {
      const double t0 = bowen_root(mu, model).value;
      for (double c : {0.5, 2.0, 3.7}) CHECK(oracle::near(bowen_root(mu, model.rescaled(c)).value, t0 / c, 1e-9));
    }
}

TEST_CASE("decreasing_root checks its bracket") {
  CHECK(decreasing_root([](double t) { return 1.0 - t; }, 1e-12).root == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(decreasing_root([](double t) { return 5.0 - t; }, 1e-12).root == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(decreasing_root([](double t) { return -1.0 - t; }, 1e-12), NumericalError);
  CHECK_THROWS_AS(decreasing_root([](double t) { return 1.0 + t; }, 1e-12), NumericalError);
}

TEST_CASE("point-wise dimension on the middle-third model") {
  const auto model = RepellerModel::middle_third();
  const std::vector<int> depths = {10, 20, 30, 40};
  const auto radii = radii_for(depths, kLog3);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto o = sample_orbit(model.base(), B(0.5), 60, seed);
    const auto rep = pointwise_dim_estimate(B(0.5), model, o, radii);
    CHECK(oracle::near(rep.estimate, kLog2 / kLog3, 0.02));
    CHECK(rep.target == doctest::Approx(kLog2 / kLog3));
    for (std::size_t i = 0; i < rep.trace.size(); ++i) {
      CHECK(rep.trace[i].lower <= rep.trace[i].upper);
      if (i > 0) CHECK(rep.trace[i].gap() < rep.trace[i - 1].gap());
    }
  }

  const auto atom = sample_orbit(model.base(), B(1.0), 60, 1);
  CHECK(pointwise_dim_estimate(B(1.0), model, atom, radii).estimate == 0.0);
}

TEST_CASE("point-wise dimension on the 1/2, 1/4 model") {
  const auto model = RepellerModel::ratios_half_quarter();
  const double lambda = 1.5 * kLog2;
  // cylinder lengths fluctuate like a binomial, so the spread is ~ 0.2 / sqrt(depth)
  const auto radii = radii_for({100, 300, 600}, lambda);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto o = sample_orbit(model.base(), B(0.5), 1000, seed);
    const auto rep = pointwise_dim_estimate(B(0.5), model, o, radii);
    CHECK(oracle::near(rep.estimate, 2.0 / 3.0, 0.03));
  }
}

TEST_CASE("point-wise dimension rejects short samples") {
  const auto model = RepellerModel::middle_third();
  const auto o = sample_orbit(model.base(), B(0.5), 10, 1);
  CHECK_THROWS_AS(pointwise_dim_estimate(B(0.5), model, o, {std::pow(3.0, -20)}), ValidationError);
}

TEST_CASE("hyperbolic surrogate") {
  const auto model = HyperbolicModel::cat_surrogate();
  const double l = std::log(HyperbolicModel::cat_expansion());
  const auto max = bernoulli_with_entropy(3, l);
  const auto half = bernoulli_with_entropy(3, 0.5 * l);
  const auto both = MeasureSpec::mixture(Eigen::Vector2d(0.5, 0.5), {max, half});

  const auto r = hyperbolic_roots(max, model);
  CHECK(oracle::near(r.value, 2.0, 1e-8));
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0].root == r.roots[1].root);
  CHECK(oracle::near(hyperbolic_roots(half, model).value, 1.0, 1e-8));
  CHECK(oracle::near(hyperbolic_roots(both, model).value, 2.0, 1e-8));
  CHECK(oracle::near(hyperbolic_dim_oracle(both, model), 2.0, 1e-12));

  for (const auto &mu : {max, half, both}) {
    const double d = hyperbolic_roots(mu, model).value;
    CHECK(d >= 0.0);
    CHECK(d <= model.ambient_dim() + 1e-8);
  }
}

TEST_CASE("hyperbolic roots are symmetric when the stable potential mirrors the unstable one") {
  const auto s = Subshift::full(3, Sidedness::two_sided);
  const Potential u(s, 1, {0.6, 1.1, 0.9});
  const HyperbolicModel model(s, u, u.scaled(-1.0));
  for (double h : {0.2, 0.7, 1.0}) {
    const auto r = hyperbolic_roots(bernoulli_with_entropy(3, h), model);
    CHECK(r.roots[0].root == r.roots[1].root);
  }
}

TEST_CASE("non-volume-preserving models are rejected") {
  const auto s = Subshift::full(3, Sidedness::two_sided);
  const double l = std::log(HyperbolicModel::cat_expansion());
  const auto mu = bernoulli_with_entropy(3, l);

  const HyperbolicModel skewed(s, Potential::constant(s, l), Potential::constant(s, -2 * l));
  CHECK_THROWS_WITH_AS(hyperbolic_roots(mu, skewed),
                       doctest::Contains("hyperbolic dimension formula requires a volume-preserving model"),
                       ValidationError);

  const HyperbolicModel flagged(s, Potential::constant(s, l), Potential::constant(s, -l), false);
  CHECK_THROWS_WITH_AS(hyperbolic_roots(mu, flagged),
                       doctest::Contains("hyperbolic dimension formula requires a volume-preserving model"),
                       ValidationError);
}

TEST_CASE("model validation") {
  const auto two = Subshift::full(2, Sidedness::two_sided);
  const auto one = Subshift::full(2);
  CHECK_THROWS_AS(RepellerModel(two, Potential::constant(two, 1.0)), ValidationError);
  CHECK_THROWS_AS(RepellerModel(one, Potential(one, 1, {1.0, -0.1})), ValidationError);
  CHECK_THROWS_AS(HyperbolicModel(one, Potential::constant(one, 1.0), Potential::constant(one, -1.0)), ValidationError);
  CHECK_THROWS_AS(HyperbolicModel(two, Potential::constant(two, 1.0), Potential::constant(two, 0.5)), ValidationError);
}
