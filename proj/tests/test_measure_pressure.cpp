#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "thermo/measure_pressure.hpp"

using namespace thermo;

namespace {

const double kLog2 = std::log(2.0);

MeasureSpec B(double p) { return MeasureSpec::bernoulli2(p); }

MeasureSpec mix(double c, const MeasureSpec &a, const MeasureSpec &b) {
  return MeasureSpec::mixture(Eigen::Vector2d(c, 1.0 - c), {a, b});
}

std::vector<std::uint64_t> seeds(std::uint64_t from, std::uint64_t count) {
  std::vector<std::uint64_t> out(count);
  std::iota(out.begin(), out.end(), from);
  return out;
}

}  // namespace

TEST_CASE("local entropy of the fair coin is exact") {
  const auto s = Subshift::full(2);
  for (std::uint64_t seed : {1u, 2u, 3u})
    for (int m : {0, 2, 5}) {
      const auto o = sample_orbit(s, B(0.5), 200, seed);
      const auto le = local_entropy(B(0.5), o, 100, m);
      CHECK(le.raw == doctest::Approx(kLog2 * (100 + m) / 100).epsilon(1e-13));
      CHECK(le.corrected == doctest::Approx(kLog2).epsilon(1e-13));
      CHECK_FALSE(le.infinite);
    }
}

TEST_CASE("local entropy of typical samples") {
  const auto s = Subshift::full(2);
  for (std::uint64_t seed : seeds(1, 10)) {
    const auto o = sample_orbit(s, B(0.9), 10000, seed);
    CHECK(oracle::near(local_entropy(B(0.9), o, 10000, 0).raw, oracle::H(0.9), 0.02));
  }

  const auto mixA = mix(0.5, B(0.5), B(0.9));
  const double h[] = {kLog2, oracle::H(0.9)};
  for (int c : {0, 1})
    for (std::uint64_t seed : seeds(100, 5)) {
      const auto o = sample_orbit(s, mixA, 10000, seed, c);
      CHECK(o.component_id == c);
      CHECK(oracle::near(local_entropy(mixA, o, 10000, 0).raw, h[c], 0.02));
    }
}

TEST_CASE("local entropy grows as the ball shrinks") {
  const auto s = Subshift::full(2);
  const auto mu = mix(0.3, B(0.7), B(0.9));
  for (std::uint64_t seed : seeds(1, 5)) {
    const auto o = sample_orbit(s, mu, 600, seed);
    double previous = 0.0;
    for (int m = 0; m <= 8; ++m) {
      const double v = local_entropy(mu, o, 500, m).raw;
      CHECK(v >= previous);
      previous = v;
    }
  }
}

TEST_CASE("zero-mass samples are flagged") {
  const auto o = OrbitSample{Word::parse("0000100"), 0, 0};
  const auto le = local_entropy(B(1.0), o, 6, 0);
  CHECK(le.infinite);
  CHECK(le.raw == INFINITY);
}

TEST_CASE("birkhoff averages") {
  const auto s = Subshift::full(2);
  const auto o = sample_orbit(s, B(0.7), 10001, 5);
  CHECK(birkhoff_average(Potential::constant(s, -0.8), o, 10000) == doctest::Approx(-0.8).epsilon(1e-12));

  const double a = 0.3, b = -0.2;
  const Potential phi(s, 1, {a, b});
  const double mean = 0.7 * a + 0.3 * b;
  const double sigma = std::abs(a - b) * std::sqrt(0.7 * 0.3);
  for (std::uint64_t seed : seeds(1, 10)) {
    const auto x = sample_orbit(s, B(0.7), 10000, seed);
    CHECK(oracle::near(birkhoff_average(phi, x, 10000), mean, 3 * sigma / 100));
  }

  OrbitSample periodic{Word::parse("0101010101010101"), 0, 0};
  for (int n : {2, 4, 8, 16}) CHECK(birkhoff_average(phi, periodic, n) == doctest::Approx((a + b) / 2).epsilon(1e-14));
}

TEST_CASE("point-wise pressure") {
  const auto s = Subshift::full(2);
  const auto zero = Potential::constant(s, 0.0);
  const auto o = sample_orbit(s, B(0.7), 1000, 3);
  const auto pw0 = pointwise_pressure(B(0.7), zero, o, 900, 2);
  CHECK(pw0.value == pw0.local.raw);

  const Potential phi(s, 1, {0.3, -0.2});
  for (std::uint64_t seed : seeds(1, 10)) {
    const auto x = sample_orbit(s, B(0.9), 10001, seed);
    CHECK(oracle::near(pointwise_pressure(B(0.9), phi, x, 10000, 0).value, free_energy(B(0.9), phi).value, 0.05));
  }

  const auto mixB = mix(0.3, B(0.7), B(0.9));
  const auto fe = free_energy(mixB, phi);
  for (int c : {0, 1}) {
    const auto x = sample_orbit(s, mixB, 10001, 11, c);
    CHECK(oracle::near(pointwise_pressure(mixB, phi, x, 10000, 0).value, fe.components[static_cast<std::size_t>(c)], 0.05));
  }
}

TEST_CASE("point-wise pressure is within 0.05 of the free energy on at least 99% of seeds") {
  const auto s = Subshift::full(2);
  const Potential phi(s, 1, {0.3, -0.2});
  for (double p : {0.5, 0.7, 0.9}) {
    const double target = free_energy(B(p), phi).value;
    int hits = 0;
    for (std::uint64_t seed : seeds(1000, 200)) {
      const auto x = sample_orbit(s, B(p), 10001, seed);
      hits += oracle::near(pointwise_pressure(B(p), phi, x, 10000, 0).value, target, 0.05);
    }
    CHECK(hits >= 198);
  }
}

TEST_CASE("measure-theoretic pressure is the ess-sup of free energies") {
  const auto s = Subshift::full(2);
  const auto zero = Potential::constant(s, 0.0);
  const Potential phi(s, 1, {0.3, -0.2});
  CHECK(mt_pressure(B(0.7), phi) == doctest::Approx(oracle::H(0.7) + 0.7 * 0.3 - 0.3 * 0.2).epsilon(1e-14));
  CHECK(mt_pressure(mix(0.5, B(0.5), B(0.9)), zero) == doctest::Approx(kLog2).epsilon(1e-14));
  CHECK(mt_pressure(mix(0.0, B(0.5), B(0.9)), zero) == doctest::Approx(oracle::H(0.9)).epsilon(1e-14));
}

TEST_CASE("mt_pressure identities") {
  const auto s = Subshift::full(2);
  const std::vector<Potential> potentials = {Potential::constant(s, 0.0), Potential(s, 1, {0.3, -0.2}),
                                             Potential(s, 1, {-1.0, 1.0}), Potential(s, 2, {0.4, -0.1, 0.0, 0.9})};
  const std::vector<std::pair<MeasureSpec, MeasureSpec>> pairs = {
      {B(0.5), B(0.9)}, {B(0.7), B(0.9)}, {B(0.2), B(0.6)}, {B(0.9), B(0.1)}};
  for (const auto &phi : potentials)
    for (const auto &[a, b] : pairs)
      for (double c : {0.1, 0.5, 0.8}) {
        const auto mu = mix(c, a, b);
        const double p = mt_pressure(mu, phi);
        // shift
        for (double shift : {-0.7, 0.25}) CHECK(mt_pressure(mu, phi.shifted(shift)) == doctest::Approx(p + shift).epsilon(1e-13));
        // permutation
        CHECK(mt_pressure(mix(1.0 - c, b, a), phi) == doctest::Approx(p).epsilon(1e-14));
        // dominates the affine free energy, with equality iff components tie
        const auto fe = free_energy(mu, phi);
        CHECK(p >= fe.value - 1e-14);
        const bool tie = std::abs(fe.components[0] - fe.components[1]) < 1e-12;
        CHECK((std::abs(p - fe.value) < 1e-12) == tie);
      }
}

TEST_CASE("ess-sup entropy and the affine gap") {
  const auto e = mt_entropy(B(0.7));
  CHECK(e.gap == 0.0);
  CHECK(e.E == e.h);

  const auto r = mt_entropy(mix(0.5, B(0.5), B(0.9)));
  CHECK(r.E == doctest::Approx(kLog2).epsilon(1e-15));
  CHECK(r.h == doctest::Approx(0.5 * (kLog2 + oracle::H(0.9))).epsilon(1e-15));
  CHECK(r.gap == doctest::Approx(0.5 * (kLog2 - oracle::H(0.9))).epsilon(1e-15));
  CHECK(r.gap > 0.0);

  // distinct components with equal entropy leave no gap
  const auto tie = mt_entropy(mix(0.4, B(0.9), B(0.1)));
  CHECK(tie.gap == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ess-sup consistency on samples") {
  const auto s = Subshift::full(2);
  const auto zero = Potential::constant(s, 0.0);

  SUBCASE("single component") {
    const auto rep = esssup_consistency_check(s, B(0.7), zero, {10000, 0, seeds(1, 10)});
    REQUIRE(rep.clusters.size() == 1);
    CHECK(oracle::near(rep.sample_max, oracle::H(0.7), 0.03));
    CHECK(rep.oracle == doctest::Approx(oracle::H(0.7)));
  }

  SUBCASE("components with equal free energy give coinciding clusters") {
    const auto rep = esssup_consistency_check(s, mix(0.5, B(0.9), B(0.1)), zero, {10000, 0, seeds(1, 10)});
    REQUIRE(rep.clusters.size() == 2);
    CHECK(oracle::near(rep.clusters[0].mean, rep.clusters[1].mean, 0.02));
  }

  SUBCASE("two components") {
    const auto rep = esssup_consistency_check(s, mix(0.5, B(0.5), B(0.9)), zero, {10000, 0, seeds(1, 20)});
    for (const auto &c : rep.clusters) CHECK(c.max_deviation <= 0.05);
    CHECK(oracle::near(rep.sample_max, kLog2, 0.03));
    CHECK(rep.oracle == doctest::Approx(kLog2));
  }
}
