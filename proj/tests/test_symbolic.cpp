#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "thermo/symbolic.hpp"

using namespace thermo;

namespace {

Word W(const char *s) { return Word::parse(s); }

std::vector<Subshift> builtin_systems() {
  return {Subshift::full(2), Subshift::full(3), Subshift::golden_mean(), Subshift::full(2, Sidedness::two_sided)};
}

}  // namespace

TEST_CASE("subshift construction rejects bad transition matrices") {
  Eigen::MatrixXi reducible(2, 2);
  reducible << 1, 1, 0, 1;
  CHECK_THROWS_AS(Subshift{reducible}, ValidationError);

  Eigen::MatrixXi not_binary(2, 2);
  not_binary << 1, 2, 1, 1;
  CHECK_THROWS_AS(Subshift{not_binary}, ValidationError);

  Eigen::MatrixXi empty_row(2, 2);
  empty_row << 1, 1, 0, 0;
  CHECK_THROWS_AS(Subshift{empty_row}, ValidationError);

  CHECK_THROWS_AS(Subshift::full(1), ValidationError);
  CHECK_THROWS_AS(Subshift::full(11), ValidationError);
  CHECK_NOTHROW(Subshift::full(10));
}

TEST_CASE("admissible words") {
  CHECK(word_count(Subshift::full(2), 3) == 8);
  CHECK(word_count(Subshift::golden_mean(), 4) == 8);

  const auto words = enumerate_words(Subshift::full(3), 1);
  REQUIRE(words.size() == 3);
  CHECK(words[0] == W("0"));
  CHECK(words[1] == W("1"));
  CHECK(words[2] == W("2"));

  const auto gm = Subshift::golden_mean();
  CHECK(gm.admissible(W("0100").view()));
  CHECK_FALSE(gm.admissible(W("0110").view()));
}

TEST_CASE("word counts equal 1^T A^(n-1) 1 for n <= 20") {
  for (const auto &s : builtin_systems()) {
    using M = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
    const M a = s.transition().cast<long long>();
    M power = M::Identity(a.rows(), a.cols());
    for (int n = 1; n <= 20; ++n) {
      CHECK(word_count(s, n) == static_cast<std::uint64_t>(power.sum()));
      power = power * a;
    }
  }
}

TEST_CASE("enumeration is lexicographic and complete") {
  const auto gm = Subshift::golden_mean();
  const auto words = enumerate_words(gm, 6);
  CHECK(words.size() == word_count(gm, 6));
  CHECK(std::is_sorted(words.begin(), words.end()));
  for (const auto &w : words) CHECK(gm.admissible(w.view()));
}

TEST_CASE("birkhoff sums") {
  const auto full2 = Subshift::full(2);
  const double c = 0.37;
  const auto constant = Potential::constant(full2, c);
  CHECK(birkhoff_sum(constant, W("0110101")) == doctest::Approx(7 * c));

  const double a = 0.3, b = -1.1;
  const Potential phi(full2, 1, {a, b});
  CHECK(birkhoff_sum(phi, W("0110")) == doctest::Approx(2 * a + 2 * b));

  // golden mean depth-2 words in lexicographic order: 00, 01, 10
  const auto gm = Subshift::golden_mean();
  const Potential psi(gm, 2, {0.5, 1.25, -0.75});
  CHECK(birkhoff_sum(psi, W("0101")) == doctest::Approx(1.25 - 0.75 + 1.25));
  CHECK_THROWS_AS(psi(W("11").view()), ValidationError);
}

TEST_CASE("potential tables by word") {
  const auto gm = Subshift::golden_mean();
  const auto psi = Potential::from_words(gm, 2, {{"00", 0.5}, {"01", 1.25}, {"10", -0.75}});
  CHECK(psi(W("01").view()) == 1.25);
  CHECK(psi.min_value() == -0.75);
  CHECK(psi.max_value() == 1.25);
  CHECK_THROWS_AS(Potential::from_words(gm, 2, {{"00", 0.5}, {"01", 1.25}}), ValidationError);
  CHECK_THROWS_AS(Potential::from_words(gm, 2, {{"00", 0.5}, {"01", 1.25}, {"10", 1.0}, {"11", 0.0}}),
                  ValidationError);

  const auto lifted = psi.lifted(4);
  for (const auto &w : enumerate_words(gm, 9)) CHECK(birkhoff_sum_n(lifted, w.view(), 6) == doctest::Approx(birkhoff_sum_n(psi, w.view(), 6)));
}

TEST_CASE("birkhoff average stays within [min phi, max phi]") {
  const auto s = Subshift::full(3);
  const Potential phi(s, 2, {0.1, -0.4, 0.9, 0.0, 0.3, -0.2, 0.7, 0.5, -0.6});
  for (int n = 1; n <= 7; ++n) {
    for (const auto &w : enumerate_words(s, n + 1)) {
      const double avg = birkhoff_sum_n(phi, w.view(), n) / n;
      CHECK(avg >= phi.min_value() - 1e-12);
      CHECK(avg <= phi.max_value() + 1e-12);
    }
  }
}

TEST_CASE("sup and inf of the birkhoff sum over a cylinder") {
  const auto gm = Subshift::golden_mean();
  const Potential psi(gm, 2, {0.5, 1.25, -0.75});
  // n = 3 windows need 4 symbols; prefix 01 forces 010, then 0100 or 0101.
  const double via_00 = 1.25 - 0.75 + 0.5;
  const double via_01 = 1.25 - 0.75 + 1.25;
  CHECK(sup_birkhoff_over_cylinder(psi, W("01").view(), 3) == doctest::Approx(std::max(via_00, via_01)));

  CHECK(inf_birkhoff_over_cylinder(psi, W("01").view(), 3) == doctest::Approx(std::min(via_00, via_01)));

  double sup = -INFINITY, inf = INFINITY;
  for (const auto &w : enumerate_words(gm, 7))
    if (w[0] == 1) {
      sup = std::max(sup, birkhoff_sum_n(psi, w.view(), 6));
      inf = std::min(inf, birkhoff_sum_n(psi, w.view(), 6));
    }
  CHECK(sup_birkhoff_over_cylinder(psi, W("1").view(), 6) == doctest::Approx(sup));
  CHECK(inf_birkhoff_over_cylinder(psi, W("1").view(), 6) == doctest::Approx(inf));
}

TEST_CASE("ball depth on the dyadic grid") {
  CHECK(ball_depth(1.0) == 0);
  CHECK(ball_depth(0.3) == 1);
  CHECK(ball_depth(std::ldexp(1.0, -5)) == 5);
  CHECK(ball_depth(0.5) == 1);
  CHECK(ball_depth(0.51) == 0);
  CHECK_THROWS_AS(ball_depth(0.0), ValidationError);
  CHECK_THROWS_AS(ball_depth(1.5), ValidationError);
}

TEST_CASE("hamming distance") {
  CHECK(hamming_distance(W("0110"), W("0110")) == 0);
  CHECK(hamming_distance(W("0101"), W("1010")) == 4);
  CHECK(hamming_distance(W("0011"), W("0010")) == 1);
  CHECK_THROWS_AS(hamming_distance(W("01"), W("010")), ValidationError);
}

TEST_CASE("block distance counts disagreeing windows") {
  // windows of length m + 1 = 2 at j = 0..2
  CHECK(block_distance(W("0000").view(), W("0001").view(), 3, 1) == 1);
  CHECK(block_distance(W("0000").view(), W("0100").view(), 3, 1) == 2);
  CHECK(block_distance(W("0000").view(), W("0100").view(), 3, 0) == 1);
}

TEST_CASE("hamming ball counts") {
  CHECK(hamming_ball_count(2, 7, 0.0) == 1);
  CHECK(hamming_ball_count(2, 4, 0.5) == 11);
  CHECK(hamming_ball_count(2, 10, 0.3) == 176);
  CHECK(hamming_ball_bound(2, 10, 0.3) == doctest::Approx(std::exp2(10 * oracle::eta(0.3))));
  CHECK(176 <= hamming_ball_bound(2, 10, 0.3));

  for (int k = 2; k <= 4; ++k)
    for (int n = 1; n <= 12; ++n)
      for (int r = 0; r * k <= n * (k - 1); ++r) {
        const double delta = static_cast<double>(r) / n;
        CHECK(hamming_ball_count(k, n, delta) == oracle::hamming_ball(k, n, r));
      }
}

TEST_CASE("hamming ball bound holds on the delta grid") {
  int violations = 0;
  for (int k = 2; k <= 4; ++k)
    for (int i = 1; 0.05 * i <= (k - 1.0) / k + 1e-12; ++i) {
      const double delta = 0.05 * i;
      if (delta >= 1.0) break;
      for (int n = 1; n <= 12; ++n) {
        const int r = static_cast<int>(std::floor(delta * n + 1e-9));
        const double bound = std::exp2(n * oracle::eta(delta)) * std::pow(k - 1, r);
        if (oracle::hamming_ball(k, n, r) > bound) ++violations;
        if (static_cast<double>(hamming_ball_count(k, n, delta)) > hamming_ball_bound(k, n, delta)) ++violations;
      }
    }
  CHECK(violations == 0);
}

TEST_CASE("separation rules") {
  CHECK(SeparationRule::hamming(10, 0, 0.1).threshold() == 1);
  CHECK(SeparationRule::hamming(10, 0, 0.3).threshold() == 3);
  CHECK(SeparationRule::hamming(18, 0, 0.1).threshold() == 2);
  CHECK(SeparationRule::n_eps(18, 3).threshold() == 1);
}

TEST_CASE("greedy separated extraction") {
  const auto rule = SeparationRule::hamming(4, 0, 0.5);
  CHECK(extract_separated({W("0110")}, rule) == std::vector<Word>{W("0110")});

  const auto all4 = enumerate_words(Subshift::full(2), 4);
  const auto greedy = extract_separated(all4, rule);
  const std::vector<Word> expected = {W("0000"), W("0011"), W("0101"), W("0110"),
                                      W("1001"), W("1010"), W("1100"), W("1111")};
  CHECK(greedy == expected);

  const std::function<bool(const Word &, const Word &)> sep = [&](const Word &a, const Word &b) {
    return hamming_distance(a, b) >= 2;
  };
  CHECK(oracle::max_separated(all4, sep) == 8);

  const auto gm6 = enumerate_words(Subshift::golden_mean(), 6);
  CHECK(extract_separated(gm6, SeparationRule::n_eps(6, 0)).size() == gm6.size());
}

TEST_CASE("extracted sets are separated and maximal") {
  struct Case {
    Subshift s;
    int n, m;
    double delta;
  };
  const std::vector<Case> cases = {{Subshift::full(2), 8, 0, 0.2}, {Subshift::full(2), 6, 2, 0.4},
                                   {Subshift::golden_mean(), 9, 1, 0.3}, {Subshift::full(3), 5, 0, 0.25},
                                   {Subshift::full(2), 7, 1, 0.0}};
  for (const auto &c : cases) {
    const auto rule = c.delta > 0 ? SeparationRule::hamming(c.n, c.m, c.delta) : SeparationRule::n_eps(c.n, c.m);
    auto words = enumerate_words(c.s, c.n + c.m);
    // a thinned input exercises non-trivial maximality
    std::vector<Word> input;
    for (std::size_t i = 0; i < words.size(); i += 1 + i % 3) input.push_back(words[i]);
    const auto kept = extract_separated(input, rule);
    std::set<Word> in_kept(kept.begin(), kept.end());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) CHECK(rule.separated(kept[i].view(), kept[j].view()));
    for (const auto &w : input) {
      if (in_kept.count(w)) continue;
      bool blocked = false;
      for (const auto &k : kept) blocked |= !rule.separated(w.view(), k.view());
      CHECK(blocked);
    }
  }
}
