#include "thermo/builtins.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "thermo/measure_pressure.hpp"
#include "thermo/pressure.hpp"

namespace thermo::builtins {

std::optional<Subshift> system(const std::string &name) {
  if (name == "full-2") return Subshift::full(2);
  if (name == "full-3") return Subshift::full(3);
  if (name == "golden-mean") return Subshift::golden_mean();
  if (name == "two-sided-full-2") return Subshift::full(2, Sidedness::two_sided);
  if (name == "two-sided-full-3") return Subshift::full(3, Sidedness::two_sided);
  return std::nullopt;
}

std::vector<std::string> system_names() {
  return {"full-2", "full-3", "golden-mean", "two-sided-full-2", "two-sided-full-3"};
}

std::optional<MeasureSpec> measure(const std::string &name, int k) {
  auto b2 = [k](double p) -> std::optional<MeasureSpec> {
    if (k != 2) return std::nullopt;
    return MeasureSpec::bernoulli2(p);
  };
  if (name == "B(1/2)") return b2(0.5);
  if (name == "B(0.7)") return b2(0.7);
  if (name == "B(0.9)") return b2(0.9);
  if (name == "B(1)") return b2(1.0);
  if (name == "mix-A" && k == 2) return MeasureSpec::mixture(Eigen::Vector2d(0.5, 0.5), {*b2(0.5), *b2(0.9)});
  if (name == "mix-B" && k == 2) return MeasureSpec::mixture(Eigen::Vector2d(0.3, 0.7), {*b2(0.7), *b2(0.9)});
  if (name == "golden-markov" && k == 2) {
    Eigen::Matrix2d P;
    P << 0.5, 0.5, 1.0, 0.0;
    return MeasureSpec::markov(P, Eigen::VectorXd(Eigen::Vector2d(2.0 / 3.0, 1.0 / 3.0)));
  }
  const double log_lambda = std::log(HyperbolicModel::cat_expansion());
  if (name == "cat-max" && k == 3) return bernoulli_with_entropy(3, log_lambda);
  if (name == "cat-half" && k == 3) return bernoulli_with_entropy(3, 0.5 * log_lambda);
  if (name == "cat-mix" && k == 3)
    return MeasureSpec::mixture(Eigen::Vector2d(0.5, 0.5),
                                {bernoulli_with_entropy(3, log_lambda), bernoulli_with_entropy(3, 0.5 * log_lambda)});
  if (name == "uniform") return MeasureSpec::bernoulli(Eigen::VectorXd::Constant(k, 1.0 / k));
  return std::nullopt;
}

std::vector<std::string> measure_names() {
  return {"B(1/2)", "B(0.7)", "B(0.9)", "B(1)", "mix-A", "mix-B", "golden-markov", "cat-max", "cat-half", "cat-mix",
          "uniform"};
}

std::optional<RepellerModel> repeller(const std::string &name) {
  if (name == "middle-third") return RepellerModel::middle_third();
  if (name == "ratios-1/2-1/4") return RepellerModel::ratios_half_quarter();
  return std::nullopt;
}

std::optional<HyperbolicModel> hyperbolic(const std::string &name) {
  if (name == "cat-surrogate") return HyperbolicModel::cat_surrogate();
  return std::nullopt;
}

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string catalog() {
  std::ostringstream os;
  os << "systems\n";
  for (const auto &name : system_names()) {
    const auto s = *system(name);
    os << "  " << name << "  alphabet=" << s.alphabet_size()
       << "  sided=" << (s.sided() == Sidedness::one_sided ? "one" : "two")
       << "  topological_entropy=" << num(pressure_oracle(Potential::constant(s, 0.0)))
       << "  pressure(phi=0)=" << num(pressure_oracle(Potential::constant(s, 0.0))) << "\n";
  }
  os << "measures\n";
  for (const auto &name : measure_names()) {
    for (int k : {2, 3}) {
      const auto mu = measure(name, k);
      if (!mu) continue;
      const auto e = mt_entropy(*mu);
      os << "  " << name << "  alphabet=" << k << "  " << mu->describe() << "  h=" << num(e.h) << "  E=" << num(e.E)
         << "\n";
      break;
    }
  }
  os << "repeller models\n";
  for (const auto *name : {"middle-third", "ratios-1/2-1/4"}) {
    const auto model = *repeller(name);
    os << "  " << name << "  dim[B(1/2)]=" << num(hausdorff_dim_oracle(*measure("B(1/2)", 2), model).value)
       << "  dim[B(0.9)]=" << num(hausdorff_dim_oracle(*measure("B(0.9)", 2), model).value) << "\n";
  }
  os << "hyperbolic models\n";
  {
    const auto model = HyperbolicModel::cat_surrogate();
    os << "  cat-surrogate  lambda=" << num(HyperbolicModel::cat_expansion())
       << "  dim[cat-max]=" << num(hyperbolic_dim_oracle(*measure("cat-max", 3), model))
       << "  dim[cat-half]=" << num(hyperbolic_dim_oracle(*measure("cat-half", 3), model))
       << "  dim[cat-mix]=" << num(hyperbolic_dim_oracle(*measure("cat-mix", 3), model)) << "\n";
  }
  return os.str();
}

}  // namespace thermo::builtins
