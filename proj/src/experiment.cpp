#include "thermo/experiment.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "thermo/builtins.hpp"
#include "thermo/measure_pressure.hpp"
#include "thermo/pressure.hpp"
#include "thermo/version.hpp"

namespace thermo {

using nlohmann::json;

namespace {

constexpr int kMaxExhaustiveN = 24;
constexpr long kMaxOrbitLength = 1000000;

const std::vector<std::string> kTasks = {"pressure", "sp",        "cp",         "entropy",
                                         "pointwise", "dimension", "hyperbolic", "lemma-check"};

// ---------------------------------------------------------------------------
// JSON helpers

template <typename T>
T get_as(const json &j, const std::string &key) {
  try {
    return j.get<T>();
  } catch (const json::exception &) {
    throw ConfigError(key, "has the wrong type");
  }
}

std::vector<int> int_list(const json &doc, const std::string &key, const std::string &path) {
  if (!doc.contains(key)) return {};
  const auto &j = doc.at(key);
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array()) throw ConfigError(path, "must be an integer or a list of integers");
  std::vector<int> out;
  for (const auto &e : j) {
    if (!e.is_number_integer()) throw ConfigError(path, "must contain integers only");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<double> real_list(const json &doc, const std::string &key, const std::string &path) {
  if (!doc.contains(key)) return {};
  const auto &j = doc.at(key);
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(path, "must be a number or a list of numbers");
  std::vector<double> out;
  for (const auto &e : j) {
    if (!e.is_number()) throw ConfigError(path, "must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

void check_range(const std::vector<int> &v, int lo, int hi, const std::string &key) {
  for (int x : v)
    if (x < lo || x > hi) throw ConfigError(key, "values must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Eigen::VectorXd vector_of(const json &j, const std::string &key) {
  const auto v = get_as<std::vector<double>>(j, key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_of(const json &j, const std::string &key) {
  const auto rows = get_as<std::vector<std::vector<double>>>(j, key);
  if (rows.empty()) throw ConfigError(key, "must be a non-empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ConfigError(key, "rows must have equal length");
    for (std::size_t j2 = 0; j2 < rows[i].size(); ++j2) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)) = rows[i][j2];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Component parsers

std::pair<std::string, Subshift> parse_system(const json &j, const std::string &key) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (auto s = builtins::system(name)) return {name, *s};
    throw ConfigError(key, "unknown built-in system '" + name + "'");
  }
  if (!j.is_object() || !j.contains("transition")) throw ConfigError(key, "must be a built-in name or an object with 'transition'");
  const auto t = get_as<std::vector<std::vector<int>>>(j.at("transition"), key + ".transition");
  Eigen::MatrixXi a(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].size() != t.size()) throw ConfigError(key + ".transition", "must be square");
    for (std::size_t c = 0; c < t.size(); ++c) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = t[i][c];
  }
  Sidedness sided = Sidedness::one_sided;
  if (j.contains("sided")) {
    const auto s = get_as<std::string>(j.at("sided"), key + ".sided");
    if (s == "two_sided") sided = Sidedness::two_sided;
    else if (s != "one_sided") throw ConfigError(key + ".sided", "must be 'one_sided' or 'two_sided'");
  }
  try {
    return {j.value("name", std::string("custom")), Subshift(a, sided)};
  } catch (const ValidationError &e) {
    throw ConfigError(key, e.what());
  }
}

NamedPotential parse_potential(const json &j, const Subshift &s, const std::string &key, std::size_t index) {
  const std::string fallback = "phi" + std::to_string(index);
  try {
    if (j.is_number()) return {"const(" + format_number(j.get<double>()) + ")", Potential::constant(s, j.get<double>())};
    if (!j.is_object()) throw ConfigError(key, "must be a number or an object");
    const auto name = j.value("name", fallback);
    if (j.contains("constant")) return {name, Potential::constant(s, get_as<double>(j.at("constant"), key + ".constant"))};
    if (!j.contains("depth") || !j.contains("values")) throw ConfigError(key, "needs 'constant' or both 'depth' and 'values'");
    const int depth = get_as<int>(j.at("depth"), key + ".depth");
    if (depth < 1 || depth > 8) throw ConfigError(key + ".depth", "must lie in [1, 8]");
    const auto &v = j.at("values");
    if (v.is_array()) return {name, Potential(s, depth, get_as<std::vector<double>>(v, key + ".values"))};
    if (v.is_object()) {
      std::vector<std::pair<std::string, double>> table;
      for (const auto &[word, value] : v.items()) table.emplace_back(word, get_as<double>(value, key + ".values." + word));
      return {name, Potential::from_words(s, depth, table)};
    }
    throw ConfigError(key + ".values", "must be a list or an object keyed by words");
  } catch (const ValidationError &e) {
    throw ConfigError(key, e.what());
  }
}

MeasureSpec parse_measure_body(const json &j, int k, const std::string &key) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (auto m = builtins::measure(name, k)) return *m;
    throw ConfigError(key, "unknown built-in measure '" + name + "' for alphabet size " + std::to_string(k));
  }
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(key, "must be a built-in name or an object with 'kind'");
  const auto kind = get_as<std::string>(j.at("kind"), key + ".kind");
  if (kind == "bernoulli") {
    if (!j.contains("p")) throw ConfigError(key + ".p", "is required");
    if (j.at("p").is_number()) return MeasureSpec::bernoulli2(j.at("p").get<double>());
    return MeasureSpec::bernoulli(vector_of(j.at("p"), key + ".p"));
  }
  if (kind == "bernoulli_entropy") {
    return bernoulli_with_entropy(k, get_as<double>(j.at("entropy"), key + ".entropy"));
  }
  if (kind == "markov") {
    if (!j.contains("P")) throw ConfigError(key + ".P", "is required");
    std::optional<Eigen::VectorXd> pi;
    if (j.contains("pi")) pi = vector_of(j.at("pi"), key + ".pi");
    return MeasureSpec::markov(matrix_of(j.at("P"), key + ".P"), pi);
  }
  if (kind == "mixture") {
    if (!j.contains("weights") || !j.contains("components")) throw ConfigError(key, "mixture needs 'weights' and 'components'");
    std::vector<MeasureSpec> comps;
    std::size_t i = 0;
    for (const auto &c : j.at("components")) comps.push_back(parse_measure_body(c, k, key + ".components[" + std::to_string(i++) + "]"));
    return MeasureSpec::mixture(vector_of(j.at("weights"), key + ".weights"), std::move(comps));
  }
  throw ConfigError(key + ".kind", "must be bernoulli, bernoulli_entropy, markov or mixture");
}

NamedMeasure parse_measure(const json &j, const Subshift &s, const std::string &key) {
  try {
    auto mu = parse_measure_body(j, s.alphabet_size(), key);
    mu.validate_on(s);
    std::string name = j.is_string() ? j.get<std::string>() : j.value("name", mu.describe());
    return {name, std::move(mu)};
  } catch (const ValidationError &e) {
    throw ConfigError(key, e.what());
  }
}

template <typename F>
auto as_list(const json &doc, const std::string &single, const std::string &plural, F &&parse) {
  using T = decltype(parse(json{}, std::string{}, std::size_t{}));
  std::vector<T> out;
  if (doc.contains(single)) out.push_back(parse(doc.at(single), single, 0));
  if (doc.contains(plural)) {
    if (!doc.at(plural).is_array()) throw ConfigError(plural, "must be a list");
    std::size_t i = 0;
    for (const auto &e : doc.at(plural)) {
      out.push_back(parse(e, plural + "[" + std::to_string(i) + "]", i + 1));
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rows

using Row = std::vector<std::string>;

struct JobResult {
  std::vector<Row> rows;
  bool nonfinite = false;
};

using Job = std::function<JobResult()>;

std::string fmt(double x) { return format_number(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }

std::string within(double value, double oracle, double tol) {
  return std::isfinite(value) && std::abs(value - oracle) <= tol ? "1" : "0";
}

std::vector<int> default_N(int D) {
  std::vector<int> out;
  for (int N = 2; N < D; N += 2) out.push_back(N);
  out.push_back(D);
  return out;
}

std::vector<int> iota(int lo, int hi) {
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// Task builders: each returns the columns and one job per schedule point.

struct Plan {
  std::vector<std::string> columns;
  std::vector<Job> jobs;
};

Plan plan_entropy(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"measure", "n", "value", "h_mu", "E_mu", "gap", "oracle", "abs_diff", "within_tol"};
  const double tol = cfg.tolerance.value_or(1e-9);
  const auto ns = cfg.schedule.n.empty() ? std::vector<int>{2} : cfg.schedule.n;
  for (const auto &nm : cfg.measures)
    for (int n : ns)
      p.jobs.push_back([&cfg, nm, n, tol] {
        const Subshift &s = *cfg.system;
        const double value = block_entropy(s, nm.measure, n) - (n > 1 ? block_entropy(s, nm.measure, n - 1) : 0.0);
        const auto e = mt_entropy(nm.measure);
        return JobResult{{{nm.name, fmt(n), fmt(value), fmt(e.h), fmt(e.E), fmt(e.gap), fmt(e.h), fmt(std::abs(value - e.h)),
                           within(value, e.h, tol)}},
                         !std::isfinite(value)};
      });
  return p;
}

Plan plan_pressure(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"potential", "N", "D", "m", "value", "oracle", "abs_diff", "within_tol"};
  const double tol = cfg.tolerance.value_or(0.02);
  const int k = cfg.system->alphabet_size();
  const auto Ds = cfg.schedule.D.empty() ? std::vector<int>{default_depth_cap(k)} : cfg.schedule.D;
  const auto ms = cfg.schedule.m.empty() ? std::vector<int>{0} : cfg.schedule.m;
  const auto Z = cfg.Z.value_or(CylinderSet::whole_space());
  for (const auto &phi : cfg.potentials)
    for (int D : Ds)
      for (int m : ms)
        p.jobs.push_back([&cfg, phi, D, m, tol, Z] {
          const auto Ns = cfg.schedule.N.empty() ? default_N(D) : cfg.schedule.N;
          const double oracle = pressure_oracle(phi.potential);
          const auto report = jump_up_point(phi.potential, Z, Ns, m, D, 1e-6, cfg.ball_weight);
          JobResult r;
          for (const auto &t : report.trace) {
            r.rows.push_back({phi.name, fmt(*t.params.n), fmt(D), fmt(m), fmt(t.value), fmt(oracle),
                              fmt(std::abs(t.value - oracle)), within(t.value, oracle, tol)});
            r.nonfinite |= !std::isfinite(t.value);
          }
          return r;
        });
  return p;
}

Plan plan_cp(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"potential", "N", "m", "value", "lower", "upper", "oracle", "abs_diff", "within_tol"};
  const double tol = cfg.tolerance.value_or(0.02);
  const int k = cfg.system->alphabet_size();
  const int D = cfg.schedule.D.empty() ? default_depth_cap(k) : cfg.schedule.D.front();
  const auto Ns = cfg.schedule.N.empty() ? iota(1, D) : cfg.schedule.N;
  const auto ms = cfg.schedule.m.empty() ? std::vector<int>{0} : cfg.schedule.m;
  const auto Z = cfg.Z.value_or(CylinderSet::whole_space());
  for (const auto &phi : cfg.potentials)
    for (int m : ms)
      p.jobs.push_back([phi, Ns, m, tol, Z, weight = cfg.ball_weight] {
        const double oracle = pressure_oracle(phi.potential);
        const auto lu = cp_lower_upper(phi.potential, Z, m, Ns, weight);
        JobResult r;
        double lo = INFINITY, hi = -INFINITY;
        for (const auto &t : lu.trace.trace) {
          lo = std::min(lo, t.value);
          hi = std::max(hi, t.value);
          r.rows.push_back({phi.name, fmt(*t.params.n), fmt(m), fmt(t.value), fmt(lo), fmt(hi), fmt(oracle),
                            fmt(std::abs(t.value - oracle)), within(t.value, oracle, tol)});
          r.nonfinite |= !std::isfinite(t.value);
        }
        return r;
      });
  return p;
}

Plan plan_sp(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"measure", "potential", "mode", "delta", "n", "m", "theta", "L", "value", "oracle", "abs_diff",
               "within_tol", "flag"};
  const double tol = cfg.tolerance.value_or(0.08);
  const auto &sc = cfg.schedule;
  const auto ns = sc.n.empty() ? std::vector<int>{6, 10, 14, 18} : sc.n;
  const auto ms = sc.m.empty() ? std::vector<int>{0, 1, 2} : sc.m;
  const auto Ls = sc.L.empty() ? std::vector<int>{1} : sc.L;
  const auto modes = sc.modes.empty() ? std::vector<std::string>{"n_eps"} : sc.modes;
  const auto deltas = sc.delta.empty() ? std::vector<double>{0.1} : sc.delta;

  std::vector<SpSchedulePoint> points;
  if (!sc.theta.empty()) {
    for (int m : ms)
      for (std::size_t i = 0; i < ns.size(); ++i) points.push_back({ns[i], m, sc.theta[i]});
  } else {
    points = coupled_schedule(ms, ns, sc.theta_scale);
  }

  std::vector<SeparationMode> sep;
  for (const auto &mode : modes) {
    if (mode == "n_eps") sep.push_back(SeparationMode::n_eps());
    else for (double d : deltas) sep.push_back(SeparationMode::hamming(d));
  }

  for (const auto &nm : cfg.measures)
    for (const auto &phi : cfg.potentials)
      for (const auto &mode : sep)
        for (int L : Ls)
          for (const auto &pt : points)
            p.jobs.push_back([&cfg, nm, phi, mode, L, pt, tol] {
              const double oracle = free_energy(nm.measure, phi.potential).value;
              const NeighborhoodSpec F(*cfg.system, nm.measure, L, pt.theta);
              const auto r = separated_pressure(phi.potential, F, pt.n, pt.m, mode);
              const std::string delta = mode.kind == SeparationMode::Kind::hamming ? fmt(mode.delta) : "";
              return JobResult{{{nm.name, phi.name, mode.name(), delta, fmt(pt.n), fmt(pt.m), fmt(pt.theta), fmt(L),
                                 fmt(r.value), fmt(oracle), fmt(std::abs(r.value - oracle)), within(r.value, oracle, tol),
                                 r.flag}},
                               !std::isfinite(r.value)};
            });
  return p;
}

Plan plan_pointwise(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"measure", "potential", "component", "seed", "n", "m", "local_raw", "local_corrected", "birkhoff",
               "value", "oracle", "abs_diff", "within_tol"};
  const double tol = cfg.tolerance.value_or(0.05);
  const auto ns = cfg.schedule.n.empty() ? std::vector<int>{10000} : cfg.schedule.n;
  const auto ms = cfg.schedule.m.empty() ? std::vector<int>{0} : cfg.schedule.m;
  for (const auto &nm : cfg.measures)
    for (const auto &phi : cfg.potentials)
      for (int n : ns)
        for (int m : ms) {
          const auto parts = nm.measure.components();
          for (std::size_t c = 0; c < parts.size(); ++c)
            for (auto seed : cfg.seeds)
              p.jobs.push_back([&cfg, nm, phi, n, m, c, seed, tol] {
                const auto fe = free_energy(nm.measure, phi.potential);
                const auto o = sample_orbit(*cfg.system, nm.measure, static_cast<std::size_t>(n + m + phi.potential.depth()),
                                            seed, static_cast<int>(c));
                const auto pw = pointwise_pressure(nm.measure, phi.potential, o, n, m);
                const double oracle = fe.components[c];
                return JobResult{{{nm.name, phi.name, fmt(static_cast<int>(c)), fmt(seed), fmt(n), fmt(m),
                                   fmt(pw.local.raw), fmt(pw.local.corrected), fmt(pw.birkhoff), fmt(pw.value),
                                   fmt(oracle), fmt(std::abs(pw.value - oracle)), within(pw.value, oracle, tol)}},
                                 !std::isfinite(pw.value)};
              });
          // Ess-sup summary over the whole sample set: max vs mt_pressure.
          p.jobs.push_back([&cfg, nm, phi, n, m, tol] {
            EssSupPlan plan{n, m, cfg.seeds};
            const auto rep = esssup_consistency_check(*cfg.system, nm.measure, phi.potential, plan);
            return JobResult{{{nm.name, phi.name, "max", "", fmt(n), fmt(m), "", "", "", fmt(rep.sample_max),
                               fmt(rep.oracle), fmt(std::abs(rep.sample_max - rep.oracle)),
                               within(rep.sample_max, rep.oracle, tol)}},
                             !std::isfinite(rep.sample_max)};
          });
        }
  return p;
}

Plan plan_dimension(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"model", "measure", "method", "component", "seed", "depth", "value", "lower", "upper", "oracle",
               "abs_diff", "within_tol"};
  const double bowen_tol = cfg.tolerance.value_or(1e-8);
  const double pw_tol = cfg.tolerance.value_or(0.02);
  const auto depths = cfg.schedule.r_depths;
  for (const auto &model : cfg.models)
    for (const auto &nm : cfg.measures) {
      p.jobs.push_back([model, nm, bowen_tol] {
        const auto root = bowen_root(nm.measure, model.model);
        const auto oracle = hausdorff_dim_oracle(nm.measure, model.model);
        return JobResult{{{model.name, nm.name, "bowen_root", "", "", "", fmt(root.value), "", "", fmt(oracle.value),
                           fmt(std::abs(root.value - oracle.value)), within(root.value, oracle.value, bowen_tol)}},
                         !std::isfinite(root.value)};
      });
      if (depths.empty()) continue;
      const auto parts = nm.measure.components();
      for (std::size_t c = 0; c < parts.size(); ++c)
        for (auto seed : cfg.seeds)
          p.jobs.push_back([model, nm, c, seed, depths, pw_tol] {
            const auto &geom = model.model.geometry();
            const auto &nu = nm.measure.component(c);
            const double lambda = integrate(nu, geom);
            std::vector<double> radii;
            for (int d : depths) radii.push_back(std::exp(-d * lambda));
            // Long enough to resolve the smallest radius with margin.
            const auto len = static_cast<std::size_t>(
                std::ceil(*std::max_element(depths.begin(), depths.end()) * lambda / geom.min_value()) + geom.depth() + 2);
            const auto o = sample_orbit(model.model.base(), nm.measure, len, seed, static_cast<int>(c));
            const auto rep = pointwise_dim_estimate(nm.measure, model.model, o, radii);
            JobResult r;
            for (std::size_t i = 0; i < rep.trace.size(); ++i) {
              const auto &pt = rep.trace[i];
              r.rows.push_back({model.name, nm.name, "pointwise", fmt(static_cast<int>(c)), fmt(seed), fmt(depths[i]),
                                fmt(pt.value), fmt(pt.lower), fmt(pt.upper), fmt(rep.target),
                                fmt(std::abs(pt.value - rep.target)), within(pt.value, rep.target, pw_tol)});
              r.nonfinite |= !std::isfinite(pt.value) || rep.zero_mass;
            }
            return r;
          });
    }
  return p;
}

Plan plan_hyperbolic(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"model", "measure", "t_s", "t_u", "value", "oracle", "abs_diff", "within_tol"};
  const double tol = cfg.tolerance.value_or(1e-8);
  for (const auto &nm : cfg.measures)
    p.jobs.push_back([&cfg, nm, tol] {
      const auto &model = *cfg.hyperbolic;
      const auto res = hyperbolic_roots(nm.measure, model);
      const double oracle = hyperbolic_dim_oracle(nm.measure, model);
      return JobResult{{{model.name().empty() ? "custom" : model.name(), nm.name, fmt(res.roots[0].root),
                         fmt(res.roots[1].root), fmt(res.value), fmt(oracle), fmt(std::abs(res.value - oracle)),
                         within(res.value, oracle, tol)}},
                       !std::isfinite(res.value)};
    });
  return p;
}

Plan plan_lemma(const ExperimentConfig &cfg) {
  Plan p;
  p.columns = {"k", "n", "delta", "exact", "bound", "ok"};
  const auto ks = cfg.schedule.k.empty() ? std::vector<int>{2, 3, 4} : cfg.schedule.k;
  const auto ns = cfg.schedule.n.empty() ? iota(1, 12) : cfg.schedule.n;
  const double step = cfg.schedule.delta.empty() ? 0.05 : cfg.schedule.delta.front();
  for (int k : ks)
    p.jobs.push_back([k, ns, step] {
      JobResult r;
      const double top = static_cast<double>(k - 1) / k;
      for (int i = 1;; ++i) {
        const double delta = std::round(i * step * 1e12) / 1e12;
        if (delta > top + 1e-12) break;
        for (int n : ns) {
          const auto exact = hamming_ball_count(k, n, delta);
          const double bound = hamming_ball_bound(k, n, delta);
          r.rows.push_back({fmt(k), fmt(n), fmt(delta), fmt(exact), fmt(bound),
                            static_cast<double>(exact) <= bound ? "1" : "0"});
        }
      }
      return r;
    });
  return p;
}

Plan make_plan(const ExperimentConfig &cfg) {
  if (cfg.task == "entropy") return plan_entropy(cfg);
  if (cfg.task == "pressure") return plan_pressure(cfg);
  if (cfg.task == "cp") return plan_cp(cfg);
  if (cfg.task == "sp") return plan_sp(cfg);
  if (cfg.task == "pointwise") return plan_pointwise(cfg);
  if (cfg.task == "dimension") return plan_dimension(cfg);
  if (cfg.task == "hyperbolic") return plan_hyperbolic(cfg);
  return plan_lemma(cfg);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::optional<int> threads_from_env() {
  const char *v = std::getenv("THERMO_THREADS");
  if (!v || !*v) return std::nullopt;
  try {
    const int n = std::stoi(v);
    if (n >= 1) return n;
  } catch (const std::exception &) {
  }
  return std::nullopt;
}

ExperimentConfig parse_config(const json &doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  ExperimentConfig cfg;
  cfg.echo = doc;
  if (!doc.contains("task")) throw ConfigError("task", "is required");
  cfg.task = get_as<std::string>(doc.at("task"), "task");
  if (std::find(kTasks.begin(), kTasks.end(), cfg.task) == kTasks.end())
    throw ConfigError("task", "must be one of pressure, sp, cp, entropy, pointwise, dimension, hyperbolic, lemma-check");

  // Schedule.
  const json sched = doc.value("schedule", json::object());
  if (!sched.is_object()) throw ConfigError("schedule", "must be an object");
  auto &sc = cfg.schedule;
  sc.n = int_list(sched, "n", "schedule.n");
  sc.m = int_list(sched, "m", "schedule.m");
  sc.delta = real_list(sched, "delta", "schedule.delta");
  sc.theta = real_list(sched, "theta", "schedule.theta");
  if (sched.contains("theta_scale")) sc.theta_scale = get_as<double>(sched.at("theta_scale"), "schedule.theta_scale");
  sc.L = int_list(sched, "L", "schedule.L");
  sc.D = int_list(sched, "D", "schedule.D");
  sc.N = int_list(sched, "N", "schedule.N");
  sc.k = int_list(sched, "k", "schedule.k");
  sc.r_depths = int_list(sched, "r_depths", "schedule.r_depths");
  if (sched.contains("modes")) sc.modes = get_as<std::vector<std::string>>(sched.at("modes"), "schedule.modes");
  for (const auto &mode : sc.modes)
    if (mode != "n_eps" && mode != "hamming") throw ConfigError("schedule.modes", "entries must be 'n_eps' or 'hamming'");
  check_range(sc.m, 0, 8, "schedule.m");
  check_range(sc.L, 1, 8, "schedule.L");
  check_range(sc.D, 1, kMaxExhaustiveN, "schedule.D");
  check_range(sc.N, 1, kMaxExhaustiveN, "schedule.N");
  check_range(sc.k, 2, 10, "schedule.k");
  check_range(sc.r_depths, 1, 200, "schedule.r_depths");
  const bool sampling = cfg.task == "pointwise";
  check_range(sc.n, 1, sampling ? static_cast<int>(kMaxOrbitLength) : kMaxExhaustiveN, "schedule.n");
  for (double d : sc.delta)
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("schedule.delta", "values must lie in (0, 1)");
  for (double t : sc.theta)
    if (!(t > 0.0 && t <= 2.0)) throw ConfigError("schedule.theta", "values must lie in (0, 2]");
  if (!sc.theta.empty() && sc.theta.size() != (sc.n.empty() ? 4u : sc.n.size()))
    throw ConfigError("schedule.theta", "needs one value per entry of schedule.n");
  if (!(sc.theta_scale > 0.0)) throw ConfigError("schedule.theta_scale", "must be positive");
  if (!sc.N.empty() && !std::is_sorted(sc.N.begin(), sc.N.end())) throw ConfigError("schedule.N", "must be increasing");
  for (int D : sc.D)
    for (int N : sc.N)
      if (N > D) throw ConfigError("schedule.N", "values must not exceed schedule.D");

  if (doc.contains("seeds")) {
    const auto &s = doc.at("seeds");
    if (!s.is_array()) throw ConfigError("seeds", "must be a list of non-negative integers");
    for (const auto &e : s) {
      if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0))
        throw ConfigError("seeds", "must be a list of non-negative integers");
      cfg.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  if (cfg.seeds.empty() && (cfg.task == "pointwise" || (cfg.task == "dimension" && !sc.r_depths.empty())))
    for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);

  if (doc.contains("tolerance")) {
    cfg.tolerance = get_as<double>(doc.at("tolerance"), "tolerance");
    if (!(*cfg.tolerance >= 0.0)) throw ConfigError("tolerance", "must be >= 0");
  }
  cfg.allow_nonfinite = doc.value("allow_nonfinite", false);
  if (doc.contains("ball_weight")) {
    const auto w = get_as<std::string>(doc.at("ball_weight"), "ball_weight");
    if (w == "sup") cfg.ball_weight = BallWeight::sup;
    else if (w != "inf") throw ConfigError("ball_weight", "must be 'inf' or 'sup'");
  }

  if (doc.contains("output")) {
    const auto &o = doc.at("output");
    if (!o.is_object()) throw ConfigError("output", "must be an object with 'dir' and 'format'");
    cfg.output_dir = o.value("dir", std::string{});
    cfg.output_format = o.value("format", std::string("csv"));
    if (cfg.output_format != "csv") throw ConfigError("output.format", "only 'csv' is supported");
  }

  if (cfg.task == "lemma-check") return cfg;

  // System; the hyperbolic task defaults to the cat surrogate's base.
  std::string default_system = cfg.task == "hyperbolic" ? "two-sided-full-3" : "full-2";
  if (cfg.task == "dimension") default_system = "full-2";
  std::tie(cfg.system_name, cfg.system) = parse_system(doc.value("system", json(default_system)), "system");

  // Potentials default to phi = 0.
  const Subshift &s = *cfg.system;
  cfg.potentials = as_list(doc, "potential", "potentials", [&](const json &j, const std::string &key, std::size_t i) {
    return parse_potential(j, s, key, i);
  });
  if (cfg.potentials.empty()) cfg.potentials.push_back({"zero", Potential::constant(s, 0.0)});
  if (cfg.task == "sp" || cfg.task == "entropy" || cfg.task == "pressure" || cfg.task == "cp")
    for (const auto &phi : cfg.potentials)
      if (phi.potential.depth() > kMaxExhaustiveN) throw ConfigError("potentials", "depth too large");

  if (cfg.task == "sp") {
    const int L = sc.L.empty() ? 1 : *std::min_element(sc.L.begin(), sc.L.end());
    for (const auto &phi : cfg.potentials)
      if (phi.potential.depth() > L) throw ConfigError("schedule.L", "must be at least the depth of every potential");
  }

  cfg.measures = as_list(doc, "measure", "measures",
                         [&](const json &j, const std::string &key, std::size_t) { return parse_measure(j, s, key); });
  const bool needs_measure = cfg.task == "entropy" || cfg.task == "sp" || cfg.task == "pointwise" ||
                             cfg.task == "dimension" || cfg.task == "hyperbolic";
  if (needs_measure && cfg.measures.empty()) throw ConfigError("measures", "at least one measure is required for task " + cfg.task);

  if (doc.contains("Z")) {
    const auto words = get_as<std::vector<std::string>>(doc.at("Z"), "Z");
    std::vector<Word> ws;
    for (const auto &w : words) ws.push_back(Word::parse(w));
    try {
      cfg.Z = CylinderSet::of(ws);
    } catch (const ValidationError &e) {
      throw ConfigError("Z", e.what());
    }
  }

  if (cfg.task == "dimension") {
    std::vector<json> models;
    if (doc.contains("models")) {
      if (!doc.at("models").is_array()) throw ConfigError("models", "must be a list");
      for (const auto &m : doc.at("models")) models.push_back(m);
    } else if (doc.contains("model")) {
      models.push_back(doc.at("model"));
    } else {
      models.push_back("middle-third");
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
      const std::string key = "models[" + std::to_string(i) + "]";
      const auto &m = models[i];
      if (m.is_string()) {
        auto r = builtins::repeller(m.get<std::string>());
        if (!r) throw ConfigError(key, "unknown built-in model '" + m.get<std::string>() + "'");
        if (!(r->base() == s)) throw ConfigError(key, "model lives on another system than 'system'");
        cfg.models.push_back({m.get<std::string>(), *r});
        continue;
      }
      if (!m.is_object() || !m.contains("geometry")) throw ConfigError(key, "must be a built-in name or an object with 'geometry'");
      try {
        auto geom = parse_potential(m.at("geometry"), s, key + ".geometry", i);
        cfg.models.push_back({m.value("name", geom.name), RepellerModel(s, geom.potential, m.value("name", geom.name))});
      } catch (const ValidationError &e) {
        throw ConfigError(key, e.what());
      }
    }
  }

  if (cfg.task == "hyperbolic") {
    const json h = doc.value("hyperbolic", json("cat-surrogate"));
    try {
      if (h.is_string()) {
        auto model = builtins::hyperbolic(h.get<std::string>());
        if (!model) throw ConfigError("hyperbolic", "unknown built-in model '" + h.get<std::string>() + "'");
        if (!(model->base() == s)) throw ConfigError("hyperbolic", "model lives on another system than 'system'");
        cfg.hyperbolic = *model;
      } else {
        if (!h.is_object() || !h.contains("unstable") || !h.contains("stable"))
          throw ConfigError("hyperbolic", "must be a built-in name or an object with 'unstable' and 'stable'");
        cfg.hyperbolic = HyperbolicModel(s, parse_potential(h.at("unstable"), s, "hyperbolic.unstable", 0).potential,
                                         parse_potential(h.at("stable"), s, "hyperbolic.stable", 0).potential,
                                         h.value("volume_preserving", true), h.value("name", std::string("custom")));
      }
      for (const auto &nm : cfg.measures) cfg.hyperbolic->check_volume_condition(nm.measure);
    } catch (const ValidationError &e) {
      throw ConfigError("hyperbolic", e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error &e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

ResultTable run_experiment(const ExperimentConfig &cfg, int threads) {
  Plan plan = make_plan(cfg);
  ResultTable table;
  table.columns = plan.columns;

  const std::size_t count = plan.jobs.size();
  std::vector<JobResult> results(count);
  std::vector<std::string> errors(count);
  std::vector<int> codes(count, 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = plan.jobs[i]();
      } catch (const NumericalError &e) {
        errors[i] = e.what();
        codes[i] = 3;
      } catch (const ValidationError &e) {
        errors[i] = e.what();
        codes[i] = 2;
      }
    }
  };
  const int pool = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  std::vector<std::thread> workers;
  for (int t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  for (auto &w : workers) w.join();

  for (std::size_t i = 0; i < count; ++i) {
    if (codes[i] != 0) {
      table.partial = true;
      table.failure = errors[i];
      table.failure_code = codes[i];
      break;
    }
    for (auto &row : results[i].rows) table.rows.push_back(std::move(row));
    table.unexpected_nonfinite |= results[i].nonfinite && !cfg.allow_nonfinite;
  }
  return table;
}

std::string to_csv(const ResultTable &table) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto &c = cells[i];
      const bool quote = c.find_first_of(",\"\n") != std::string::npos;
      if (i) os << ',';
      if (quote) {
        os << '"';
        for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      } else {
        os << c;
      }
    }
    os << '\n';
  };
  line(table.columns);
  for (const auto &r : table.rows) line(r);
  return os.str();
}

int exit_code(const ResultTable &table) {
  if (table.failure_code != 0) return table.failure_code;
  if (table.unexpected_nonfinite) return 3;
  return 0;
}

void write_outputs(const std::filesystem::path &dir, const ExperimentConfig &cfg, const ResultTable &table,
                   double wall_seconds, int threads) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "results.csv", std::ios::binary);
    out << to_csv(table);
  }
  json manifest;
  manifest["config"] = cfg.echo;
  manifest["task"] = cfg.task;
  manifest["versions"] = {{"thermo", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  manifest["seeds"] = cfg.seeds;
  manifest["threads"] = threads;
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["rows"] = table.rows.size();
  manifest["partial"] = table.partial;
  manifest["unexpected_nonfinite"] = table.unexpected_nonfinite;
  manifest["exit_code"] = exit_code(table);
  if (!table.failure.empty()) manifest["failure"] = table.failure;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

}  // namespace thermo
