#pragma once

// Config-driven experiments: a JSON document names a system, potentials,
// measures, a task and its schedule. Each task produces a fixed-column CSV
// table (one row per schedule point) and a JSON manifest. See
// docs/config.md for the schema.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermo/dimension.hpp"
#include "thermo/measures.hpp"
#include "thermo/pressure.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

// Schema violation: names the offending key and the violated constraint.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string &key, const std::string &constraint)
      : std::invalid_argument(key + ": " + constraint), key_(key) {}
  const std::string &key() const { return key_; }

 private:
  std::string key_;
};

struct NamedPotential {
  std::string name;
  Potential potential;
};

struct NamedMeasure {
  std::string name;
  MeasureSpec measure;
};

struct NamedRepeller {
  std::string name;
  RepellerModel model;
};

struct Schedule {
  std::vector<int> n;
  std::vector<int> m;
  std::vector<double> delta;
  std::vector<double> theta;  // explicit thetas (one per n); else theta_scale / sqrt(n)
  double theta_scale = 0.2121320343559643;  // theta = 0.05 at n = 18
  std::vector<int> L;
  std::vector<int> D;
  std::vector<int> N;
  std::vector<int> k;
  std::vector<int> r_depths;  // radii 3^-d style: r = exp(-d * mean expansion)
  std::vector<std::string> modes;
};

struct ExperimentConfig {
  std::string task;
  nlohmann::json echo;
  std::optional<Subshift> system;
  std::string system_name;
  std::vector<NamedPotential> potentials;
  std::vector<NamedMeasure> measures;
  std::vector<NamedRepeller> models;
  std::optional<HyperbolicModel> hyperbolic;
  std::optional<CylinderSet> Z;
  Schedule schedule;
  std::vector<std::uint64_t> seeds;
  std::optional<double> tolerance;
  bool allow_nonfinite = false;
  BallWeight ball_weight = BallWeight::inf;
  std::string output_dir;
  std::string output_format = "csv";
};

ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::filesystem::path &path);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool unexpected_nonfinite = false;
  bool partial = false;
  std::string failure;
  int failure_code = 0;  // exit code implied by `failure`
};

// Runs every schedule point; rows come back in schedule order whatever the
// number of worker threads.
ResultTable run_experiment(const ExperimentConfig &cfg, int threads = 1);

std::string to_csv(const ResultTable &table);

// 0 success, 2 validation error, 3 numerical failure.
int exit_code(const ResultTable &table);

// Writes results.csv and manifest.json into `dir`.
void write_outputs(const std::filesystem::path &dir, const ExperimentConfig &cfg, const ResultTable &table,
                   double wall_seconds, int threads);

// Formatting used for every float in result tables: 12 significant digits.
std::string format_number(double x);

// Thread count from the THERMO_THREADS environment variable, if set.
std::optional<int> threads_from_env();

}  // namespace thermo
