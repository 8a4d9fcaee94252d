#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <thread>

#include "thermo/builtins.hpp"
#include "thermo/errors.hpp"
#include "thermo/experiment.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Finite-scale thermodynamic formalism on subshifts of finite type"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::string out_dir;
  app.add_option("--threads", threads, "Worker threads (THERMO_THREADS overrides)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");

  auto *run = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  run->add_option("config", config_path, "JSON config file")->required();

  app.add_subcommand("list-builtins", "Print built-in systems, measures and models with oracle values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (app.got_subcommand("list-builtins")) {
    std::cout << thermo::builtins::catalog();
    return 0;
  }

  if (auto env = thermo::threads_from_env()) threads = *env;
  if (threads <= 0) threads = 1;

  thermo::ExperimentConfig cfg;
  try {
    cfg = thermo::load_config(config_path);
  } catch (const std::invalid_argument &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (out_dir.empty()) out_dir = cfg.output_dir.empty() ? "thermo-out" : cfg.output_dir;

  const auto start = std::chrono::steady_clock::now();
  thermo::ResultTable table;
  try {
    table = thermo::run_experiment(cfg, threads);
  } catch (const thermo::NumericalError &e) {
    table.partial = true;
    table.failure = e.what();
    table.failure_code = 3;
  } catch (const std::invalid_argument &e) {
    table.partial = true;
    table.failure = e.what();
    table.failure_code = 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    thermo::write_outputs(out_dir, cfg, table, wall, threads);
  } catch (const std::exception &e) {
    std::cerr << "cannot write outputs: " << e.what() << "\n";
    return 3;
  }
  const int rc = thermo::exit_code(table);
  if (!table.failure.empty()) std::cerr << "error: " << table.failure << "\n";
  if (table.unexpected_nonfinite) std::cerr << "error: non-finite values in results\n";
  std::cout << table.rows.size() << " rows written to " << out_dir << "\n";
  return rc;
}
