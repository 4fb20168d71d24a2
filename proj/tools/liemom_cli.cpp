#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liemom/experiment.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> traj;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> methods;
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<double> total_time;
  std::optional<double> c;
  std::optional<double> b;
  std::optional<int> stride;
  std::optional<unsigned> threads;
  bool parallel = false;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--traj", o.traj, "Reference trajectory, 1 or 2");
  cmd->add_option("--samples", o.samples, "Monte-Carlo ensemble size");
  cmd->add_option("--seed", o.seed, "Base seed for the ensemble streams");
  cmd->add_option("--methods", o.methods, "Comma-separated subset of UKF-LA,EMD0,EMD2,UTD");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--dt", o.dt, "Integrator step");
  cmd->add_option("--T", o.total_time, "Final time");
  cmd->add_option("--c", o.c, "Viscosity coefficient");
  cmd->add_option("--b", o.b, "Momentum noise scale");
  cmd->add_option("--stride", o.stride, "Checkpoint stride in steps");
  cmd->add_option("--threads", o.threads, "Threads for ensemble generation");
  cmd->add_flag("--parallel-methods", o.parallel,
                "Run methods concurrently (suppresses the timing table)");
}

liemom::ExperimentConfig build_config(const Overrides& o) {
  liemom::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    if (!is) throw std::runtime_error("cannot open config file " + o.config_path);
    nlohmann::json j;
    is >> j;
    cfg = liemom::config_from_json(j);
  }
  if (o.traj) cfg.trajectory = *o.traj;
  if (o.samples) cfg.n_samples = *o.samples;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.methods) {
    cfg.methods.clear();
    std::stringstream ss(*o.methods);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) cfg.methods.push_back(liemom::method_from_string(token));
  }
  if (o.out) cfg.output_dir = *o.out;
  if (o.dt) cfg.dt = *o.dt;
  if (o.total_time) cfg.T = *o.total_time;
  if (o.c) cfg.c = *o.c;
  if (o.b) cfg.b = *o.b;
  if (o.stride) cfg.checkpoint_stride = *o.stride;
  if (o.threads) cfg.n_threads = *o.threads;
  if (o.parallel) cfg.parallel_methods = true;
  liemom::validate_config(cfg);
  return cfg;
}

void echo_config(const liemom::ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream os(std::filesystem::path(cfg.output_dir) / "config.json", std::ios::binary);
  os << liemom::config_to_json(cfg).dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot write config echo");
}

void print_summary(const liemom::ResultTable& table) {
  std::printf("%-8s %12s %12s %12s %12s\n", "method", "e_R(T)", "e_l(T)", "e_Sigma(T)", "seconds");
  for (const auto& run : table.runs) {
    const auto& last = run.errors.back();
    if (table.timing_valid)
      std::printf("%-8s %12.4e %12.4e %12.4e %12.4f\n", liemom::method_name(run.method).c_str(),
                  last.e_rotation, last.e_momentum, last.e_covariance, run.wall_seconds);
    else
      std::printf("%-8s %12.4e %12.4e %12.4e %12s\n", liemom::method_name(run.method).c_str(),
                  last.e_rotation, last.e_momentum, last.e_covariance, "n/a");
  }
}

int cmd_simulate(const liemom::ExperimentConfig& cfg) {
  const liemom::RigidBodyModel model{cfg.inertia_diag, cfg.c, cfg.b, cfg.trajectory};
  const auto grid = liemom::make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
  const auto torque = liemom::deterministic_torque(model, grid);
  const auto ensemble =
      liemom::sample_ensemble(model, torque, grid, cfg.n_samples, cfg.base_seed, cfg.n_threads);
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / "ensemble.bin";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  liemom::write_ensemble(os, ensemble);
  echo_config(cfg);
  std::printf("wrote %zu samples x %zu checkpoints to %s\n", ensemble.n_samples,
              ensemble.times.size(), path.string().c_str());
  return 0;
}

int cmd_propagate(liemom::ExperimentConfig cfg, const std::string& ensemble_path) {
  std::ifstream is(ensemble_path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open ensemble file " + ensemble_path);
  const auto ensemble = liemom::read_ensemble(is);
  cfg.n_samples = ensemble.n_samples;  // the echo describes the data actually used
  const auto table = liemom::run_methods(cfg, ensemble);
  liemom::emit_results(table, cfg, cfg.output_dir);
  print_summary(table);
  return 0;
}

int cmd_compare(const liemom::ExperimentConfig& cfg) {
  const auto table = liemom::run_experiment(cfg);
  liemom::emit_results(table, cfg, cfg.output_dir);
  print_summary(table);
  return 0;
}

int cmd_bench(const liemom::ExperimentConfig& cfg, int reps) {
  if (reps < 1) throw std::invalid_argument("bench: --reps must be positive");
  const liemom::RigidBodyModel model{cfg.inertia_diag, cfg.c, cfg.b, cfg.trajectory};
  const auto grid = liemom::make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
  const auto torque = liemom::deterministic_torque(model, grid);
  liemom::ResultTable table;
  table.times = grid.checkpoint_times();
  for (const auto method : cfg.methods) {
    const auto init = liemom::detail::initial_state(cfg, method);
    liemom::propagate_rigidbody(model, torque, init, grid, method);  // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) liemom::propagate_rigidbody(model, torque, init, grid, method);
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    liemom::MethodRun run;
    run.method = method;
    run.wall_seconds = total / reps;
    table.runs.push_back(run);
    std::printf("%-8s %12.6f s per propagation (%d reps)\n",
                liemom::method_name(method).c_str(), run.wall_seconds, reps);
  }
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream os(std::filesystem::path(cfg.output_dir) / "timings.csv", std::ios::binary);
  liemom::write_timings_csv(os, table);
  echo_config(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean and covariance propagation benchmark for stochastic rigid-body rotation"};
  app.require_subcommand(1);

  Overrides sim_o, prop_o, cmp_o, bench_o;
  std::string ensemble_path;
  int reps = 20;

  auto* sim = app.add_subcommand("simulate", "Generate the Monte-Carlo ensemble and dump it");
  add_common_options(sim, sim_o);
  auto* prop = app.add_subcommand("propagate", "Score the methods against a dumped ensemble");
  add_common_options(prop, prop_o);
  prop->add_option("--ensemble", ensemble_path, "Path to a dumped ensemble")->required();
  auto* cmp = app.add_subcommand("compare", "Full pipeline: simulate, propagate, emit results");
  add_common_options(cmp, cmp_o);
  auto* bench = app.add_subcommand("bench", "Time repeated propagations per method");
  add_common_options(bench, bench_o);
  bench->add_option("--reps", reps, "Propagations per method");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(build_config(sim_o));
    if (prop->parsed()) return cmd_propagate(build_config(prop_o), ensemble_path);
    if (cmp->parsed()) return cmd_compare(build_config(cmp_o));
    if (bench->parsed()) return cmd_bench(build_config(bench_o), reps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
