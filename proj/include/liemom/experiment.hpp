#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "liemom/grid.hpp"
#include "liemom/rigidbody.hpp"
#include "liemom/rigidbody_propagation.hpp"
#include "liemom/simulate.hpp"
#include "liemom/stats.hpp"
#include "liemom/svg.hpp"

namespace liemom {

// Cholesky-based methods cannot start from an exactly singular covariance.
inline constexpr double kCholeskySeedCovariance = 1e-8;

struct ExperimentConfig {
  int trajectory = 1;
  Eigen::Vector3d inertia_diag{2.070, 1.532, 1.236};
  double c = 1.0;
  double b = 1.0;
  double T = 1.0;
  double dt = 1e-3;
  std::size_t n_samples = 100000;
  std::uint64_t base_seed = 0;
  std::vector<RigidBodyMethod> methods{RigidBodyMethod::kUkfLa, RigidBodyMethod::kEmd0,
                                       RigidBodyMethod::kEmd2, RigidBodyMethod::kUtd};
  int checkpoint_stride = 10;
  std::string output_dir = "results";
  unsigned n_threads = 1;
  // Runs the methods concurrently; wall-clock figures are then meaningless and
  // the timing table is suppressed.
  bool parallel_methods = false;
};

inline std::string method_name(RigidBodyMethod m) {
  switch (m) {
    case RigidBodyMethod::kUkfLa: return "UKF-LA";
    case RigidBodyMethod::kEmd0: return "EMD0";
    case RigidBodyMethod::kEmd2: return "EMD2";
    case RigidBodyMethod::kUtd: return "UTD";
  }
  throw std::invalid_argument("method_name: unknown method");
}

inline RigidBodyMethod method_from_string(std::string name) {
  for (char& c : name) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  if (name == "UKF-LA") return RigidBodyMethod::kUkfLa;
  if (name == "EMD0") return RigidBodyMethod::kEmd0;
  if (name == "EMD2") return RigidBodyMethod::kEmd2;
  if (name == "UTD") return RigidBodyMethod::kUtd;
  throw std::invalid_argument("method_from_string: unknown method '" + name + "'");
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.trajectory != 1 && cfg.trajectory != 2)
    throw std::invalid_argument("config: trajectory must be 1 or 2");
  if (!(cfg.inertia_diag.minCoeff() > 0.0))
    throw std::invalid_argument("config: inertia entries must be positive");
  if (!(cfg.c >= 0.0) || !(cfg.b >= 0.0))
    throw std::invalid_argument("config: c and b must be nonnegative");
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw std::invalid_argument("config: dt and T must be positive");
  if (cfg.n_samples < 1) throw std::invalid_argument("config: n_samples must be at least 1");
  if (cfg.methods.empty()) throw std::invalid_argument("config: methods must be nonempty");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.methods.size(); ++j)
      if (cfg.methods[i] == cfg.methods[j])
        throw std::invalid_argument("config: duplicate method " + method_name(cfg.methods[i]));
  if (cfg.checkpoint_stride < 1) throw std::invalid_argument("config: checkpoint_stride must be positive");
  if (cfg.output_dir.empty()) throw std::invalid_argument("config: output_dir must be nonempty");
  if (cfg.n_threads < 1) throw std::invalid_argument("config: n_threads must be at least 1");
  try {
    make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["trajectory"] = cfg.trajectory;
  j["inertia_diag"] = {cfg.inertia_diag[0], cfg.inertia_diag[1], cfg.inertia_diag[2]};
  j["c"] = cfg.c;
  j["b"] = cfg.b;
  j["T"] = cfg.T;
  j["dt"] = cfg.dt;
  j["n_samples"] = cfg.n_samples;
  j["base_seed"] = cfg.base_seed;
  std::vector<std::string> names;
  for (auto m : cfg.methods) names.push_back(method_name(m));
  j["methods"] = names;
  j["checkpoint_stride"] = cfg.checkpoint_stride;
  j["output_dir"] = cfg.output_dir;
  j["n_threads"] = cfg.n_threads;
  j["parallel_methods"] = cfg.parallel_methods;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known = {
      "trajectory", "inertia_diag", "c",      "b",        "T",
      "dt",         "n_samples",    "base_seed", "methods", "checkpoint_stride",
      "output_dir", "n_threads",    "parallel_methods"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }
  ExperimentConfig cfg;
  try {
    cfg.trajectory = j.value("trajectory", cfg.trajectory);
    if (j.contains("inertia_diag")) {
      const auto arr = j.at("inertia_diag");
      if (!arr.is_array() || arr.size() != 3)
        throw std::invalid_argument("config: inertia_diag must have 3 entries");
      for (int i = 0; i < 3; ++i) cfg.inertia_diag[i] = arr[i].get<double>();
    }
    cfg.c = j.value("c", cfg.c);
    cfg.b = j.value("b", cfg.b);
    cfg.T = j.value("T", cfg.T);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.n_samples = j.value("n_samples", cfg.n_samples);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& name : j.at("methods")) cfg.methods.push_back(method_from_string(name.get<std::string>()));
    }
    cfg.checkpoint_stride = j.value("checkpoint_stride", cfg.checkpoint_stride);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.n_threads = j.value("n_threads", cfg.n_threads);
    cfg.parallel_methods = j.value("parallel_methods", cfg.parallel_methods);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

struct MethodRun {
  RigidBodyMethod method = RigidBodyMethod::kEmd0;
  std::vector<ErrorMetrics> errors;  // one entry per checkpoint
  double wall_seconds = 0.0;
};

struct ResultTable {
  std::vector<double> times;
  std::vector<MethodRun> runs;
  bool timing_valid = true;
};

namespace detail {

inline GaussianState<SO3xR3> initial_state(const ExperimentConfig& cfg, RigidBodyMethod method) {
  GaussianState<SO3xR3> init;
  init.handedness = Handedness::kLeft;
  init.mu.R = Eigen::Matrix3d::Identity();
  init.mu.v = reference_momentum(cfg.trajectory, 0.0);
  const bool cholesky = method == RigidBodyMethod::kUtd || method == RigidBodyMethod::kUkfLa;
  init.sigma = cholesky ? Eigen::Matrix<double, 6, 6>(kCholeskySeedCovariance *
                                                      Eigen::Matrix<double, 6, 6>::Identity())
                        : Eigen::Matrix<double, 6, 6>::Zero();
  return init;
}

inline MethodRun run_one_method(const ExperimentConfig& cfg, const RigidBodyModel& model,
                                const TorqueTable& torque, const SimulationGrid& grid,
                                const std::vector<GaussianState<SO3xR3>>& truth,
                                RigidBodyMethod method) {
  MethodRun run;
  run.method = method;
  std::vector<GaussianState<SO3xR3>> predicted;
  const auto start = std::chrono::steady_clock::now();
  try {
    predicted = propagate_rigidbody(model, torque, initial_state(cfg, method), grid, method);
  } catch (const std::exception& e) {
    throw std::runtime_error(method_name(method) + ": propagation failed: " + e.what());
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (predicted.size() != truth.size())
    throw std::runtime_error(method_name(method) + ": checkpoint count mismatch");
  run.errors.reserve(truth.size());
  for (std::size_t c = 0; c < truth.size(); ++c) {
    ErrorMetrics m;
    try {
      m = error_metrics(truth[c], predicted[c]);
    } catch (const std::exception& e) {
      throw std::runtime_error(method_name(method) + " at t=" + std::to_string(grid.checkpoint_times()[c]) +
                               ": " + e.what());
    }
    if (!std::isfinite(m.e_rotation) || !std::isfinite(m.e_momentum) || !std::isfinite(m.e_covariance))
      throw std::runtime_error(method_name(method) + " at t=" +
                               std::to_string(grid.checkpoint_times()[c]) + ": non-finite error metric");
    run.errors.push_back(m);
  }
  return run;
}

}  // namespace detail

// Evaluates every configured method against one shared ground-truth ensemble.
inline ResultTable run_methods(const ExperimentConfig& cfg, const EnsembleCheckpoints& ensemble) {
  validate_config(cfg);
  const RigidBodyModel model{cfg.inertia_diag, cfg.c, cfg.b, cfg.trajectory};
  const auto grid = make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
  const auto times = grid.checkpoint_times();
  if (ensemble.times.size() != times.size())
    throw std::invalid_argument("run_methods: ensemble checkpoint count does not match the grid");
  for (std::size_t c = 0; c < times.size(); ++c)
    if (std::abs(ensemble.times[c] - times[c]) > 1e-9)
      throw std::invalid_argument("run_methods: ensemble checkpoint times do not match the grid");
  const auto torque = deterministic_torque(model, grid);
  const auto truth = ensemble_stats(ensemble);

  ResultTable table;
  table.times = times;
  table.runs.resize(cfg.methods.size());
  table.timing_valid = !cfg.parallel_methods;
  if (cfg.parallel_methods && cfg.methods.size() > 1) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(cfg.methods.size());
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          table.runs[i] = detail::run_one_method(cfg, model, torque, grid, truth, cfg.methods[i]);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  } else {
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
      table.runs[i] = detail::run_one_method(cfg, model, torque, grid, truth, cfg.methods[i]);
  }
  return table;
}

// Full pipeline: simulate the ensemble, then score every method against it.
inline ResultTable run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RigidBodyModel model{cfg.inertia_diag, cfg.c, cfg.b, cfg.trajectory};
  const auto grid = make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
  const auto torque = deterministic_torque(model, grid);
  const auto ensemble = sample_ensemble(model, torque, grid, cfg.n_samples, cfg.base_seed, cfg.n_threads);
  return run_methods(cfg, ensemble);
}

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace detail

// Shortest round-trip float64 text, '.' decimal, newline-terminated rows.
inline void write_error_csv(std::ostream& os, const std::vector<double>& times,
                            const std::vector<ErrorMetrics>& errors) {
  if (times.size() != errors.size())
    throw std::invalid_argument("write_error_csv: row count mismatch");
  std::string out = "t,e_R,e_l,e_Sigma\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    detail::append_double(out, times[i]);
    out += ',';
    detail::append_double(out, errors[i].e_rotation);
    out += ',';
    detail::append_double(out, errors[i].e_momentum);
    out += ',';
    detail::append_double(out, errors[i].e_covariance);
    out += '\n';
  }
  os << out;
  if (!os) throw std::runtime_error("write_error_csv: stream failure");
}

struct ErrorSeries {
  std::vector<double> times;
  std::vector<ErrorMetrics> errors;
};

inline ErrorSeries read_error_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,e_R,e_l,e_Sigma")
    throw std::runtime_error("read_error_csv: bad header");
  ErrorSeries out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double fields[4];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f < 4; ++f) {
      const auto res = std::from_chars(p, end, fields[f]);
      if (res.ec != std::errc{}) throw std::runtime_error("read_error_csv: bad number");
      p = res.ptr;
      if (f < 3) {
        if (p == end || *p != ',') throw std::runtime_error("read_error_csv: missing separator");
        ++p;
      }
    }
    if (p != end) throw std::runtime_error("read_error_csv: trailing characters");
    out.times.push_back(fields[0]);
    out.errors.push_back({fields[1], fields[2], fields[3]});
  }
  return out;
}

inline void write_timings_csv(std::ostream& os, const ResultTable& table) {
  std::string out = "method,seconds\n";
  for (const auto& run : table.runs) {
    out += method_name(run.method);
    out += ',';
    detail::append_double(out, run.wall_seconds);
    out += '\n';
  }
  os << out;
  if (!os) throw std::runtime_error("write_timings_csv: stream failure");
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_results: cannot open " + path.string());
  os << contents;
  if (!os) throw std::runtime_error("emit_results: write failure on " + path.string());
}

inline svg::LineChart error_chart(const ResultTable& table, const std::string& metric_label,
                                  double ErrorMetrics::* field) {
  svg::LineChart chart;
  chart.title = metric_label + " against the sampled ground truth";
  chart.x_label = "t";
  chart.y_label = metric_label;
  for (const auto& run : table.runs) {
    svg::Series s;
    s.label = method_name(run.method);
    s.x = table.times;
    for (const auto& e : run.errors) s.y.push_back(e.*field);
    chart.series.push_back(std::move(s));
  }
  return chart;
}

}  // namespace detail

// Writes errors_<method>.csv for every run, timings.csv (sequential runs
// only), a config.json echo, and one SVG chart per error metric.
inline void emit_results(const ResultTable& table, const ExperimentConfig& cfg,
                         const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);
  for (const auto& run : table.runs) {
    std::ostringstream os;
    write_error_csv(os, table.times, run.errors);
    detail::write_file(output_dir / ("errors_" + method_name(run.method) + ".csv"), os.str());
  }
  if (table.timing_valid) {
    std::ostringstream os;
    write_timings_csv(os, table);
    detail::write_file(output_dir / "timings.csv", os.str());
  }
  detail::write_file(output_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
  detail::write_file(output_dir / "chart_e_R.svg",
                     svg::render(detail::error_chart(table, "e_R", &ErrorMetrics::e_rotation)));
  detail::write_file(output_dir / "chart_e_l.svg",
                     svg::render(detail::error_chart(table, "e_l", &ErrorMetrics::e_momentum)));
  detail::write_file(output_dir / "chart_e_Sigma.svg",
                     svg::render(detail::error_chart(table, "e_Sigma", &ErrorMetrics::e_covariance)));
}

}  // namespace liemom
