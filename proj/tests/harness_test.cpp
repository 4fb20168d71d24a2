#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <gtest/gtest.h>
#include <sstream>
#include <string>
#include <vector>

#include "liemom/experiment.hpp"

namespace fs = std::filesystem;
using liemom::ExperimentConfig;
using liemom::RigidBodyMethod;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::string read_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) ADD_FAILURE() << "missing file " << p;
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.trajectory = 1;
  cfg.n_samples = 60;
  cfg.base_seed = 5;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  cfg.checkpoint_stride = 10;
  return cfg;
}

}  // namespace

TEST(ExperimentConfig_, DefaultsValidateAndBadFieldsAreRejected) {
  EXPECT_NO_THROW(liemom::validate_config(ExperimentConfig{}));

  const auto rejects = [](auto&& mutate) {
    ExperimentConfig cfg;
    mutate(cfg);
    EXPECT_THROW(liemom::validate_config(cfg), std::invalid_argument);
  };
  rejects([](ExperimentConfig& c) { c.trajectory = 3; });
  rejects([](ExperimentConfig& c) { c.inertia_diag[1] = 0.0; });
  rejects([](ExperimentConfig& c) { c.c = -0.5; });
  rejects([](ExperimentConfig& c) { c.b = -1.0; });
  rejects([](ExperimentConfig& c) { c.dt = 0.0; });
  rejects([](ExperimentConfig& c) { c.T = -1.0; });
  rejects([](ExperimentConfig& c) { c.dt = 0.3; });  // T/dt not an integer
  rejects([](ExperimentConfig& c) { c.n_samples = 0; });
  rejects([](ExperimentConfig& c) { c.methods.clear(); });
  rejects([](ExperimentConfig& c) { c.methods = {RigidBodyMethod::kEmd0, RigidBodyMethod::kEmd0}; });
  rejects([](ExperimentConfig& c) { c.checkpoint_stride = 0; });
  rejects([](ExperimentConfig& c) { c.output_dir.clear(); });
  rejects([](ExperimentConfig& c) { c.n_threads = 0; });
}

TEST(ExperimentConfig_, MethodNamesRoundTripAndParseLoosely) {
  for (auto m : {RigidBodyMethod::kUkfLa, RigidBodyMethod::kEmd0, RigidBodyMethod::kEmd2,
                 RigidBodyMethod::kUtd})
    EXPECT_EQ(liemom::method_from_string(liemom::method_name(m)), m);
  EXPECT_EQ(liemom::method_from_string("ukf_la"), RigidBodyMethod::kUkfLa);
  EXPECT_EQ(liemom::method_from_string("emd2"), RigidBodyMethod::kEmd2);
  EXPECT_THROW(liemom::method_from_string("EMD9"), std::invalid_argument);
}

TEST(ConfigJson, RoundTripsAllFields) {
  ExperimentConfig cfg;
  cfg.trajectory = 2;
  cfg.inertia_diag = Eigen::Vector3d(1.0, 2.0, 3.0);
  cfg.c = 0.5;
  cfg.b = 0.25;
  cfg.T = 0.5;
  cfg.dt = 5e-4;
  cfg.n_samples = 123;
  cfg.base_seed = 0xfeedfacecafebeefull;
  cfg.methods = {RigidBodyMethod::kEmd2, RigidBodyMethod::kUkfLa};
  cfg.checkpoint_stride = 25;
  cfg.output_dir = "elsewhere";
  cfg.n_threads = 4;
  cfg.parallel_methods = true;

  const auto back = liemom::config_from_json(liemom::config_to_json(cfg));
  EXPECT_EQ(back.trajectory, cfg.trajectory);
  EXPECT_EQ((back.inertia_diag - cfg.inertia_diag).norm(), 0.0);
  EXPECT_EQ(back.c, cfg.c);
  EXPECT_EQ(back.b, cfg.b);
  EXPECT_EQ(back.T, cfg.T);
  EXPECT_EQ(back.dt, cfg.dt);
  EXPECT_EQ(back.n_samples, cfg.n_samples);
  EXPECT_EQ(back.base_seed, cfg.base_seed);
  EXPECT_EQ(back.methods, cfg.methods);
  EXPECT_EQ(back.checkpoint_stride, cfg.checkpoint_stride);
  EXPECT_EQ(back.output_dir, cfg.output_dir);
  EXPECT_EQ(back.n_threads, cfg.n_threads);
  EXPECT_EQ(back.parallel_methods, cfg.parallel_methods);
}

TEST(ConfigJson, RejectsUnknownKeysBadMethodsAndInvalidValues) {
  nlohmann::json j = liemom::config_to_json(ExperimentConfig{});
  j["n_sample"] = 5;  // typo
  EXPECT_THROW(liemom::config_from_json(j), std::invalid_argument);

  nlohmann::json bad_method = liemom::config_to_json(ExperimentConfig{});
  bad_method["methods"] = {"EMD5"};
  EXPECT_THROW(liemom::config_from_json(bad_method), std::invalid_argument);

  nlohmann::json bad_inertia = liemom::config_to_json(ExperimentConfig{});
  bad_inertia["inertia_diag"] = {1.0, 2.0};
  EXPECT_THROW(liemom::config_from_json(bad_inertia), std::invalid_argument);

  nlohmann::json bad_dt = liemom::config_to_json(ExperimentConfig{});
  bad_dt["dt"] = -1.0;
  EXPECT_THROW(liemom::config_from_json(bad_dt), std::invalid_argument);
}

TEST(ErrorCsv, RoundTripsBitExactly) {
  const std::vector<double> times = {0.0, 0.1, 1.0 / 3.0, 123456.789};
  const std::vector<liemom::ErrorMetrics> errors = {
      {0.0, 5e-324, 2.220446049250313e-16},
      {0.1, 1.0 / 3.0, 1e-17},
      {1.2345678901234567, 9.999999999999999e-5, 3.0},
      {1e300, 7.0, 0.30000000000000004}};
  std::stringstream ss;
  liemom::write_error_csv(ss, times, errors);

  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, 20), "t,e_R,e_l,e_Sigma\n0,");
  EXPECT_EQ(text.back(), '\n');

  std::stringstream in(text);
  const auto back = liemom::read_error_csv(in);
  ASSERT_EQ(back.times.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_TRUE(same_bits(back.times[i], times[i]));
    EXPECT_TRUE(same_bits(back.errors[i].e_rotation, errors[i].e_rotation));
    EXPECT_TRUE(same_bits(back.errors[i].e_momentum, errors[i].e_momentum));
    EXPECT_TRUE(same_bits(back.errors[i].e_covariance, errors[i].e_covariance));
  }

  std::stringstream bad("t,e_R,e_l,e_Sigma\n1,2,3\n");
  EXPECT_THROW(liemom::read_error_csv(bad), std::runtime_error);
  std::stringstream bad_header("time,e_R,e_l,e_Sigma\n");
  EXPECT_THROW(liemom::read_error_csv(bad_header), std::runtime_error);
}

TEST(TimingsCsv, ListsOneRowPerMethod) {
  liemom::ResultTable table;
  liemom::MethodRun a, b;
  a.method = RigidBodyMethod::kEmd0;
  a.wall_seconds = 0.5;
  b.method = RigidBodyMethod::kUtd;
  b.wall_seconds = 1.25;
  table.runs = {a, b};
  std::stringstream ss;
  liemom::write_timings_csv(ss, table);
  EXPECT_EQ(ss.str(), "method,seconds\nEMD0,0.5\nUTD,1.25\n");
}

TEST(Svg, RenderIsDeterministicEscapesLabelsAndSurvivesDegenerateInput) {
  liemom::svg::LineChart chart;
  chart.title = "demo";
  chart.x_label = "t";
  chart.y_label = "err";
  chart.series.push_back({"a<b&c", {0.0, 1.0, 2.0}, {1.0, 4.0, 2.0}});
  chart.series.push_back({"flat", {0.0, 1.0, 2.0}, {3.0, 3.0, 3.0}});
  const std::string one = liemom::svg::render(chart);
  const std::string two = liemom::svg::render(chart);
  EXPECT_EQ(one, two);
  EXPECT_EQ(one.rfind("<svg", 0), 0u);
  EXPECT_NE(one.find("polyline"), std::string::npos);
  EXPECT_NE(one.find("a&lt;b&amp;c"), std::string::npos);
  EXPECT_EQ(one.find("a<b"), std::string::npos);

  liemom::svg::LineChart empty;
  EXPECT_NO_THROW(liemom::svg::render(empty));
  liemom::svg::LineChart point;
  point.series.push_back({"p", {1.0}, {1.0}});
  EXPECT_NO_THROW(liemom::svg::render(point));
  liemom::svg::LineChart constant;
  constant.series.push_back({"c", {2.0, 2.0}, {5.0, 5.0}});
  const std::string r = liemom::svg::render(constant);
  for (const char* bad : {"nan,", ",nan", "\"nan", ">nan", "inf"})
    EXPECT_EQ(r.find(bad), std::string::npos) << bad;
}

TEST(RunExperiment, NoiselessEmdTracksTruthBelowTolerance) {
  ExperimentConfig cfg;
  cfg.trajectory = 1;
  cfg.b = 0.0;
  cfg.n_samples = 3;
  cfg.T = 1.0;
  cfg.dt = 1e-3;
  cfg.checkpoint_stride = 100;
  cfg.methods = {RigidBodyMethod::kEmd0};

  const auto table = liemom::run_experiment(cfg);
  ASSERT_EQ(table.runs.size(), 1u);
  ASSERT_EQ(table.runs[0].errors.size(), table.times.size());
  for (const auto& e : table.runs[0].errors) {
    EXPECT_LT(e.e_rotation, 1e-4);
    EXPECT_LT(e.e_momentum, 1e-4);
  }
}

TEST(RunExperiment, InitialCovarianceFollowsThePerMethodProtocol) {
  ExperimentConfig cfg;
  cfg.trajectory = 1;
  cfg.n_samples = 2;
  cfg.base_seed = 9;
  cfg.T = 0.02;
  cfg.dt = 1e-3;
  cfg.checkpoint_stride = 10;
  cfg.methods = {RigidBodyMethod::kEmd0, RigidBodyMethod::kUtd};

  const auto table = liemom::run_experiment(cfg);
  // All samples coincide at t=0, so the sampled covariance there is exactly
  // zero and e_Sigma(0) exposes each method's seed covariance.
  EXPECT_EQ(table.runs[0].errors[0].e_covariance, 0.0);
  EXPECT_NEAR(table.runs[1].errors[0].e_covariance, 1e-8 * std::sqrt(6.0), 1e-14);
}

TEST(RunMethods, ConsumesASharedEnsembleAndChecksTheGrid) {
  ExperimentConfig cfg;
  cfg.trajectory = 2;
  cfg.n_samples = 50;
  cfg.base_seed = 31;
  cfg.T = 0.03;
  cfg.dt = 1e-3;
  cfg.checkpoint_stride = 10;
  cfg.methods = {RigidBodyMethod::kEmd0, RigidBodyMethod::kUkfLa};

  const liemom::RigidBodyModel model{cfg.inertia_diag, cfg.c, cfg.b, cfg.trajectory};
  const auto grid = liemom::make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
  const auto torque = liemom::deterministic_torque(model, grid);
  const auto ens = liemom::sample_ensemble(model, torque, grid, cfg.n_samples, cfg.base_seed);

  const auto direct = liemom::run_methods(cfg, ens);
  const auto full = liemom::run_experiment(cfg);
  ASSERT_EQ(direct.runs.size(), full.runs.size());
  for (std::size_t m = 0; m < direct.runs.size(); ++m) {
    ASSERT_EQ(direct.runs[m].errors.size(), full.runs[m].errors.size());
    for (std::size_t c = 0; c < direct.runs[m].errors.size(); ++c) {
      EXPECT_TRUE(same_bits(direct.runs[m].errors[c].e_rotation, full.runs[m].errors[c].e_rotation));
      EXPECT_TRUE(same_bits(direct.runs[m].errors[c].e_momentum, full.runs[m].errors[c].e_momentum));
      EXPECT_TRUE(
          same_bits(direct.runs[m].errors[c].e_covariance, full.runs[m].errors[c].e_covariance));
    }
  }

  const auto coarse = liemom::make_grid(0.0, cfg.T, cfg.dt, 15);
  const auto ens_coarse =
      liemom::sample_ensemble(model, liemom::deterministic_torque(model, coarse), coarse, 10, 1);
  EXPECT_THROW(liemom::run_methods(cfg, ens_coarse), std::invalid_argument);

  const auto shifted = liemom::make_grid(0.01, 0.04, cfg.dt, 10);
  const auto ens_shifted =
      liemom::sample_ensemble(model, liemom::deterministic_torque(model, shifted), shifted, 10, 1);
  EXPECT_THROW(liemom::run_methods(cfg, ens_shifted), std::invalid_argument);
}

TEST(EmitResults, SameConfigProducesIdenticalBytes) {
  const auto cfg = small_config();
  const auto dir_a = fresh_dir("liemom_harness_a");
  const auto dir_b = fresh_dir("liemom_harness_b");
  liemom::emit_results(liemom::run_experiment(cfg), cfg, dir_a);
  liemom::emit_results(liemom::run_experiment(cfg), cfg, dir_b);

  std::vector<std::string> files = {"errors_UKF-LA.csv", "errors_EMD0.csv", "errors_EMD2.csv",
                                    "errors_UTD.csv",    "config.json",     "chart_e_R.svg",
                                    "chart_e_l.svg",     "chart_e_Sigma.svg"};
  for (const auto& f : files) {
    const auto a = read_bytes(dir_a / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, read_bytes(dir_b / f)) << f;
  }
  // Wall clock differs between runs; only presence and shape are checked.
  std::ifstream ta(dir_a / "timings.csv");
  const auto timings = read_bytes(dir_a / "timings.csv");
  EXPECT_EQ(timings.rfind("method,seconds\n", 0), 0u);

  std::ifstream ca(dir_a / "errors_EMD2.csv");
  const auto series = liemom::read_error_csv(ca);
  ASSERT_EQ(series.times.size(), 6u);
  for (std::size_t i = 1; i < series.times.size(); ++i)
    EXPECT_GT(series.times[i], series.times[i - 1]);

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST(EmitResults, ParallelMethodFlagSuppressesTimingsAndKeepsErrors) {
  auto cfg = small_config();
  cfg.n_samples = 30;
  cfg.parallel_methods = true;
  cfg.methods = {RigidBodyMethod::kEmd0, RigidBodyMethod::kEmd2};
  const auto dir = fresh_dir("liemom_harness_par");

  auto sequential = cfg;
  sequential.parallel_methods = false;
  const auto table = liemom::run_methods(
      cfg, [&] {
        const liemom::RigidBodyModel model{cfg.inertia_diag, cfg.c, cfg.b, cfg.trajectory};
        const auto grid = liemom::make_grid(0.0, cfg.T, cfg.dt, cfg.checkpoint_stride);
        return liemom::sample_ensemble(model, liemom::deterministic_torque(model, grid), grid,
                                       cfg.n_samples, cfg.base_seed);
      }());
  EXPECT_FALSE(table.timing_valid);
  liemom::emit_results(table, cfg, dir);
  EXPECT_FALSE(fs::exists(dir / "timings.csv"));
  EXPECT_TRUE(fs::exists(dir / "errors_EMD0.csv"));

  const auto reference = liemom::run_experiment(sequential);
  for (std::size_t m = 0; m < table.runs.size(); ++m)
    for (std::size_t c = 0; c < table.runs[m].errors.size(); ++c)
      EXPECT_TRUE(same_bits(table.runs[m].errors[c].e_covariance,
                            reference.runs[m].errors[c].e_covariance));
  fs::remove_all(dir);
}
