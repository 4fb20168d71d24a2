#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "liemom/grid.hpp"
#include "liemom/rigidbody.hpp"
#include "liemom/rng.hpp"
#include "liemom/so3.hpp"

namespace liemom {

namespace detail {

// Stratonovich Heun step for the rigid-body SDE.  The momentum uses the same
// Brownian increment in predictor and corrector; the rotation advances by the
// trapezoidal body rate built from the momentum before and after the step.
template <class OnCheckpoint>
void integrate_sde_path(const RigidBodyModel& model, const TorqueTable& torque,
                        const SimulationGrid& grid, std::mt19937_64& rng,
                        const Eigen::Vector3d& initial_momentum, OnCheckpoint&& on_checkpoint) {
  const Eigen::Vector3d inv = model.inertia_diag.cwiseInverse();
  std::normal_distribution<double> normal;
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  Eigen::Vector3d l = initial_momentum;
  std::size_t slot = 0;
  if (grid.is_checkpoint(0)) on_checkpoint(slot++, r, l);
  const double root_dt = std::sqrt(grid.dt);
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    const double tn = grid.time(k + 1);
    Eigen::Vector3d noise = Eigen::Vector3d::Zero();
    if (model.noise_b != 0.0) {
      noise(0) = normal(rng);
      noise(1) = normal(rng);
      noise(2) = normal(rng);
      noise *= model.noise_b * root_dt;
    }
    const Eigen::Vector3d a1 = momentum_drift(model, torque, l, t);
    const Eigen::Vector3d predictor = l + grid.dt * a1 + noise;
    const Eigen::Vector3d a2 = momentum_drift(model, torque, predictor, tn);
    const Eigen::Vector3d l_next = l + 0.5 * grid.dt * (a1 + a2) + noise;
    const Eigen::Vector3d omega_avg = 0.5 * inv.cwiseProduct(l + l_next);
    r = r * SO3::exp(grid.dt * omega_avg);
    l = l_next;
    if (grid.is_checkpoint(k + 1)) on_checkpoint(slot++, r, l);
  }
}

}  // namespace detail

struct TrajectorySample {
  std::vector<double> times;
  std::vector<Eigen::Matrix3d> rotations;
  std::vector<Eigen::Vector3d> momenta;
};

inline TrajectorySample simulate_trajectory(const RigidBodyModel& model, const TorqueTable& torque,
                                            const SimulationGrid& grid, std::uint64_t seed,
                                            std::optional<Eigen::Vector3d> initial_momentum = {}) {
  TrajectorySample out;
  out.times = grid.checkpoint_times();
  out.rotations.resize(out.times.size());
  out.momenta.resize(out.times.size());
  const Eigen::Vector3d l0 =
      initial_momentum ? *initial_momentum : reference_momentum(model.trajectory_id, grid.t0);
  std::mt19937_64 rng(seed);
  detail::integrate_sde_path(model, torque, grid, rng, l0,
                             [&](std::size_t slot, const Eigen::Matrix3d& r, const Eigen::Vector3d& l) {
                               out.rotations[slot] = r;
                               out.momenta[slot] = l;
                             });
  return out;
}

// Checkpoint-major ensemble storage: rotations[c][i] is sample i at checkpoint c.
struct EnsembleCheckpoints {
  std::vector<double> times;
  std::size_t n_samples = 0;
  std::vector<std::vector<Eigen::Matrix3d>> rotations;
  std::vector<std::vector<Eigen::Vector3d>> momenta;
};

// Every sample draws from its own counter-derived stream and writes to its own
// slots, so the result is bit-identical for any thread count or schedule.
inline EnsembleCheckpoints sample_ensemble(const RigidBodyModel& model, const TorqueTable& torque,
                                           const SimulationGrid& grid, std::size_t n_samples,
                                           std::uint64_t base_seed, unsigned n_threads = 1,
                                           std::optional<Eigen::Vector3d> initial_momentum = {}) {
  EnsembleCheckpoints out;
  out.times = grid.checkpoint_times();
  out.n_samples = n_samples;
  out.rotations.assign(out.times.size(), std::vector<Eigen::Matrix3d>(n_samples));
  out.momenta.assign(out.times.size(), std::vector<Eigen::Vector3d>(n_samples));
  const Eigen::Vector3d l0 =
      initial_momentum ? *initial_momentum : reference_momentum(model.trajectory_id, grid.t0);
  auto run_block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = make_stream(base_seed, i);
      detail::integrate_sde_path(
          model, torque, grid, rng, l0,
          [&](std::size_t slot, const Eigen::Matrix3d& r, const Eigen::Vector3d& l) {
            out.rotations[slot][i] = r;
            out.momenta[slot][i] = l;
          });
    }
  };
  if (n_threads <= 1 || n_samples < 2 * n_threads) {
    run_block(0, n_samples);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n_samples + n_threads - 1) / n_threads;
  for (unsigned w = 0; w < n_threads; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= n_samples) break;
    pool.emplace_back(run_block, begin, std::min(begin + chunk, n_samples));
  }
  for (auto& th : pool) th.join();
  return out;
}

inline constexpr char kEnsembleMagic[8] = {'L', 'M', 'E', 'N', 'S', 'B', 'L', '1'};

// Little-endian float64 dump: magic, n_samples, n_checkpoints, then per
// checkpoint the time followed by each sample's rotation (row-major) and
// momentum.
inline void write_ensemble(std::ostream& os, const EnsembleCheckpoints& ens) {
  static_assert(std::endian::native == std::endian::little);
  os.write(kEnsembleMagic, sizeof(kEnsembleMagic));
  const std::uint64_t ns = ens.n_samples;
  const std::uint64_t nc = ens.times.size();
  os.write(reinterpret_cast<const char*>(&ns), sizeof(ns));
  os.write(reinterpret_cast<const char*>(&nc), sizeof(nc));
  auto put = [&os](double x) { os.write(reinterpret_cast<const char*>(&x), sizeof(x)); };
  for (std::size_t c = 0; c < ens.times.size(); ++c) {
    put(ens.times[c]);
    for (std::size_t i = 0; i < ens.n_samples; ++i) {
      const Eigen::Matrix3d& r = ens.rotations[c][i];
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) put(r(row, col));
      for (int row = 0; row < 3; ++row) put(ens.momenta[c][i](row));
    }
  }
  if (!os) throw std::runtime_error("write_ensemble: stream failure");
}

inline EnsembleCheckpoints read_ensemble(std::istream& is) {
  static_assert(std::endian::native == std::endian::little);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || !std::equal(magic, magic + 8, kEnsembleMagic))
    throw std::runtime_error("read_ensemble: bad magic");
  std::uint64_t ns = 0;
  std::uint64_t nc = 0;
  is.read(reinterpret_cast<char*>(&ns), sizeof(ns));
  is.read(reinterpret_cast<char*>(&nc), sizeof(nc));
  if (!is) throw std::runtime_error("read_ensemble: truncated header");
  EnsembleCheckpoints ens;
  ens.n_samples = ns;
  ens.times.resize(nc);
  ens.rotations.assign(nc, std::vector<Eigen::Matrix3d>(ns));
  ens.momenta.assign(nc, std::vector<Eigen::Vector3d>(ns));
  auto get = [&is]() {
    double x = 0.0;
    is.read(reinterpret_cast<char*>(&x), sizeof(x));
    return x;
  };
  for (std::uint64_t c = 0; c < nc; ++c) {
    ens.times[c] = get();
    for (std::uint64_t i = 0; i < ns; ++i) {
      Eigen::Matrix3d& r = ens.rotations[c][i];
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) r(row, col) = get();
      for (int row = 0; row < 3; ++row) ens.momenta[c][i](row) = get();
    }
  }
  if (!is) throw std::runtime_error("read_ensemble: truncated body");
  return ens;
}

}  // namespace liemom
