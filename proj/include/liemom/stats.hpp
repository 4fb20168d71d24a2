#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "liemom/errors.hpp"
#include "liemom/simulate.hpp"
#include "liemom/so3.hpp"
#include "liemom/so3xr3.hpp"
#include "liemom/state.hpp"

namespace liemom {

inline constexpr double kMeanTolerance = 1e-6;
inline constexpr int kMaxMeanIterations = 100;

// Fixed point of mean(log(R_bar^T R_i)) = 0, seeded with exp of the mean log.
inline Eigen::Matrix3d sample_mean_rotation(const std::vector<Eigen::Matrix3d>& rotations) {
  if (rotations.empty()) throw std::invalid_argument("sample_mean_rotation: empty sample");
  const double scale = 1.0 / static_cast<double>(rotations.size());
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (const auto& r : rotations) acc += SO3::log(r);
  Eigen::Matrix3d mean = SO3::exp(scale * acc);
  for (int iter = 0; iter < kMaxMeanIterations; ++iter) {
    acc.setZero();
    for (const auto& r : rotations) acc += SO3::log(Eigen::Matrix3d(mean.transpose() * r));
    acc *= scale;
    if (acc.norm() < kMeanTolerance) return mean;
    mean = mean * SO3::exp(acc);
  }
  throw NonConvergenceError("sample_mean_rotation: no fixed point after iteration cap");
}

// 1/N covariance of the left deviations x_i = [log(R_bar^T R_i); l_i - l_bar],
// rotation block first.
inline Eigen::Matrix<double, 6, 6> sample_covariance(const std::vector<Eigen::Matrix3d>& rotations,
                                                     const std::vector<Eigen::Vector3d>& momenta,
                                                     const Eigen::Matrix3d& mean_rotation,
                                                     const Eigen::Vector3d& mean_momentum) {
  if (rotations.empty() || rotations.size() != momenta.size())
    throw std::invalid_argument("sample_covariance: bad sample arrays");
  Eigen::Matrix<double, 6, 6> acc = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> x;
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    x.head<3>() = SO3::log(Eigen::Matrix3d(mean_rotation.transpose() * rotations[i]));
    x.tail<3>() = momenta[i] - mean_momentum;
    acc += x * x.transpose();
  }
  return acc / static_cast<double>(rotations.size());
}

inline GaussianState<SO3xR3> ensemble_stats_at(const std::vector<Eigen::Matrix3d>& rotations,
                                               const std::vector<Eigen::Vector3d>& momenta) {
  if (momenta.empty() || rotations.size() != momenta.size())
    throw std::invalid_argument("ensemble_stats_at: bad sample arrays");
  GaussianState<SO3xR3> out;
  out.handedness = Handedness::kLeft;
  out.mu.R = sample_mean_rotation(rotations);
  out.mu.v.setZero();
  for (const auto& l : momenta) out.mu.v += l;
  out.mu.v /= static_cast<double>(momenta.size());
  out.sigma = sample_covariance(rotations, momenta, out.mu.R, out.mu.v);
  return out;
}

inline std::vector<GaussianState<SO3xR3>> ensemble_stats(const EnsembleCheckpoints& ens) {
  std::vector<GaussianState<SO3xR3>> out;
  out.reserve(ens.times.size());
  for (std::size_t c = 0; c < ens.times.size(); ++c)
    out.push_back(ensemble_stats_at(ens.rotations[c], ens.momenta[c]));
  return out;
}

struct ErrorMetrics {
  double e_rotation = 0.0;
  double e_momentum = 0.0;
  double e_covariance = 0.0;
};

inline ErrorMetrics error_metrics(const GaussianState<SO3xR3>& reference,
                                  const GaussianState<SO3xR3>& predicted) {
  if (reference.handedness != predicted.handedness)
    throw std::invalid_argument("error_metrics: handedness mismatch");
  ErrorMetrics m;
  m.e_rotation = (reference.mu.R - predicted.mu.R).norm();
  m.e_momentum = (reference.mu.v - predicted.mu.v).norm();
  m.e_covariance = (reference.sigma - predicted.sigma).norm();
  return m;
}

}  // namespace liemom
