#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "liemom/errors.hpp"

namespace liemom {

// Deterministic quadrature rule for a zero-mean Gaussian with covariance
// sigma: weights sum to one, weighted mean is zero, weighted second moment
// reproduces sigma. Exact for quadratic integrands.
template <class G>
struct SigmaPointSet {
  std::vector<typename G::Vec> points;
  std::vector<double> weights;
};

template <class G>
SigmaPointSet<G> unscented_points(const typename G::Mat& sigma, double kappa) {
  const Eigen::Index n = sigma.rows();
  if (!(double(n) + kappa > 0.0)) {
    throw std::invalid_argument("unscented_points: need n + kappa > 0");
  }

  Eigen::MatrixXd root = Eigen::MatrixXd::Zero(n, n);
  if (!sigma.isZero(0.0)) {
    Eigen::LLT<Eigen::MatrixXd> llt((Eigen::MatrixXd(sigma)));
    if (llt.info() != Eigen::Success) {
      // semidefinite case: retry on a minimally regularized matrix
      llt.compute(Eigen::MatrixXd(sigma) + 1e-12 * Eigen::MatrixXd::Identity(n, n));
      if (llt.info() != Eigen::Success) {
        throw CovarianceError("unscented_points: covariance is not positive semidefinite");
      }
    }
    root = llt.matrixL();
  }

  const double scale = std::sqrt(double(n) + kappa);
  SigmaPointSet<G> out;
  out.points.reserve(size_t(2 * n + 1));
  out.weights.reserve(size_t(2 * n + 1));
  out.points.push_back(typename G::Vec(G::Vec::Zero(n)));
  out.weights.push_back(kappa / (double(n) + kappa));
  const double w = 0.5 / (double(n) + kappa);
  for (int i = 0; i < n; ++i) {
    out.points.push_back(typename G::Vec(scale * root.col(i)));
    out.weights.push_back(w);
  }
  for (int i = 0; i < n; ++i) {
    out.points.push_back(typename G::Vec(-scale * root.col(i)));
    out.weights.push_back(w);
  }
  return out;
}

}  // namespace liemom
