#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "liemom/emd.hpp"
#include "liemom/errors.hpp"
#include "liemom/grid.hpp"
#include "liemom/model.hpp"
#include "liemom/quadrature_rhs.hpp"
#include "liemom/state.hpp"
#include "liemom/unscented.hpp"

namespace liemom {

enum class Method {
  kEmd0,                    // drift-only mean, second-order covariance
  kEmd2,                    // second-order mean and covariance
  kUtd,                     // unscented quadrature, diffusion chart term dropped
  kExactQuadratureGeneric,  // unscented quadrature of the full equations
};

struct PropagateOptions {
  double kappa = -3.0;        // unscented scaling, n + kappa = 3 for dim 6
  int djl_order = 6;          // series order for the Jacobian-derivative term
  int psd_check_interval = 100;  // steps between covariance eigenvalue checks
  double psd_tol = 1e-9;
};

namespace detail {

template <class G>
typename G::Element advance_mean(const typename G::Element& mu, const typename G::Vec& step,
                                 Handedness h) {
  // kRight statistics perturb on the left of the mean and vice versa
  return h == Handedness::kRight ? G::compose(G::exp(step), mu) : G::compose(mu, G::exp(step));
}

inline void check_psd(const Eigen::MatrixXd& sigma, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, sigma.norm())) {
    throw CovarianceError("propagated covariance lost positive semidefiniteness");
  }
}

}  // namespace detail

// Heun (improved Euler) integration of a mean-velocity / covariance-rate
// field. The mean advances through the exponential on the side given by the
// state's handedness; the covariance advances additively and is re-symmetrized
// every step. Returns the state at each grid checkpoint, including t0.
template <class G, class Rhs>
std::vector<GaussianState<G>> integrate_heun(Rhs&& rhs, GaussianState<G> state,
                                             const SimulationGrid& grid,
                                             const PropagateOptions& opts = {}) {
  std::vector<GaussianState<G>> out;
  out.reserve(grid.checkpoint_indices().size());
  if (grid.is_checkpoint(0)) out.push_back(state);
  const double dt = grid.dt;
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    const RhsEvaluation<G> k1 = rhs(state, t);

    GaussianState<G> pred;
    pred.mu = detail::advance_mean<G>(state.mu, typename G::Vec(dt * k1.mean_velocity),
                                      state.handedness);
    pred.sigma = state.sigma + dt * k1.cov_rate;
    pred.handedness = state.handedness;
    const RhsEvaluation<G> k2 = rhs(pred, t + dt);

    state.mu = detail::advance_mean<G>(
        state.mu, typename G::Vec(0.5 * dt * (k1.mean_velocity + k2.mean_velocity)),
        state.handedness);
    state.sigma += 0.5 * dt * (k1.cov_rate + k2.cov_rate);
    state.sigma = typename G::Mat(0.5 * (state.sigma + state.sigma.transpose().eval()));

    if (opts.psd_check_interval > 0 &&
        ((k + 1) % opts.psd_check_interval == 0 || k + 1 == grid.n_steps)) {
      detail::check_psd(Eigen::MatrixXd(state.sigma), opts.psd_tol);
    }
    if (grid.is_checkpoint(k + 1)) out.push_back(state);
  }
  return out;
}

// Propagates mean and covariance through the grid with the chosen method. The
// state handedness must be opposite to the model's; rhs construction throws
// otherwise. Quadrature methods redraw sigma points from the current
// covariance at every stage evaluation; expansion methods rebuild their
// coefficient tensors at every stage evaluation.
template <class G>
std::vector<GaussianState<G>> propagate(const SystemModel<G>& model,
                                        const GaussianState<G>& initial,
                                        const SimulationGrid& grid, Method method,
                                        const PropagateOptions& opts = {}) {
  switch (method) {
    case Method::kEmd0:
      return integrate_heun<G>(
          [&](const GaussianState<G>& s, double t) { return emd0_rhs(model, s, t); }, initial,
          grid, opts);
    case Method::kEmd2:
      return integrate_heun<G>(
          [&](const GaussianState<G>& s, double t) { return emd2_rhs(model, s, t); }, initial,
          grid, opts);
    case Method::kUtd:
    case Method::kExactQuadratureGeneric: {
      QuadratureOptions qopts;
      qopts.djl_order = opts.djl_order;
      qopts.skip_djl_noise_term = method == Method::kUtd;
      auto rhs = [&model, qopts, kappa = opts.kappa](const GaussianState<G>& s, double t) {
        return exact_rhs_quadrature(model, s, t, unscented_points<G>(s.sigma, kappa), qopts);
      };
      return integrate_heun<G>(rhs, initial, grid, opts);
    }
  }
  throw std::logic_error("propagate: unknown method");
}

enum class EuclideanVariant {
  kLinearized,  // EKF-style: linearized covariance, drift-at-mean velocity
  kUnscented,   // UKF-style: unscented quadrature of the same equations
};

// Classical vector-space prediction for commutative groups; on such groups the
// unscented variant coincides with the generic quadrature method.
template <class G>
std::vector<GaussianState<G>> euclidean_prediction(const SystemModel<G>& model,
                                                   const GaussianState<G>& initial,
                                                   const SimulationGrid& grid,
                                                   EuclideanVariant variant,
                                                   const PropagateOptions& opts = {}) {
  if (variant == EuclideanVariant::kUnscented) {
    return propagate(model, initial, grid, Method::kExactQuadratureGeneric, opts);
  }
  auto rhs = [&model](const GaussianState<G>& s, double t) {
    const typename G::Mat f = drift_jacobian_or_fd(model, s.mu, t);
    const typename G::Mat noise = model.noise(t);
    RhsEvaluation<G> out;
    out.mean_velocity = model.drift(s.mu, t);
    out.cov_rate = typename G::Mat(noise * noise.transpose() + f * s.sigma +
                                   s.sigma * f.transpose());
    return out;
  };
  return integrate_heun<G>(rhs, initial, grid, opts);
}

}  // namespace liemom
