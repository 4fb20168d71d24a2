#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "liemom/grid.hpp"
#include "liemom/heun.hpp"
#include "liemom/quadrature_rhs.hpp"
#include "liemom/rigidbody.hpp"
#include "liemom/so3.hpp"
#include "liemom/so3xr3.hpp"
#include "liemom/state.hpp"
#include "liemom/unscented.hpp"

namespace liemom {

enum class RigidBodyMethod {
  kUkfLa,  // unscented filter prediction in exponential coordinates
  kEmd0,   // expansion of moments, zeroth-order mean
  kEmd2,   // expansion of moments, second-order mean
  kUtd,    // unscented transform propagation
};

namespace detail {

// t[i][j] = e_i x (I^-1 e_j); contracting these against covariance blocks
// gives the second-order gyroscopic mean corrections.
struct GyroscopicTable {
  Eigen::Vector3d t[3][3];

  explicit GyroscopicTable(const Eigen::Vector3d& inertia_diag) {
    const Eigen::Vector3d inv = inertia_diag.cwiseInverse();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t[i][j] = Eigen::Vector3d::Unit(i).cross(Eigen::Vector3d(inv(j) * Eigen::Vector3d::Unit(j)));
  }
};

inline void require_left_stats(const GaussianState<SO3xR3>& state, const char* who) {
  if (state.handedness != Handedness::kLeft)
    throw std::invalid_argument(std::string(who) + ": rigid-body statistics are left-handed");
}

// Shared expansion-of-moments right-hand side.  The covariance rate is the
// same at both mean orders; only the gyroscopic mean corrections differ.
inline RhsEvaluation<SO3xR3> emd_rigidbody_rhs(const RigidBodyModel& model,
                                               const TorqueTable& torque,
                                               const GyroscopicTable& table,
                                               const GaussianState<SO3xR3>& state, double t,
                                               bool second_order_mean) {
  require_left_stats(state, "emd_rigidbody_rhs");
  const Eigen::Vector3d lbar = state.mu.v;
  const Eigen::Vector3d inv = model.inertia_diag.cwiseInverse();
  const Eigen::Vector3d omega = inv.cwiseProduct(lbar);
  const Eigen::Matrix3d s_rr = state.sigma.topLeftCorner<3, 3>();
  const Eigen::Matrix3d s_rl = state.sigma.topRightCorner<3, 3>();
  const Eigen::Matrix3d s_ll = state.sigma.bottomRightCorner<3, 3>();

  RhsEvaluation<SO3xR3> ev;
  ev.mean_velocity.head<3>() = omega;
  ev.mean_velocity.tail<3>() = momentum_drift(model, torque, lbar, t);
  if (second_order_mean) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ev.mean_velocity.head<3>() += 0.5 * s_rl(i, j) * table.t[i][j];
        ev.mean_velocity.tail<3>() += s_ll(i, j) * table.t[i][j];
      }
    }
  }

  const Eigen::Matrix3d d0 = momentum_drift_jacobian(model, lbar);
  const Eigen::Matrix3d a = -SO3::hat(omega);
  const Eigen::Matrix3d b_inv = inv.asDiagonal();
  const Eigen::Matrix3d rate_rr_half = a * s_rr + b_inv * s_rl.transpose();
  const Eigen::Matrix3d rate_ll_half = d0 * s_ll;
  ev.cov_rate.topLeftCorner<3, 3>() = rate_rr_half + rate_rr_half.transpose();
  ev.cov_rate.topRightCorner<3, 3>() = a * s_rl + b_inv * s_ll + s_rl * d0.transpose();
  ev.cov_rate.bottomLeftCorner<3, 3>() = ev.cov_rate.topRightCorner<3, 3>().transpose();
  ev.cov_rate.bottomRightCorner<3, 3>() =
      rate_ll_half + rate_ll_half.transpose() +
      model.noise_b * model.noise_b * Eigen::Matrix3d::Identity();
  return ev;
}

}  // namespace detail

inline RhsEvaluation<SO3xR3> emd2_rigidbody_rhs(const RigidBodyModel& model,
                                                const TorqueTable& torque,
                                                const GaussianState<SO3xR3>& state, double t) {
  return detail::emd_rigidbody_rhs(model, torque, detail::GyroscopicTable(model.inertia_diag),
                                   state, t, true);
}

inline RhsEvaluation<SO3xR3> emd0_rigidbody_rhs(const RigidBodyModel& model,
                                                const TorqueTable& torque,
                                                const GaussianState<SO3xR3>& state, double t) {
  return detail::emd_rigidbody_rhs(model, torque, detail::GyroscopicTable(model.inertia_diag),
                                   state, t, false);
}

inline RhsEvaluation<SO3xR3> utd_rigidbody_rhs(const SystemModel<SO3xR3>& system,
                                               const GaussianState<SO3xR3>& state, double t,
                                               double kappa = -3.0, int djl_order = 6) {
  detail::require_left_stats(state, "utd_rigidbody_rhs");
  QuadratureOptions qopts;
  qopts.djl_order = djl_order;
  qopts.skip_djl_noise_term = true;
  return exact_rhs_quadrature(system, state, t, unscented_points<SO3xR3>(state.sigma, kappa),
                              qopts);
}

// One filter prediction over dt, expressed as a rate so the same Heun driver
// integrates it: sigma points of the deviation are pushed through the
// deterministic forward-Euler transition, the process noise is added in the
// chart at the predicted mean, and the covariance is carried back with the
// right Jacobian of the mean increment.
inline RhsEvaluation<SO3xR3> ukf_la_rhs(const RigidBodyModel& model, const TorqueTable& torque,
                                        const GaussianState<SO3xR3>& state, double t, double dt,
                                        double kappa = -3.0) {
  detail::require_left_stats(state, "ukf_la_rhs");
  const auto pts = unscented_points<SO3xR3>(state.sigma, kappa);
  const Eigen::Vector3d inv = model.inertia_diag.cwiseInverse();
  const SO3xR3::Element mu_inv = SO3xR3::inverse(state.mu);

  const std::size_t m = pts.points.size();
  std::vector<SO3xR3::Vec> moved(m);
  SO3xR3::Vec xi_bar = SO3xR3::Vec::Zero();
  for (std::size_t i = 0; i < m; ++i) {
    const SO3xR3::Element g = SO3xR3::compose(state.mu, SO3xR3::exp(pts.points[i]));
    SO3xR3::Element next;
    next.R = g.R * SO3::exp(Eigen::Vector3d(dt * inv.cwiseProduct(g.v)));
    next.v = g.v + dt * momentum_drift(model, torque, g.v, t);
    moved[i] = SO3xR3::log(SO3xR3::compose(mu_inv, next));
    xi_bar += pts.weights[i] * moved[i];
  }
  SO3xR3::Mat spread = SO3xR3::Mat::Zero();
  for (std::size_t i = 0; i < m; ++i) {
    const SO3xR3::Vec d = moved[i] - xi_bar;
    spread += pts.weights[i] * (d * d.transpose());
  }
  spread.bottomRightCorner<3, 3>() +=
      dt * model.noise_b * model.noise_b * Eigen::Matrix3d::Identity();

  SO3xR3::Mat jac = SO3xR3::Mat::Identity();
  jac.topLeftCorner<3, 3>() = SO3::jr(Eigen::Vector3d(xi_bar.head<3>()));
  const SO3xR3::Mat sigma_next = jac * spread * jac.transpose();

  RhsEvaluation<SO3xR3> ev;
  ev.mean_velocity = xi_bar / dt;
  ev.cov_rate = (sigma_next - state.sigma) / dt;
  return ev;
}

inline std::vector<GaussianState<SO3xR3>> propagate_rigidbody(const RigidBodyModel& model,
                                                              const TorqueTable& torque,
                                                              const GaussianState<SO3xR3>& initial,
                                                              const SimulationGrid& grid,
                                                              RigidBodyMethod method,
                                                              const PropagateOptions& opts = {}) {
  detail::require_left_stats(initial, "propagate_rigidbody");
  switch (method) {
    case RigidBodyMethod::kEmd0:
    case RigidBodyMethod::kEmd2: {
      const bool second_order = method == RigidBodyMethod::kEmd2;
      const detail::GyroscopicTable table(model.inertia_diag);
      auto rhs = [&, second_order](const GaussianState<SO3xR3>& s, double t) {
        return detail::emd_rigidbody_rhs(model, torque, table, s, t, second_order);
      };
      return integrate_heun<SO3xR3>(rhs, initial, grid, opts);
    }
    case RigidBodyMethod::kUtd: {
      const SystemModel<SO3xR3> system = rigid_body_system(model, torque);
      return propagate(system, initial, grid, Method::kUtd, opts);
    }
    case RigidBodyMethod::kUkfLa: {
      auto rhs = [&, dt = grid.dt, kappa = opts.kappa](const GaussianState<SO3xR3>& s, double t) {
        return ukf_la_rhs(model, torque, s, t, dt, kappa);
      };
      return integrate_heun<SO3xR3>(rhs, initial, grid, opts);
    }
  }
  throw std::logic_error("propagate_rigidbody: unknown method");
}

}  // namespace liemom
