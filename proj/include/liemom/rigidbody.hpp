#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "liemom/grid.hpp"
#include "liemom/model.hpp"
#include "liemom/so3xr3.hpp"

namespace liemom {

// Free rigid body driven in body coordinates: group element (R, l) with
// orientation R and angular momentum l, right-invariant noise on the
// momentum factor only.
struct RigidBodyModel {
  Eigen::Vector3d inertia_diag{2.070, 1.532, 1.236};
  double viscosity_c = 1.0;
  double noise_b = 1.0;
  int trajectory_id = 1;
};

// Momentum profiles the feedforward torque is built to track.
inline Eigen::Vector3d reference_momentum(int trajectory_id, double t) {
  switch (trajectory_id) {
    case 1:
      return Eigen::Vector3d(0.0, t + 1.0, 2.0 * t + 1.0);
    case 2:
      return Eigen::Vector3d(1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * t), 0.0, 0.0);
    default:
      throw std::invalid_argument("reference_momentum: unknown trajectory id");
  }
}

// Feedforward torque tabulated on the simulation grid.  Between nodes the
// value is linearly interpolated; outside the grid it clamps to the ends.
struct TorqueTable {
  SimulationGrid grid;
  std::vector<Eigen::Vector3d> values;

  Eigen::Vector3d at(double t) const {
    const double u = (t - grid.t0) / grid.dt;
    const auto last = static_cast<std::ptrdiff_t>(grid.n_steps);
    const auto nearest = static_cast<std::ptrdiff_t>(std::llround(u));
    if (nearest >= 0 && nearest <= last && std::abs(u - static_cast<double>(nearest)) < 1e-9) {
      return values[static_cast<std::size_t>(nearest)];
    }
    if (u <= 0.0) return values.front();
    if (u >= static_cast<double>(last)) return values.back();
    const auto lo = static_cast<std::ptrdiff_t>(std::floor(u));
    const double w = u - static_cast<double>(lo);
    return (1.0 - w) * values[static_cast<std::size_t>(lo)] +
           w * values[static_cast<std::size_t>(lo + 1)];
  }
};

// N*(t) = dl*/dt + c I^-1 l* + (I^-1 l*) x l*, with the time derivative taken
// by central differences on the grid (one-sided at the ends).
inline TorqueTable deterministic_torque(const RigidBodyModel& model, const SimulationGrid& grid) {
  const Eigen::Vector3d inv = model.inertia_diag.cwiseInverse();
  TorqueTable table{grid, {}};
  table.values.resize(grid.n_steps + 1);
  const auto ref = [&](int k) { return reference_momentum(model.trajectory_id, grid.time(k)); };
  for (int k = 0; k <= grid.n_steps; ++k) {
    Eigen::Vector3d dl;
    if (k == 0) {
      dl = (ref(1) - ref(0)) / grid.dt;
    } else if (k == grid.n_steps) {
      dl = (ref(k) - ref(k - 1)) / grid.dt;
    } else {
      dl = (ref(k + 1) - ref(k - 1)) / (2.0 * grid.dt);
    }
    const Eigen::Vector3d l = ref(k);
    const Eigen::Vector3d omega = inv.cwiseProduct(l);
    table.values[k] = dl + model.viscosity_c * omega + omega.cross(l);
  }
  return table;
}

inline Eigen::Vector3d momentum_drift(const RigidBodyModel& model, const TorqueTable& torque,
                                      const Eigen::Vector3d& l, double t) {
  const Eigen::Vector3d omega = model.inertia_diag.cwiseInverse().cwiseProduct(l);
  return l.cross(omega) - model.viscosity_c * omega + torque.at(t);
}

// d/dl [ l x (I^-1 l) - c I^-1 l ]
inline Eigen::Matrix3d momentum_drift_jacobian(const RigidBodyModel& model,
                                               const Eigen::Vector3d& l) {
  const Eigen::Matrix3d inv = model.inertia_diag.cwiseInverse().asDiagonal();
  return SO3::hat(l) * inv - SO3::hat(inv * l) - model.viscosity_c * inv;
}

// Full system with analytic recentred-drift derivatives.  The model is
// right-handed: increments are read off as (g^-1 dg)^vee.
inline SystemModel<SO3xR3> rigid_body_system(const RigidBodyModel& model,
                                             const TorqueTable& torque) {
  const Eigen::Vector3d inv = model.inertia_diag.cwiseInverse();
  SystemModel<SO3xR3> sys;
  sys.handedness = Handedness::kRight;
  sys.drift = [model, torque](const SO3xR3::Element& g, double t) {
    Eigen::Matrix<double, 6, 1> h;
    h.head<3>() = model.inertia_diag.cwiseInverse().cwiseProduct(g.v);
    h.tail<3>() = momentum_drift(model, torque, g.v, t);
    return h;
  };
  sys.noise = [b = model.noise_b](double) {
    Eigen::Matrix<double, 6, 6> n = Eigen::Matrix<double, 6, 6>::Zero();
    n.bottomRightCorner<3, 3>() = b * Eigen::Matrix3d::Identity();
    return n;
  };
  sys.drift_jacobian = [model, inv](const SO3xR3::Element& g, double) {
    Eigen::Matrix<double, 6, 6> jac = Eigen::Matrix<double, 6, 6>::Zero();
    jac.topRightCorner<3, 3>() = inv.asDiagonal();
    jac.bottomRightCorner<3, 3>() = momentum_drift_jacobian(model, g.v);
    return jac;
  };
  sys.drift_hessian = [inv](const SO3xR3::Element&, double) {
    std::vector<Eigen::Matrix<double, 6, 6>> hess(
        6, Eigen::Matrix<double, 6, 6>::Zero());
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const Eigen::Vector3d tab = Eigen::Vector3d::Unit(a).cross(inv(b) * Eigen::Vector3d::Unit(b));
        const Eigen::Vector3d tba = Eigen::Vector3d::Unit(b).cross(inv(a) * Eigen::Vector3d::Unit(a));
        for (int r = 0; r < 3; ++r) hess[3 + r](3 + a, 3 + b) = tab(r) + tba(r);
      }
    }
    return hess;
  };
  return sys;
}

}  // namespace liemom
