#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "liemom/errors.hpp"
#include "liemom/model.hpp"
#include "liemom/state.hpp"
#include "liemom/unscented.hpp"

namespace liemom {

struct QuadratureOptions {
  // truncation order of the Jacobian-derivative series in the noise term
  int djl_order = 6;
  // drop the Jacobian-derivative noise term entirely (valid whenever the
  // noise diffusion never meets a curved direction, e.g. block noise that the
  // adjoint annihilates); keeps quadrature cost down
  bool skip_djl_noise_term = false;
};

// Mean-velocity and covariance-rate of the recentred distribution, evaluated
// by weighted quadrature over the supplied points:
//   v     = <Jr^-1>^-1 < n(x) + Jl^-1 h^c >
//   Sdot  = < sym[(n(x) - Jr^-1 v + Jl^-1 h^c) x^T] + Jl^-1 H H^T Jl^-T >
// with n(x) = 1/2 (dJl^-1/dx_k)(H H^T Jl^-T) e_k and h^c the drift recentred
// about the mean. A left-handed model propagates right-handed statistics; a
// right-handed model propagates left-handed statistics through the inverse
// process, flipping the sign of the mean velocity.
template <class G>
RhsEvaluation<G> exact_rhs_quadrature(const SystemModel<G>& model, const GaussianState<G>& state,
                                      double t, const SigmaPointSet<G>& points,
                                      const QuadratureOptions& opts = {}) {
  using Vec = typename G::Vec;
  using Mat = typename G::Mat;

  if (model.handedness == Handedness::kRight) {
    if (state.handedness != Handedness::kLeft) {
      throw std::invalid_argument("exact_rhs_quadrature: right model needs left statistics");
    }
    const SystemModel<G> left = convert_right_system(model);
    const GaussianState<G> inv{G::inverse(state.mu), state.sigma, Handedness::kRight};
    RhsEvaluation<G> ev = exact_rhs_quadrature(left, inv, t, points, opts);
    ev.mean_velocity = -ev.mean_velocity;
    return ev;
  }
  if (state.handedness != Handedness::kRight) {
    throw std::invalid_argument("exact_rhs_quadrature: left model needs right statistics");
  }

  const Eigen::Index n = state.sigma.rows();
  const Mat noise = model.noise(t);
  const Mat diffusion = noise * noise.transpose();
  const bool with_noise = !diffusion.isZero(0.0);
  const bool with_djl = with_noise && !opts.skip_djl_noise_term;
  const size_t m = points.points.size();

  std::vector<Mat> jr_inv(m);
  std::vector<Vec> bracket(m);  // n(x) + Jl^-1 h^c per point
  Vec first_moment = Vec::Zero(n);
  Mat jr_inv_mean = Mat::Zero(n, n);
  Mat diffusion_mean = Mat::Zero(n, n);

  for (size_t i = 0; i < m; ++i) {
    const Vec& xi = points.points[i];
    const double w = points.weights[i];
    jr_inv[i] = G::jr_inv(xi);
    const Mat jl_inv = G::jl_inv(xi);
    Vec b = jl_inv * model.drift(G::compose(G::exp(xi), state.mu), t);
    if (with_noise) {
      const Mat spread = jl_inv * diffusion * jl_inv.transpose();
      diffusion_mean += w * spread;
      if (with_djl) {
        const Mat cols = diffusion * jl_inv.transpose();
        for (int k = 0; k < n; ++k) {
          b += 0.5 * G::djl_inv_dx(xi, k, opts.djl_order) * cols.col(k);
        }
      }
    }
    bracket[i] = b;
    jr_inv_mean += w * jr_inv[i];
    first_moment += w * b;
  }
  if (!with_noise) diffusion_mean = diffusion;  // exactly zero

  const Eigen::FullPivLU<Eigen::MatrixXd> lu((Eigen::MatrixXd(jr_inv_mean)));
  if (!lu.isInvertible()) {
    throw SingularAverageError(
        "exact_rhs_quadrature: averaged inverse right Jacobian is singular");
  }
  const Vec velocity = lu.solve(Eigen::MatrixXd(first_moment));

  Mat cov_rate = diffusion_mean;
  for (size_t i = 0; i < m; ++i) {
    const Vec residual = bracket[i] - jr_inv[i] * velocity;
    cov_rate += points.weights[i] * detail::sym<Mat>(residual * points.points[i].transpose());
  }
  cov_rate = 0.5 * (cov_rate + cov_rate.transpose()).eval();
  return {velocity, cov_rate};
}

}  // namespace liemom
