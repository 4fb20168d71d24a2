#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "liemom/model.hpp"
#include "liemom/state.hpp"

namespace liemom {

namespace detail {

// sum_k ad_k M e_k; vanishes for symmetric M
template <class G>
typename G::Vec contract_ad(const std::vector<typename G::Mat>& ad,
                            const typename G::Mat& m) {
  const Eigen::Index n = m.rows();
  typename G::Vec out = G::Vec::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) out += ad[size_t(k)] * m.col(k);
  return out;
}

}  // namespace detail

// Second-order expansion coefficients of the propagation equations about the
// mean. m_mu[i*n+j] and m_sigma[i*n+j] are contracted against Sigma_ij to give
// the second-order corrections:
//   mean velocity   = drift_at_mean + sum_ij m_mu[ij] Sigma_ij
//   covariance rate = diffusion     + sum_ij m_sigma[ij] Sigma_ij
// The tensors are already oriented to the model's own handedness, so the
// contraction above is the native velocity for either convention. The
// covariance coefficients use the zeroth-order mean velocity (the drift at the
// mean) in their velocity slot; the discrepancy against feeding back the full
// second-order velocity is beyond the truncation order, and this choice keeps
// the coefficients independent of Sigma and the covariance rate identical
// between the zeroth- and second-order mean variants.
template <class G>
struct Emd2Coefficients {
  std::vector<typename G::Vec> m_mu;  // empty when built without mean tensors
  std::vector<typename G::Mat> m_sigma;
  typename G::Vec drift_at_mean;
  typename G::Mat diffusion;
};

template <class G>
Emd2Coefficients<G> emd2_coefficients(const SystemModel<G>& model, const typename G::Element& mu,
                                      double t, bool with_mean_tensors = true) {
  using Vec = typename G::Vec;
  using Mat = typename G::Mat;

  Emd2Coefficients<G> out;
  out.drift_at_mean = model.drift(mu, t);
  const Eigen::Index n = out.drift_at_mean.size();
  const Mat noise = model.noise(t);
  out.diffusion = noise * noise.transpose();

  const double side = model.handedness == Handedness::kLeft ? 1.0 : -1.0;
  // expansion frame: the left-handed system (for right models, of the inverse
  // process); h0 and the Hessian pick up the side sign, the Jacobian does not
  const Vec h0 = side * out.drift_at_mean;
  const Mat jac = drift_jacobian_or_fd(model, mu, t);
  std::vector<Mat> hess;
  if (with_mean_tensors) {
    hess = drift_hessian_or_fd(model, mu, t);
    for (auto& m : hess) m *= side;
  }

  std::vector<Mat> ad(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ad[size_t(i)] = G::ad(detail::unit_vec<G>(n, i));

  const Mat& q = out.diffusion;
  const bool with_noise = !q.isZero(0.0);

  // per-i pieces reused across j
  std::vector<Vec> bracket(static_cast<size_t>(n));
  std::vector<Mat> ad_q(static_cast<size_t>(n));   // ad_i q
  std::vector<Mat> q_adt(static_cast<size_t>(n));  // q ad_i^T
  for (int i = 0; i < n; ++i) {
    bracket[size_t(i)] = Vec(-ad[size_t(i)] * h0 + jac.col(i));
    if (with_noise) {
      ad_q[size_t(i)] = ad[size_t(i)] * q;
      q_adt[size_t(i)] = q * ad[size_t(i)].transpose();
      bracket[size_t(i)] += 0.125 * detail::contract_ad<G>(ad, q_adt[size_t(i)]) +
                            (1.0 / 24.0) * detail::contract_ad<G>(ad, ad_q[size_t(i)]);
    }
  }

  if (with_mean_tensors) out.m_mu.resize(size_t(n * n));
  out.m_sigma.resize(size_t(n * n));
  Vec hess_ij = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Mat sig_ij = detail::sym<Mat>(
          Mat(bracket[size_t(i)] * detail::unit_vec<G>(n, j).transpose()));
      if (with_noise) {
        sig_ij += detail::sym<Mat>(Mat((1.0 / 12.0) * ad[size_t(i)] * ad_q[size_t(j)])) +
                  0.25 * ad[size_t(i)] * q_adt[size_t(j)];
      }
      out.m_sigma[size_t(i * n + j)] = sig_ij;

      if (!with_mean_tensors) continue;
      for (int m = 0; m < n; ++m) hess_ij[m] = hess[size_t(m)](i, j);
      Vec mu_ij = Vec(0.5 * hess_ij - 0.5 * ad[size_t(i)] * jac.col(j));
      if (with_noise) {
        mu_ij += (-1.0 / 48.0) *
                 (detail::contract_ad<G>(ad, Mat(q_adt[size_t(j)] * ad[size_t(i)].transpose())) +
                  ad[size_t(i)] * detail::contract_ad<G>(ad, q_adt[size_t(j)]));
      }
      out.m_mu[size_t(i * n + j)] = Vec(side * mu_ij);
    }
  }
  return out;
}

template <class G>
RhsEvaluation<G> emd_rhs_from_coefficients(const Emd2Coefficients<G>& coef,
                                           const typename G::Mat& sigma,
                                           bool second_order_mean) {
  using Vec = typename G::Vec;
  using Mat = typename G::Mat;
  const Eigen::Index n = sigma.rows();
  Vec velocity = coef.drift_at_mean;
  Mat rate = coef.diffusion;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = sigma(i, j);
      if (s == 0.0) continue;
      if (second_order_mean) velocity += s * coef.m_mu[size_t(i * n + j)];
      rate += s * coef.m_sigma[size_t(i * n + j)];
    }
  }
  rate = 0.5 * (rate + rate.transpose()).eval();
  return {velocity, rate};
}

namespace detail {

template <class G>
void require_opposite_handedness(const SystemModel<G>& model, const GaussianState<G>& state) {
  if (state.handedness != flipped(model.handedness)) {
    throw std::invalid_argument(
        "expansion rhs: state handedness must be opposite to the model's");
  }
}

}  // namespace detail

// second-order mean and covariance rates
template <class G>
RhsEvaluation<G> emd2_rhs(const SystemModel<G>& model, const GaussianState<G>& state, double t) {
  detail::require_opposite_handedness(model, state);
  return emd_rhs_from_coefficients<G>(emd2_coefficients(model, state.mu, t), state.sigma, true);
}

// zeroth-order (drift only) mean with the same covariance rate
template <class G>
RhsEvaluation<G> emd0_rhs(const SystemModel<G>& model, const GaussianState<G>& state, double t) {
  detail::require_opposite_handedness(model, state);
  return emd_rhs_from_coefficients<G>(emd2_coefficients(model, state.mu, t, false), state.sigma,
                                      false);
}

}  // namespace liemom
