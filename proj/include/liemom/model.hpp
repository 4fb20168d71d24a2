#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "liemom/state.hpp"

namespace liemom {

namespace detail {

template <class G>
typename G::Vec unit_vec(Eigen::Index n, int i) {
  if constexpr (G::Dim == Eigen::Dynamic) {
    return G::Vec::Unit(n, i);
  } else {
    (void)n;
    return G::Vec::Unit(i);
  }
}

template <class M>
M sym(const M& a) {
  return M(a + a.transpose());
}

}  // namespace detail

// Stochastic model dg = (h dt + H dW) attached to the group on the side given
// by `handedness` (see Handedness). The derivative hooks describe the drift
// recentred about a mean with the deviation on the model's own side:
//   kLeft:  x -> h(exp(x) o mu, t)        kRight:  x -> h(mu o exp(x), t)
// evaluated at x = 0. When a hook is empty the engines fall back to central
// differences. `noise_state` generalizes `noise` to state-dependent H(g,t);
// the propagation engines require time-only noise and ignore it, but
// stratonovich_drift_correction consumes it.
template <class G>
struct SystemModel {
  using Element = typename G::Element;
  using Vec = typename G::Vec;
  using Mat = typename G::Mat;

  std::function<Vec(const Element&, double)> drift;
  std::function<Mat(double)> noise;
  Handedness handedness = Handedness::kLeft;

  std::function<Mat(const Element&, double)> drift_jacobian;                 // (i,j) = dh_i/dx_j
  std::function<std::vector<Mat>(const Element&, double)> drift_hessian;     // [m](i,j) = d2h_m/dx_i dx_j
  std::function<Mat(const Element&, double)> noise_state;
};

inline constexpr double kFdStepFirst = 1e-5;
inline constexpr double kFdStepSecond = 1e-4;

// drift as a function of the deviation from `mu`, on the model's own side
template <class G>
std::function<typename G::Vec(const typename G::Vec&)> recentred_drift(
    const SystemModel<G>& model, const typename G::Element& mu, double t) {
  if (model.handedness == Handedness::kLeft) {
    return [&model, mu, t](const typename G::Vec& x) {
      return model.drift(G::compose(G::exp(x), mu), t);
    };
  }
  return [&model, mu, t](const typename G::Vec& x) {
    return model.drift(G::compose(mu, G::exp(x)), t);
  };
}

template <class G>
typename G::Mat drift_jacobian_or_fd(const SystemModel<G>& model, const typename G::Element& mu,
                                     double t) {
  if (model.drift_jacobian) return model.drift_jacobian(mu, t);
  const auto hc = recentred_drift<G>(model, mu, t);
  const typename G::Vec h0 = model.drift(mu, t);
  const Eigen::Index n = h0.size();
  typename G::Mat jac(n, n);
  for (int j = 0; j < n; ++j) {
    const typename G::Vec e = detail::unit_vec<G>(n, j);
    jac.col(j) = (hc(typename G::Vec(kFdStepFirst * e)) - hc(typename G::Vec(-kFdStepFirst * e))) /
                 (2.0 * kFdStepFirst);
  }
  return jac;
}

template <class G>
std::vector<typename G::Mat> drift_hessian_or_fd(const SystemModel<G>& model,
                                                 const typename G::Element& mu, double t) {
  if (model.drift_hessian) return model.drift_hessian(mu, t);
  using Vec = typename G::Vec;
  const auto hc = recentred_drift<G>(model, mu, t);
  const Vec h0 = model.drift(mu, t);
  const Eigen::Index n = h0.size();
  const double h = kFdStepSecond;
  std::vector<typename G::Mat> hess(size_t(n), G::Mat::Zero(n, n).eval());
  for (int i = 0; i < n; ++i) {
    const Vec ei = detail::unit_vec<G>(n, i);
    for (int j = i; j < n; ++j) {
      const Vec ej = detail::unit_vec<G>(n, j);
      const Vec d = (hc(Vec(h * ei + h * ej)) - hc(Vec(h * ei - h * ej)) -
                     hc(Vec(-h * ei + h * ej)) + hc(Vec(-h * ei - h * ej))) /
                    (4.0 * h * h);
      for (int m = 0; m < n; ++m) {
        hess[size_t(m)](i, j) = d[m];
        hess[size_t(m)](j, i) = d[m];
      }
    }
  }
  return hess;
}

// Model of the inverted process g -> g^-1: drift g -> -h(g^-1, t) on the
// opposite side, noise unchanged. Statistics map as mu -> mu^-1 with the same
// covariance, and the mean velocity flips sign. Applying it twice is the
// identity. The derivative hooks transform as jac -> jac(mu^-1),
// hess -> -hess(mu^-1) because the recentred deviation flips sign with the side.
template <class G>
SystemModel<G> convert_right_system(const SystemModel<G>& model) {
  SystemModel<G> out;
  out.handedness = flipped(model.handedness);
  out.drift = [drift = model.drift](const typename G::Element& g, double t) ->
      typename G::Vec { return -drift(G::inverse(g), t); };
  out.noise = model.noise;
  if (model.drift_jacobian) {
    out.drift_jacobian = [jac = model.drift_jacobian](const typename G::Element& mu, double t) {
      return jac(G::inverse(mu), t);
    };
  }
  if (model.drift_hessian) {
    out.drift_hessian = [hess = model.drift_hessian](const typename G::Element& mu, double t) {
      auto hs = hess(G::inverse(mu), t);
      for (auto& m : hs) m = -m;
      return hs;
    };
  }
  if (model.noise_state) {
    out.noise_state = [ns = model.noise_state](const typename G::Element& g, double t) {
      return ns(G::inverse(g), t);
    };
  }
  return out;
}

// Drift correction 1/2 H_nj E_n(H_mj) turning a Stratonovich equation with
// state-dependent noise into its It\^o-equivalent form; zero when the noise
// does not depend on the state. The Lie derivative side follows the model:
// right-handed models use E^r (deviation appended on the right), left-handed
// use E^l (exp(-t e_n) prepended).
template <class G>
typename G::Vec stratonovich_drift_correction(const SystemModel<G>& model,
                                              const typename G::Element& g, double t) {
  using Vec = typename G::Vec;
  using Mat = typename G::Mat;
  const Mat noise0 = model.noise_state ? model.noise_state(g, t) : model.noise(t);
  const Eigen::Index n = noise0.rows();
  Vec out = Vec::Zero(n);
  if (!model.noise_state) return out;
  const double step = kFdStepFirst;
  for (int k = 0; k < n; ++k) {
    const Vec e = detail::unit_vec<G>(n, k);
    Mat dh;
    if (model.handedness == Handedness::kRight) {
      dh = (model.noise_state(G::compose(g, G::exp(Vec(step * e))), t) -
            model.noise_state(G::compose(g, G::exp(Vec(-step * e))), t)) /
           (2.0 * step);
    } else {
      dh = (model.noise_state(G::compose(G::exp(Vec(-step * e)), g), t) -
            model.noise_state(G::compose(G::exp(Vec(step * e)), g), t)) /
           (2.0 * step);
    }
    // accumulate 1/2 sum_j H_kj * (E_k H)_mj over this k
    out += 0.5 * dh * noise0.row(k).transpose();
  }
  return out;
}

// Result of evaluating a propagation right-hand side at one state and time:
// the algebra velocity of the mean (on the state's side) and the covariance rate.
template <class G>
struct RhsEvaluation {
  typename G::Vec mean_velocity;
  typename G::Mat cov_rate;
};

}  // namespace liemom
