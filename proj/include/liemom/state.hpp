#pragma once

#include <Eigen/Dense>

namespace liemom {

// Which side of the mean the deviation (for states) or the increment (for
// stochastic models) multiplies on:
//   kLeft  state:  g = mu o exp(x)     kLeft  model:  (dg g^-1)^vee = h dt + H dW
//   kRight state:  g = exp(x) o mu     kRight model:  (g^-1 dg)^vee = h dt + H dW
enum class Handedness { kLeft, kRight };

inline Handedness flipped(Handedness h) {
  return h == Handedness::kLeft ? Handedness::kRight : Handedness::kLeft;
}

// Concentrated Gaussian on the group: mean element plus covariance of the
// algebra-valued deviation, whose side is tracked by `handedness`.
template <class G>
struct GaussianState {
  typename G::Element mu;
  typename G::Mat sigma;
  Handedness handedness = Handedness::kLeft;
};

// Same distribution in the opposite convention: sigma_right = Ad(mu) sigma_left Ad(mu)^T.
template <class G>
GaussianState<G> convert_left_right(const GaussianState<G>& s) {
  const typename G::Mat ad =
      s.handedness == Handedness::kLeft ? G::Ad(s.mu) : G::Ad(G::inverse(s.mu));
  return {s.mu, typename G::Mat(ad * s.sigma * ad.transpose()), flipped(s.handedness)};
}

}  // namespace liemom
