#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace liemom {

inline constexpr int kMaxBernoulliOrder = 64;

// B_{2k}/(2k)!, with B_0/0! = 1. Evaluated through
// B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k},
// which stays accurate for large k where the textbook recurrence cancels badly.
inline double bernoulli_even_over_factorial(int k) {
  if (k < 0 || k > kMaxBernoulliOrder) {
    throw std::invalid_argument("bernoulli_even_over_factorial: order out of range");
  }
  static const std::array<double, kMaxBernoulliOrder + 1> table = [] {
    std::array<double, kMaxBernoulliOrder + 1> c{};
    c[0] = 1.0;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int m = 1; m <= kMaxBernoulliOrder; ++m) {
      double zeta;
      if (m <= 4) {
        // Euler's closed forms: zeta(2,4,6,8) = pi^{2m} / {6, 90, 945, 9450}
        const double denom[] = {6.0, 90.0, 945.0, 9450.0};
        zeta = std::pow(pi2, m) / denom[m - 1];
      } else {
        zeta = 1.0;
        int n = 2;
        for (;; ++n) {
          const double term = std::pow(double(n), -2.0 * m);
          zeta += term;
          if (term < 1e-18) break;
        }
        // integral correction for the truncated tail
        zeta += std::pow(double(n), 1.0 - 2.0 * m) / (2.0 * m - 1.0);
      }
      const double sign = (m % 2 == 1) ? 1.0 : -1.0;
      c[m] = sign * 2.0 * zeta / std::pow(2.0 * std::numbers::pi, 2.0 * m);
    }
    return c;
  }();
  return table[k];
}

// Inverse left Jacobian as the Bernoulli series in the adjoint matrix:
//   Jl^-1 = I - ad/2 + sum_{k=1..order} B_{2k}/(2k)! ad^{2k}
template <class Mat>
Mat jl_inv_series_ad(const Mat& ad_x, int order) {
  const Eigen::Index n = ad_x.rows();
  Mat acc = Mat::Identity(n, n) - 0.5 * ad_x;
  const Mat ad2 = ad_x * ad_x;
  Mat power = Mat::Identity(n, n);
  for (int k = 1; k <= order; ++k) {
    power *= ad2;
    acc += bernoulli_even_over_factorial(k) * power;
  }
  return acc;
}

template <class Mat>
Mat jr_inv_series_ad(const Mat& ad_x, int order) {
  return jl_inv_series_ad<Mat>(Mat(-ad_x), order);
}

// Term-wise derivative of the series above along coordinate k, where
// d(ad_x)/dx_k = ad_k is constant:
//   d Jl^-1 = -ad_k/2 + sum_m B_{2m}/(2m)! sum_{j<2m} ad_x^j ad_k ad_x^{2m-1-j}
template <class Mat>
Mat djl_inv_series_ad(const Mat& ad_x, const Mat& ad_k, int order) {
  const Eigen::Index n = ad_x.rows();
  std::vector<Mat> pow;
  pow.reserve(2 * order);
  pow.push_back(Mat::Identity(n, n));
  for (int j = 1; j <= 2 * order - 1; ++j) pow.push_back(Mat(pow.back() * ad_x));
  Mat acc = Mat(-0.5 * ad_k);
  for (int m = 1; m <= order; ++m) {
    const double c = bernoulli_even_over_factorial(m);
    Mat s = Mat::Zero(n, n);
    for (int j = 0; j <= 2 * m - 1; ++j) s += pow[j] * ad_k * pow[2 * m - 1 - j];
    acc += c * s;
  }
  return acc;
}

}  // namespace liemom
