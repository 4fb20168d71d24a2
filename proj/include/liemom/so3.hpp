#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "liemom/bernoulli.hpp"
#include "liemom/errors.hpp"

namespace liemom {

// Rotation group in exponential coordinates. jl/jr are the left/right
// Jacobians of exp and jl_inv/jr_inv their inverses; ad/Ad act on coordinates.
struct SO3 {
  static constexpr int Dim = 3;
  using Element = Eigen::Matrix3d;
  using Vec = Eigen::Vector3d;
  using Mat = Eigen::Matrix3d;
  using AlgebraMatrix = Eigen::Matrix3d;

  static constexpr double kPi = std::numbers::pi;
  // below this angle the closed forms switch to their Taylor expansions
  static constexpr double kSmallAngle = 1e-4;
  // log refuses angles this close to pi (principal chart boundary)
  static constexpr double kPiMargin = 1e-6;

  static Element identity() { return Element::Identity(); }
  static Element compose(const Element& a, const Element& b) { return a * b; }
  static Element inverse(const Element& a) { return a.transpose(); }

  static AlgebraMatrix hat(const Vec& x) {
    AlgebraMatrix m;
    // clang-format off
    m <<     0.0, -x.z(),  x.y(),
           x.z(),    0.0, -x.x(),
          -x.y(),  x.x(),    0.0;
    // clang-format on
    return m;
  }

  static Vec vee(const AlgebraMatrix& m) { return Vec(m(2, 1), m(0, 2), m(1, 0)); }

  static AlgebraMatrix basis(int i) { return hat(Vec::Unit(i)); }

  static Element exp(const Vec& x) {
    const double th2 = x.squaredNorm();
    const double th = std::sqrt(th2);
    double a, b;
    if (th < kSmallAngle) {
      a = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
      b = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
    } else {
      a = std::sin(th) / th;
      const double s = std::sin(0.5 * th);
      b = 2.0 * s * s / th2;
    }
    const AlgebraMatrix X = hat(x);
    return Element(Element::Identity() + a * X + b * (X * X));
  }

  static Vec log(const Element& R) {
    // angle from atan2(sin, cos) with sin taken off the skew part; this stays
    // well conditioned all the way to the chart boundary, unlike acos(trace)
    const Vec w = vee(AlgebraMatrix(R - R.transpose()));  // 2 sin(th) * axis
    const double s = 0.5 * w.norm();
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    const double th = std::atan2(s, c);
    if (kPi - th < kPiMargin) {
      throw AngleAtPiError("so3 log: rotation angle within margin of pi");
    }
    double f;  // th / (2 sin th)
    if (th < kSmallAngle) {
      const double th2 = th * th;
      f = 0.5 * (1.0 + th2 / 6.0 + 7.0 * th2 * th2 / 360.0);
    } else {
      f = 0.5 * th / s;
    }
    return Vec(f * w);
  }

  static Mat ad(const Vec& x) { return hat(x); }
  static Mat Ad(const Element& R) { return R; }

  static Mat jl(const Vec& x) {
    const double th2 = x.squaredNorm();
    const double th = std::sqrt(th2);
    double a, b;
    if (th < kSmallAngle) {
      a = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
      b = 1.0 / 6.0 - th2 / 120.0 + th2 * th2 / 5040.0;
    } else {
      const double s = std::sin(0.5 * th);
      a = 2.0 * s * s / th2;
      b = (th - std::sin(th)) / (th2 * th);
    }
    const AlgebraMatrix X = hat(x);
    return Mat(Mat::Identity() + a * X + b * (X * X));
  }

  static Mat jr(const Vec& x) { return jl(Vec(-x)); }

  static Mat jl_inv(const Vec& x) {
    const AlgebraMatrix X = hat(x);
    return Mat(Mat::Identity() - 0.5 * X + jinv_quadratic_coeff(x.norm()) * (X * X));
  }

  static Mat jr_inv(const Vec& x) {
    const AlgebraMatrix X = hat(x);
    return Mat(Mat::Identity() + 0.5 * X + jinv_quadratic_coeff(x.norm()) * (X * X));
  }

  static Mat jl_inv_series(const Vec& x, int order) {
    return jl_inv_series_ad<Mat>(ad(x), order);
  }

  static Mat djl_inv_dx(const Vec& x, int k, int order = 6) {
    if (x.norm() >= kPi - 1e-3) {
      throw std::domain_error("so3 djl_inv_dx: |x| too close to pi");
    }
    return djl_inv_series_ad<Mat>(ad(x), ad(Vec::Unit(k)), order);
  }

 private:
  static double jinv_quadratic_coeff(double th) {
    if (th >= kPi) throw std::domain_error("so3 jacobian inverse: |x| >= pi");
    if (th < kSmallAngle) {
      const double th2 = th * th;
      return 1.0 / 12.0 + th2 / 720.0 + th2 * th2 / 30240.0;
    }
    return 1.0 / (th * th) - 0.5 / (th * std::tan(0.5 * th));
  }
};

}  // namespace liemom
