#pragma once

#include <Eigen/Dense>

#include "liemom/so3.hpp"

namespace liemom {

// Direct product SO(3) x R^3. The Euclidean factor is carried as diag(exp(v)),
// which keeps the product inside GL(6) and makes |det Ad| = 1 immediate.
// Coordinate order is rotation first: x = [x_R; x_v].
struct SO3xR3 {
  static constexpr int Dim = 6;

  struct Element {
    Eigen::Matrix3d R;
    Eigen::Vector3d v;
  };

  using Vec = Eigen::Matrix<double, 6, 1>;
  using Mat = Eigen::Matrix<double, 6, 6>;
  using AlgebraMatrix = Eigen::Matrix<double, 6, 6>;

  static Element identity() { return {Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()}; }

  static Element compose(const Element& a, const Element& b) {
    return {Eigen::Matrix3d(a.R * b.R), Eigen::Vector3d(a.v + b.v)};
  }

  static Element inverse(const Element& a) {
    return {Eigen::Matrix3d(a.R.transpose()), Eigen::Vector3d(-a.v)};
  }

  static AlgebraMatrix hat(const Vec& x) {
    AlgebraMatrix m = AlgebraMatrix::Zero();
    m.topLeftCorner<3, 3>() = SO3::hat(x.head<3>());
    m.bottomRightCorner<3, 3>() = Eigen::Matrix3d(x.tail<3>().asDiagonal());
    return m;
  }

  static Vec vee(const AlgebraMatrix& m) {
    Vec x;
    x.head<3>() = SO3::vee(m.topLeftCorner<3, 3>());
    x.tail<3>() = m.bottomRightCorner<3, 3>().diagonal();
    return x;
  }

  static AlgebraMatrix basis(int i) { return hat(Vec::Unit(i)); }

  static Element exp(const Vec& x) { return {SO3::exp(x.head<3>()), Eigen::Vector3d(x.tail<3>())}; }

  static Vec log(const Element& g) {
    Vec x;
    x.head<3>() = SO3::log(g.R);
    x.tail<3>() = g.v;
    return x;
  }

  // GL(6) embedding, handy for conjugation checks
  static Eigen::Matrix<double, 6, 6> matrix(const Element& g) {
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    m.topLeftCorner<3, 3>() = g.R;
    m.bottomRightCorner<3, 3>() =
        Eigen::Matrix3d(Eigen::Vector3d(g.v.array().exp()).asDiagonal());
    return m;
  }

  static Mat ad(const Vec& x) {
    Mat m = Mat::Zero();
    m.topLeftCorner<3, 3>() = SO3::hat(x.head<3>());
    return m;
  }

  static Mat Ad(const Element& g) {
    Mat m = Mat::Identity();
    m.topLeftCorner<3, 3>() = g.R;
    return m;
  }

  static Mat jl(const Vec& x) { return with_rotation_block(SO3::jl(x.head<3>())); }
  static Mat jr(const Vec& x) { return with_rotation_block(SO3::jr(x.head<3>())); }
  static Mat jl_inv(const Vec& x) { return with_rotation_block(SO3::jl_inv(x.head<3>())); }
  static Mat jr_inv(const Vec& x) { return with_rotation_block(SO3::jr_inv(x.head<3>())); }

  static Mat jl_inv_series(const Vec& x, int order) {
    return jl_inv_series_ad<Mat>(ad(x), order);
  }

  static Mat djl_inv_dx(const Vec& x, int k, int order = 6) {
    Mat out = Mat::Zero();
    if (k < 3) out.topLeftCorner<3, 3>() = SO3::djl_inv_dx(x.head<3>(), k, order);
    return out;
  }

 private:
  static Mat with_rotation_block(const Eigen::Matrix3d& b) {
    Mat m = Mat::Identity();
    m.topLeftCorner<3, 3>() = b;
    return m;
  }
};

}  // namespace liemom
