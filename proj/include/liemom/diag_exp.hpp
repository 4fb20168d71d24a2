#pragma once

#include <Eigen/Dense>

namespace liemom {

// Commutative group R^N embedded as diag(exp(x)). Exponential coordinates are
// global, all Jacobians are the identity and ad vanishes, so the group-level
// machinery collapses to the familiar Euclidean forms.
struct DiagExp {
  static constexpr int Dim = Eigen::Dynamic;
  using Element = Eigen::VectorXd;  // the coordinate vector x of diag(exp(x))
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  using AlgebraMatrix = Eigen::MatrixXd;

  static Element identity(Eigen::Index n) { return Element::Zero(n); }
  static Element compose(const Element& a, const Element& b) { return Element(a + b); }
  static Element inverse(const Element& a) { return Element(-a); }

  static AlgebraMatrix hat(const Vec& x) { return AlgebraMatrix(x.asDiagonal()); }
  static Vec vee(const AlgebraMatrix& m) { return m.diagonal(); }
  static AlgebraMatrix basis(int i, Eigen::Index n) { return hat(Vec::Unit(n, i)); }

  static Element exp(const Vec& x) { return x; }
  static Vec log(const Element& g) { return g; }

  static Mat ad(const Vec& x) { return Mat::Zero(x.size(), x.size()); }
  static Mat Ad(const Element& g) { return Mat::Identity(g.size(), g.size()); }

  static Mat jl(const Vec& x) { return Mat::Identity(x.size(), x.size()); }
  static Mat jr(const Vec& x) { return Mat::Identity(x.size(), x.size()); }
  static Mat jl_inv(const Vec& x) { return Mat::Identity(x.size(), x.size()); }
  static Mat jr_inv(const Vec& x) { return Mat::Identity(x.size(), x.size()); }

  static Mat jl_inv_series(const Vec& x, int /*order*/) {
    return Mat::Identity(x.size(), x.size());
  }

  static Mat djl_inv_dx(const Vec& x, int /*k*/, int /*order*/ = 6) {
    return Mat::Zero(x.size(), x.size());
  }
};

}  // namespace liemom
