#pragma once

#include <stdexcept>

namespace liemom {

// rotation angle too close to pi for the principal log branch
struct AngleAtPiError : std::domain_error {
  using std::domain_error::domain_error;
};

// iterative group mean failed to settle within the iteration budget
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// averaged right inverse Jacobian (or similar system matrix) not invertible
struct SingularAverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// covariance lost positive semidefiniteness, or a Cholesky factorization failed
struct CovarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace liemom
