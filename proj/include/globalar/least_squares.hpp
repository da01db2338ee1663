#pragma once

/// @file
/// Ordinary least squares through a complete orthogonal decomposition, which
/// returns the minimum-norm solution when the design is rank deficient.

#include <globalar/error.hpp>

#include <Eigen/Dense>

namespace globalar {

struct LeastSquaresSolution {
  Eigen::VectorXd weights;  ///< one per feature column
  double intercept = 0.0;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
};

/// Minimizes |y - intercept - X w|^2. With `with_intercept` the intercept is a
/// column of ones and takes part in the minimum-norm criterion.
inline LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                                bool with_intercept) {
  if (X.rows() < 1) throw StructuralError("least squares on an empty design matrix");
  if (X.cols() < 1) throw StructuralError("least squares needs at least one feature");
  if (X.rows() != y.size()) throw DomainError("design rows and target length differ");

  const Eigen::Index offset = with_intercept ? 1 : 0;
  Eigen::MatrixXd A(X.rows(), X.cols() + offset);
  if (with_intercept) A.col(0).setOnes();
  A.rightCols(X.cols()) = X;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd beta = cod.solve(y);

  LeastSquaresSolution out;
  out.intercept = with_intercept ? beta(0) : 0.0;
  out.weights = beta.tail(X.cols());
  out.rank = cod.rank();
  out.rank_deficient = out.rank < A.cols();
  return out;
}

}  // namespace globalar
