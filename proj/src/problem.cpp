#include "classo/problem.hpp"

#include <cmath>
#include <string>

namespace classo {

namespace {

void check_finite(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& y) {
  if (!matrix.allFinite()) throw InvalidArgument("matrix contains non-finite entries");
  if (!y.allFinite()) throw InvalidArgument("observation contains non-finite entries");
}

void check_shapes(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& y) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw InvalidArgument("matrix must have at least one row and one column");
  }
  if (y.size() != matrix.rows()) {
    throw DimensionMismatch("observation length " + std::to_string(y.size()) +
                            " does not match matrix rows " + std::to_string(matrix.rows()));
  }
}

}  // namespace

Problem::Problem(Eigen::MatrixXcd matrix, Eigen::VectorXcd observation) {
  check_shapes(matrix, observation);
  check_finite(matrix, observation);
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const double norm = matrix.col(j).norm();
    if (std::abs(norm - 1.0) > kColumnNormTol) {
      throw InvalidArgument("column " + std::to_string(j) + " has norm " + std::to_string(norm) +
                            ", expected unit norm (use with_normalized_columns to rescale)");
    }
  }
  matrix_ = std::move(matrix);
  y_ = std::move(observation);
  column_scales_ = Eigen::VectorXd::Ones(matrix_.cols());
}

Problem Problem::with_normalized_columns(Eigen::MatrixXcd matrix, Eigen::VectorXcd observation) {
  check_shapes(matrix, observation);
  check_finite(matrix, observation);
  Eigen::VectorXd scales(matrix.cols());
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const double norm = matrix.col(j).norm();
    if (!(norm > 0.0)) {
      throw InvalidArgument("column " + std::to_string(j) + " is zero and cannot be normalized");
    }
    matrix.col(j) /= norm;
    scales[j] = norm;
  }
  Problem out;
  out.matrix_ = std::move(matrix);
  out.y_ = std::move(observation);
  out.column_scales_ = std::move(scales);
  return out;
}

}  // namespace classo
