#pragma once

#include <Eigen/Dense>

#include "classo/errors.hpp"

namespace classo {

/// A regression instance: complex measurement matrix M (n x p) and
/// observation vector y (n). Columns of M must have unit Hermitian norm
/// (within 1e-8); the single-coefficient descent update is only a valid
/// coordinate step under that normalization. Immutable after construction.
class Problem {
 public:
  /// Validating constructor; throws InvalidArgument on non-unit columns or
  /// non-finite entries, DimensionMismatch on inconsistent sizes.
  Problem(Eigen::MatrixXcd matrix, Eigen::VectorXcd observation);

  /// Rescales every column to unit norm and records the original norms so
  /// callers can map coefficients back (coef_original = coef / scale[j]).
  static Problem with_normalized_columns(Eigen::MatrixXcd matrix, Eigen::VectorXcd observation);

  Eigen::Index n() const { return matrix_.rows(); }
  Eigen::Index p() const { return matrix_.cols(); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const Eigen::VectorXcd& observation() const { return y_; }

  /// Original column norms when built via with_normalized_columns; all ones
  /// otherwise.
  const Eigen::VectorXd& column_scales() const { return column_scales_; }

  static constexpr double kColumnNormTol = 1e-8;

 private:
  Problem() = default;

  Eigen::MatrixXcd matrix_;
  Eigen::VectorXcd y_;
  Eigen::VectorXd column_scales_;
};

}  // namespace classo
