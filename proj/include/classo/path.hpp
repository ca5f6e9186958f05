#pragma once

#include <vector>

#include <Eigen/Dense>

#include "classo/solver.hpp"

namespace classo {

/// Fits along a descending penalty grid, each warm-started from the previous
/// one. lambdas are strictly descending and lie in (0, lambda_max].
struct SolutionPath {
  double lambda_max = 0.0;
  Eigen::VectorXd lambdas;
  std::vector<MLassoFit> fits;
};

/// Scale of the null model (all coefficients zero): the unique positive
/// solution of sum_i chi(|y_i|/sigma) = alpha n, found by iterating the
/// scale update. Throws DegenerateScale when no positive solution exists
/// (y = 0, or a Huber chi that saturates below alpha n).
double null_model_scale(const LossModel& loss, const Problem& problem,
                        kernels::Exec exec = kernels::Exec::Auto);

/// Smallest penalty that shrinks every coefficient to zero:
/// max_j |<m_j, psi(y/sigma0) sigma0>| at the null-model scale sigma0.
double lambda_max(const LossModel& loss, const Problem& problem,
                  kernels::Exec exec = kernels::Exec::Auto);

/// count penalties log-spaced from lambda_max*(1 - kGridTopOffset) down to
/// lambda_max*floor_ratio, strictly descending. count == 1 returns just the
/// top point.
Eigen::VectorXd lambda_grid(double lambda_max, int count, double floor_ratio);

/// Offset keeping the top of the grid strictly below lambda_max, so the
/// first fit sits just past the point where the path leaves zero.
inline constexpr double kGridTopOffset = 1e-6;

/// Warm-started solves down the grid. Solver errors propagate with the
/// offending lambda attached to the message.
SolutionPath solve_path(const LossModel& loss, const Problem& problem,
                        const Eigen::VectorXd& grid, const SolverConfig& config = {});

struct LambdaStar {
  double lambda = 0.0;
  MLassoFit fit;
};

/// Largest penalty whose fit has exactly k nonzero coefficients: grid search
/// followed by bisection against the neighboring grid point, to a lambda
/// tolerance of 1e-6 * lambda_max. Ties on the grid resolve to the largest
/// lambda. Throws NoSuchSparsity when the active-set size jumps over k
/// everywhere, InvalidArgument unless 1 <= k <= min(n, p).
LambdaStar find_lambda_for_k(const LossModel& loss, const Problem& problem, int k,
                             const SolverConfig& config = {}, int grid_count = 200,
                             double floor_ratio = 1e-3);

}  // namespace classo
