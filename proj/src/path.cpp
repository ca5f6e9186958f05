#include "classo/path.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace classo {

namespace {

MLassoFit solve_warm(const LossModel& loss, const Problem& problem, double lambda,
                     const SolverConfig& config, const MLassoFit* warm) {
  std::optional<WarmStart> ws;
  if (warm != nullptr) ws = WarmStart{warm->coefficients, warm->scale};
  return ccd_solve(loss, problem, lambda, config, ws);
}

// Largest lambda with exactly k nonzeros inside (lo, hi), given count(lo) == k
// and count(hi) != k. Pushes lo upward by bisection; fit_lo always matches lo.
LambdaStar refine_upward(const LossModel& loss, const Problem& problem, const SolverConfig& config,
                         int k, double lo, MLassoFit fit_lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    bool hit = false;
    try {
      MLassoFit fit = solve_warm(loss, problem, mid, config, &fit_lo);
      if (fit.nonzeros() == k) {
        fit_lo = std::move(fit);
        lo = mid;
        hit = true;
      }
    } catch (const DegenerateScale&) {
      hit = false;
    }
    if (!hit) hi = mid;
  }
  LambdaStar out;
  out.lambda = lo;
  out.fit = std::move(fit_lo);
  return out;
}

}  // namespace

double null_model_scale(const LossModel& loss, const Problem& problem, kernels::Exec exec) {
  const Eigen::VectorXcd& y = problem.observation();
  const double n = static_cast<double>(problem.n());
  if (loss.is_huber()) {
    // chi is capped at c^2, so sum_i chi(|y_i|/sigma) <= c^2 * nnz(y) for every
    // sigma; at or below alpha*n the equation has no positive root.
    Eigen::Index nnz = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != Complex(0.0, 0.0)) ++nnz;
    const double supremum = loss.c * loss.c * static_cast<double>(nnz);
    if (supremum <= loss.alpha * n * (1.0 + 1e-12)) {
      throw DegenerateScale(
          "null_model_scale: chi saturates at " + std::to_string(supremum) +
          " <= alpha*n = " + std::to_string(loss.alpha * n) +
          "; the scale equation has no positive solution for this observation");
    }
  }
  double sigma = initial_scale(y);
  for (int it = 0; it < 10000; ++it) {
    const double chs = kernels::chi_sum(loss, y, sigma, exec);
    const double next = sigma * std::sqrt(chs / (loss.alpha * n));
    if (!(next > 0.0) || !std::isfinite(next)) {
      throw DegenerateScale("null_model_scale: scale iteration left (0, inf)");
    }
    const double rel = std::abs(next - sigma) / next;
    sigma = next;
    if (rel <= 1e-13) return sigma;
  }
  throw Error("null_model_scale: scale iteration did not converge");
}

double lambda_max(const LossModel& loss, const Problem& problem, kernels::Exec exec) {
  const double sigma0 = null_model_scale(loss, problem, exec);
  Eigen::VectorXcd epsi;
  kernels::pseudo_residual(loss, problem.observation(), sigma0, epsi, exec);
  Eigen::VectorXcd g;
  kernels::adjoint_correlations(problem.matrix(), epsi, g, exec);
  return g.cwiseAbs().maxCoeff();
}

Eigen::VectorXd lambda_grid(double lambda_max, int count, double floor_ratio) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw InvalidArgument("lambda_grid: lambda_max must be finite and positive");
  }
  if (count < 1) throw InvalidArgument("lambda_grid: count must be >= 1");
  if (!(floor_ratio > 0.0) || !(floor_ratio < 1.0)) {
    throw InvalidArgument("lambda_grid: floor_ratio must lie in (0, 1)");
  }
  const double top = lambda_max * (1.0 - kGridTopOffset);
  const double bottom = lambda_max * floor_ratio;
  if (!(bottom < top)) {
    throw InvalidArgument("lambda_grid: floor_ratio leaves no room below lambda_max");
  }
  Eigen::VectorXd grid(count);
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double log_top = std::log(top);
  const double log_bottom = std::log(bottom);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = std::exp((1.0 - t) * log_top + t * log_bottom);
  }
  grid[0] = top;
  grid[count - 1] = bottom;
  for (int i = 1; i < count; ++i) {
    if (!(grid[i] < grid[i - 1])) {
      throw InvalidArgument("lambda_grid: grid is too dense to stay strictly descending");
    }
  }
  return grid;
}

SolutionPath solve_path(const LossModel& loss, const Problem& problem, const Eigen::VectorXd& grid,
                        const SolverConfig& config) {
  if (grid.size() < 1) throw InvalidArgument("solve_path: empty grid");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw InvalidArgument("solve_path: grid entries must be finite and positive");
    }
    if (i > 0 && !(grid[i] < grid[i - 1])) {
      throw InvalidArgument("solve_path: grid must be strictly descending");
    }
  }
  SolutionPath path;
  path.lambda_max = lambda_max(loss, problem, config.exec);
  path.lambdas = grid;
  path.fits.reserve(static_cast<size_t>(grid.size()));
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const MLassoFit* warm = path.fits.empty() ? nullptr : &path.fits.back();
    try {
      path.fits.push_back(solve_warm(loss, problem, grid[i], config, warm));
    } catch (const DegenerateScale& err) {
      throw DegenerateScale("lambda=" + std::to_string(grid[i]) + ": " + err.what());
    }
  }
  return path;
}

namespace {

// Hunts an exact-k point inside (lo, hi) where the counts at the ends straddle
// k; returns the refined solution or nothing when the bracket collapses.
std::optional<LambdaStar> bisect_bracket(const LossModel& loss, const Problem& problem,
                                         const SolverConfig& config, int k, double lo,
                                         MLassoFit fit_lo, double hi, double tol) {
  const int lo_count = fit_lo.nonzeros();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    MLassoFit fit_mid;
    try {
      fit_mid = solve_warm(loss, problem, mid, config, &fit_lo);
    } catch (const DegenerateScale&) {
      return std::nullopt;
    }
    const int count_mid = fit_mid.nonzeros();
    if (count_mid == k) {
      return refine_upward(loss, problem, config, k, mid, std::move(fit_mid), hi, tol);
    }
    if ((count_mid > k) == (lo_count > k)) {
      lo = mid;
      fit_lo = std::move(fit_mid);
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

}  // namespace

LambdaStar find_lambda_for_k(const LossModel& loss, const Problem& problem, int k,
                             const SolverConfig& config, int grid_count, double floor_ratio) {
  const int k_cap = static_cast<int>(std::min(problem.n(), problem.p()));
  if (k < 1 || k > k_cap) {
    throw InvalidArgument("find_lambda_for_k: k must lie in [1, " + std::to_string(k_cap) + "]");
  }
  const double lmax = lambda_max(loss, problem, config.exec);
  const Eigen::VectorXd grid = lambda_grid(lmax, grid_count, floor_ratio);
  const double tol = 1e-6 * lmax;

  // Warm-started descent down the grid, stopping at the first (largest
  // lambda) exact hit. Whenever adjacent counts straddle k, the gap between
  // those grid points is bisected before descending further, so candidate
  // windows are examined in decreasing-lambda order. A scale collapse deep in
  // the grid only truncates the descent.
  std::optional<MLassoFit> prev;
  int prev_count = 0;  // count at lambda_max is zero by construction
  int max_count = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    MLassoFit fit;
    try {
      fit = solve_warm(loss, problem, grid[i], config, prev ? &*prev : nullptr);
    } catch (const DegenerateScale&) {
      if (i == 0) throw;
      break;
    }
    const int count = fit.nonzeros();
    max_count = std::max(max_count, count);
    const double hi = (i == 0) ? lmax : grid[i - 1];
    if (count == k) {
      return refine_upward(loss, problem, config, k, grid[i], std::move(fit), hi, tol);
    }
    if ((count > k) != (prev_count > k)) {
      MLassoFit lo_fit = fit;
      auto found = bisect_bracket(loss, problem, config, k, grid[i], std::move(lo_fit), hi, tol);
      if (found.has_value()) return std::move(*found);
    }
    prev = std::move(fit);
    prev_count = count;
  }

  if (max_count < k) {
    throw NoSuchSparsity("find_lambda_for_k: the path never reaches " + std::to_string(k) +
                         " nonzeros (max " + std::to_string(max_count) +
                         "); increase grid_count or lower floor_ratio");
  }
  throw NoSuchSparsity("find_lambda_for_k: the active-set size jumps over k = " +
                       std::to_string(k) + " everywhere on the path");
}

}  // namespace classo
