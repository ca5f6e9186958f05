#pragma once

#include <optional>

#include <Eigen/Dense>

#include "classo/kernels.hpp"
#include "classo/loss.hpp"
#include "classo/problem.hpp"

namespace classo {

struct SolverConfig {
  int max_sweeps = 10000;
  double coef_tol = 1e-7;    // convergence: max coordinate change, relative
  double scale_tol = 1e-7;   // convergence: relative scale change per sweep
  double kkt_tol = 1e-4;     // verification tolerance for the optimality report
  double sigma_floor = 1e-12;
  kernels::Exec exec = kernels::Exec::Auto;
};

/// Per-coordinate optimality report at a candidate solution. At a valid fit
/// the pseudo-residual correlations equal lambda in magnitude on the active
/// set and are bounded by lambda off it, and the scale equation residual
/// |mean chi - alpha| vanishes.
struct KktReport {
  Eigen::VectorXd correlations;    // |<m_j, e_psi>| per coordinate
  std::vector<bool> active;        // coefficient exactly nonzero
  double max_violation = 0.0;      // worst breach of the two magnitude rules
  double scale_residual = 0.0;     // | (1/n) sum chi(|r_i|/sigma) - alpha |
  double lambda = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct MLassoFit {
  Eigen::VectorXcd coefficients;
  double scale = 0.0;
  double lambda = 0.0;
  int sweeps = 0;         // full coordinate sweeps executed
  bool converged = false; // false: sweep budget exhausted, best iterate returned
  KktReport kkt;

  int nonzeros() const {
    int k = 0;
    for (Eigen::Index j = 0; j < coefficients.size(); ++j)
      if (coefficients[j] != Complex(0.0, 0.0)) ++k;
    return k;
  }
};

/// Warm-start state for the joint iteration. Any strictly positive sigma is
/// acceptable; the iteration is a fixed-point scheme.
struct WarmStart {
  Eigen::VectorXcd coefficients;
  double scale = 0.0;
};

/// Complex soft-threshold: ssgn(x) * (|x| - lambda)_+ . Preserves phase,
/// shrinks modulus, returns exact zero when |x| <= lambda.
inline Complex soft_threshold(Complex x, double lambda) {
  const double m = std::abs(x);
  if (m <= lambda) return Complex(0.0, 0.0);
  return x * ((m - lambda) / m);
}

/// Pseudo-residual psi((y - M s)/sigma) * sigma. Equals the raw residual for
/// the least-squares loss; for Huber, entries beyond c*sigma in modulus are
/// clipped back to that radius.
Eigen::VectorXcd pseudo_residual(const LossModel& loss, const Problem& problem,
                                 const Eigen::VectorXcd& s, double sigma,
                                 kernels::Exec exec = kernels::Exec::Auto);

/// One application of the scale update
///   sigma^2 <- sigma^2 / (alpha n) * sum_i chi(|r_i| / sigma).
/// Idempotent for the least-squares loss, where it returns the RMS residual.
/// Throws DegenerateScale when the update falls below sigma_floor.
double update_scale(const LossModel& loss, const Problem& problem, const Eigen::VectorXcd& s,
                    double sigma, double sigma_floor = 1e-12,
                    kernels::Exec exec = kernels::Exec::Auto);

/// Default scale start: median(|y_i|) / 0.6745 * (1/sqrt(2)), a crude robust
/// scale of the observation.
double initial_scale(const Eigen::VectorXcd& y);

/// Joint coefficient/scale solve for fixed lambda by cyclic coordinate
/// descent: scale update once per sweep, then soft-thresholded coordinate
/// updates s_j <- S_lambda(s_j + <m_j, e_psi>) with the pseudo-residual
/// refreshed before each coordinate. Single-threaded per problem instance;
/// independent solves may run concurrently.
MLassoFit ccd_solve(const LossModel& loss, const Problem& problem, double lambda,
                    const SolverConfig& config = {},
                    const std::optional<WarmStart>& init = std::nullopt);

/// Recomputes the pseudo-residual at (s, sigma) and evaluates the
/// per-coordinate optimality conditions and the scale equation residual.
KktReport kkt_check(const LossModel& loss, const Problem& problem, const MLassoFit& fit,
                    double tol, kernels::Exec exec = kernels::Exec::Auto);

}  // namespace classo
