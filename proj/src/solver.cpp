#include "classo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace classo {

namespace {

void check_sigma_positive(double sigma, const char* who) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument(std::string(who) + ": scale must be strictly positive and finite");
  }
}

void check_coefficients(const Problem& problem, const Eigen::VectorXcd& s, const char* who) {
  if (s.size() != problem.p()) {
    throw DimensionMismatch(std::string(who) + ": coefficient length " + std::to_string(s.size()) +
                            " does not match p = " + std::to_string(problem.p()));
  }
  if (!s.allFinite()) throw InvalidArgument(std::string(who) + ": non-finite coefficients");
}

}  // namespace

Eigen::VectorXcd pseudo_residual(const LossModel& loss, const Problem& problem,
                                 const Eigen::VectorXcd& s, double sigma, kernels::Exec exec) {
  check_sigma_positive(sigma, "pseudo_residual");
  check_coefficients(problem, s, "pseudo_residual");
  Eigen::VectorXcd e;
  kernels::residual(problem.matrix(), s, problem.observation(), e, exec);
  Eigen::VectorXcd out;
  kernels::pseudo_residual(loss, e, sigma, out, exec);
  return out;
}

double update_scale(const LossModel& loss, const Problem& problem, const Eigen::VectorXcd& s,
                    double sigma, double sigma_floor, kernels::Exec exec) {
  check_sigma_positive(sigma, "update_scale");
  check_coefficients(problem, s, "update_scale");
  Eigen::VectorXcd e;
  kernels::residual(problem.matrix(), s, problem.observation(), e, exec);
  const double chs = kernels::chi_sum(loss, e, sigma, exec);
  const double next = sigma * std::sqrt(chs / (loss.alpha * static_cast<double>(problem.n())));
  if (!(next >= sigma_floor)) {
    throw DegenerateScale("scale update fell below " + std::to_string(sigma_floor) +
                          "; residuals are (numerically) zero or the scale equation degenerates");
  }
  return next;
}

double initial_scale(const Eigen::VectorXcd& y) {
  const Eigen::Index n = y.size();
  if (n < 1) throw InvalidArgument("initial_scale: empty observation");
  std::vector<double> mags(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) mags[static_cast<size_t>(i)] = std::abs(y[i]);
  std::sort(mags.begin(), mags.end());
  const size_t half = mags.size() / 2;
  double med = (mags.size() % 2 == 1) ? mags[half] : 0.5 * (mags[half - 1] + mags[half]);
  if (med == 0.0) {
    // More than half the entries vanish; fall back to the mean modulus so any
    // nonzero observation still yields a positive start.
    double mean = 0.0;
    for (double m : mags) mean += m;
    med = mean / static_cast<double>(n);
  }
  if (!(med > 0.0)) throw DegenerateScale("initial_scale: observation is identically zero");
  return med / 0.6745 * (1.0 / std::sqrt(2.0));
}

MLassoFit ccd_solve(const LossModel& loss, const Problem& problem, double lambda,
                    const SolverConfig& config, const std::optional<WarmStart>& init) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("ccd_solve: lambda must be finite and nonnegative");
  }
  if (lambda == 0.0 && problem.n() <= problem.p()) {
    throw InvalidArgument("ccd_solve: lambda = 0 requires n > p (unpenalized fit is ill-posed)");
  }
  if (config.max_sweeps < 1) throw InvalidArgument("ccd_solve: max_sweeps must be >= 1");

  const Eigen::MatrixXcd& M = problem.matrix();
  const Eigen::Index n = problem.n();
  const Eigen::Index p = problem.p();

  Eigen::VectorXcd s;
  double sigma;
  if (init.has_value()) {
    check_coefficients(problem, init->coefficients, "ccd_solve warm start");
    check_sigma_positive(init->scale, "ccd_solve warm start");
    s = init->coefficients;
    sigma = init->scale;
  } else {
    s = Eigen::VectorXcd::Zero(p);
    sigma = initial_scale(problem.observation());
  }

  // Raw residual e = y - M s, maintained incrementally across coordinate
  // updates; the psi transform is applied on demand per coordinate.
  Eigen::VectorXcd e;
  kernels::residual(M, s, problem.observation(), e, config.exec);

  bool converged = false;
  int sweeps_done = 0;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    sweeps_done = sweep;

    const double chs = kernels::chi_sum(loss, e, sigma, config.exec);
    const double sigma_next = sigma * std::sqrt(chs / (loss.alpha * static_cast<double>(n)));
    if (!(sigma_next >= config.sigma_floor)) {
      throw DegenerateScale("ccd_solve: scale collapsed below sigma_floor at sweep " +
                            std::to_string(sweep));
    }
    const double sigma_delta = std::abs(sigma_next - sigma) / sigma_next;
    sigma = sigma_next;

    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Complex g = kernels::psi_dot_column(loss, M, j, e, sigma);
      const Complex next = soft_threshold(s[j] + g, lambda);
      const Complex delta = next - s[j];
      if (delta != Complex(0.0, 0.0)) {
        e -= M.col(j) * delta;
        s[j] = next;
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }

    double s_max = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) s_max = std::max(s_max, std::abs(s[j]));
    if (max_delta <= config.coef_tol * std::max(1.0, s_max) && sigma_delta <= config.scale_tol) {
      converged = true;
      break;
    }
  }

  MLassoFit fit;
  fit.coefficients = std::move(s);
  fit.scale = sigma;
  fit.lambda = lambda;
  fit.sweeps = sweeps_done;
  fit.converged = converged;
  fit.kkt = kkt_check(loss, problem, fit, config.kkt_tol, config.exec);
  return fit;
}

KktReport kkt_check(const LossModel& loss, const Problem& problem, const MLassoFit& fit,
                    double tol, kernels::Exec exec) {
  check_sigma_positive(fit.scale, "kkt_check");
  check_coefficients(problem, fit.coefficients, "kkt_check");
  if (!(tol >= 0.0)) throw InvalidArgument("kkt_check: tol must be nonnegative");

  Eigen::VectorXcd e;
  kernels::residual(problem.matrix(), fit.coefficients, problem.observation(), e, exec);
  Eigen::VectorXcd epsi;
  kernels::pseudo_residual(loss, e, fit.scale, epsi, exec);
  Eigen::VectorXcd g;
  kernels::adjoint_correlations(problem.matrix(), epsi, g, exec);

  KktReport report;
  report.lambda = fit.lambda;
  report.tol = tol;
  report.correlations = g.cwiseAbs();
  report.active.resize(static_cast<size_t>(problem.p()));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < problem.p(); ++j) {
    const bool active = fit.coefficients[j] != Complex(0.0, 0.0);
    report.active[static_cast<size_t>(j)] = active;
    const double corr = report.correlations[j];
    const double violation =
        active ? std::abs(corr - fit.lambda) : std::max(corr - fit.lambda, 0.0);
    worst = std::max(worst, violation);
  }
  report.max_violation = worst;

  const double chs = kernels::chi_sum(loss, e, fit.scale, exec);
  report.scale_residual = std::abs(chs / static_cast<double>(problem.n()) - loss.alpha);
  report.pass = report.max_violation <= tol && report.scale_residual <= tol;
  return report;
}

}  // namespace classo
