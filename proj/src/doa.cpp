#include "classo/doa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace classo {

namespace {

void check_ula(const UlaConfig& ula) {
  if (ula.sensors < 2) throw InvalidArgument("array needs at least 2 sensors");
  if (!(ula.spacing_wavelengths > 0.0) || !std::isfinite(ula.spacing_wavelengths)) {
    throw InvalidArgument("sensor spacing must be finite and positive");
  }
}

}  // namespace

AngularGrid AngularGrid::uniform(double start_deg, double step_deg, int count) {
  if (count < 1) throw InvalidArgument("angular grid needs at least one point");
  if (!(step_deg > 0.0)) throw InvalidArgument("angular grid step must be positive");
  AngularGrid grid;
  grid.angles_deg.resize(count);
  for (int i = 0; i < count; ++i) grid.angles_deg[i] = start_deg + step_deg * i;
  grid.validate();
  return grid;
}

void AngularGrid::validate() const {
  if (angles_deg.size() < 1) throw InvalidArgument("angular grid is empty");
  for (Eigen::Index i = 0; i < angles_deg.size(); ++i) {
    const double a = angles_deg[i];
    if (!std::isfinite(a) || a < -90.0 || a >= 90.0) {
      throw InvalidArgument("grid angle " + std::to_string(a) +
                            " lies outside [-90, 90) degrees");
    }
    if (i > 0 && !(a > angles_deg[i - 1])) {
      throw InvalidArgument("grid angles must be strictly increasing");
    }
  }
}

Eigen::VectorXcd array_response(const UlaConfig& ula, double theta_deg) {
  check_ula(ula);
  if (!std::isfinite(theta_deg) || theta_deg < -90.0 || theta_deg >= 90.0) {
    throw InvalidArgument("direction " + std::to_string(theta_deg) +
                          " lies outside [-90, 90) degrees");
  }
  const int n = ula.sensors;
  const double sine = std::sin(theta_deg * std::numbers::pi / 180.0);
  const double rate = -2.0 * std::numbers::pi * ula.spacing_wavelengths * sine;
  Eigen::VectorXcd a(n);
  for (int kk = 0; kk < n; ++kk) {
    const double phase = rate * kk;
    a[kk] = Complex(std::cos(phase), std::sin(phase));
  }
  return a;
}

Eigen::VectorXcd steering_vector(const UlaConfig& ula, double theta_deg) {
  Eigen::VectorXcd a = array_response(ula, theta_deg);
  a *= 1.0 / std::sqrt(static_cast<double>(ula.sensors));
  return a;
}

Eigen::MatrixXcd steering_matrix(const UlaConfig& ula, const AngularGrid& grid) {
  check_ula(ula);
  grid.validate();
  Eigen::MatrixXcd M(ula.sensors, grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    M.col(j) = steering_vector(ula, grid.angles_deg[j]);
  }
  return M;
}

DoaEstimate extract_doas(const MLassoFit& fit, const AngularGrid& grid, int k) {
  grid.validate();
  if (fit.coefficients.size() != grid.size()) {
    throw DimensionMismatch("fit has " + std::to_string(fit.coefficients.size()) +
                            " coefficients but the grid has " + std::to_string(grid.size()) +
                            " angles");
  }
  if (k < 1 || k > grid.size()) {
    throw InvalidArgument("k must lie in [1, " + std::to_string(grid.size()) + "]");
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(grid.size()));
  for (Eigen::Index j = 0; j < grid.size(); ++j) order[static_cast<size_t>(j)] = j;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(fit.coefficients[a]);
    const double mb = std::abs(fit.coefficients[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });

  Eigen::Index take = 0;
  while (take < k && fit.coefficients[order[static_cast<size_t>(take)]] != Complex(0.0, 0.0)) {
    ++take;
  }

  DoaEstimate est;
  est.complete = (take == k);
  est.angles_deg.resize(take);
  est.amplitudes.resize(take);
  est.source_coeffs.resize(take);
  for (Eigen::Index r = 0; r < take; ++r) {
    const Eigen::Index j = order[static_cast<size_t>(r)];
    est.angles_deg[r] = grid.angles_deg[j];
    est.amplitudes[r] = std::abs(fit.coefficients[j]);
    est.source_coeffs[r] = fit.coefficients[j];
  }
  return est;
}

Eigen::VectorXd correlation_spectrum(const LossModel& loss, const Problem& problem,
                                     const MLassoFit& fit, kernels::Exec exec) {
  const Eigen::VectorXcd epsi = pseudo_residual(loss, problem, fit.coefficients, fit.scale, exec);
  Eigen::VectorXcd g;
  kernels::adjoint_correlations(problem.matrix(), epsi, g, exec);
  return g.cwiseAbs();
}

}  // namespace classo
