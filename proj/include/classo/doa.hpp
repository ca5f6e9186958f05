#pragma once

#include <Eigen/Dense>

#include "classo/problem.hpp"
#include "classo/solver.hpp"

namespace classo {

/// Uniform linear array with half-wavelength element spacing by default.
struct UlaConfig {
  int sensors = 20;
  double spacing_wavelengths = 0.5;
};

/// Strictly increasing look directions in [-90, 90) degrees.
struct AngularGrid {
  Eigen::VectorXd angles_deg;

  /// count angles starting at start_deg with the given step.
  static AngularGrid uniform(double start_deg, double step_deg, int count);

  void validate() const;
  Eigen::Index size() const { return angles_deg.size(); }
};

/// Physical array response to a unit plane wave from theta: element k carries
/// phase -2*pi*spacing*k*sin(theta) at modulus one, so each sensor sees the
/// full source amplitude.
Eigen::VectorXcd array_response(const UlaConfig& ula, double theta_deg);

/// array_response scaled to unit Hermitian norm (1/sqrt(n)); the dictionary
/// column convention.
Eigen::VectorXcd steering_vector(const UlaConfig& ula, double theta_deg);

/// n x p matrix whose column i is the steering vector at grid angle i.
/// Columns are unit norm, so the result satisfies the Problem invariant.
Eigen::MatrixXcd steering_matrix(const UlaConfig& ula, const AngularGrid& grid);

/// Grid angles of the k largest-magnitude coefficients, ordered by
/// descending magnitude (ties to the lower grid index). complete is false
/// when fewer than k coefficients are nonzero; only nonzero coefficients are
/// reported.
struct DoaEstimate {
  Eigen::VectorXd angles_deg;
  Eigen::VectorXd amplitudes;       // |coefficient|, descending
  Eigen::VectorXcd source_coeffs;
  bool complete = true;
};

DoaEstimate extract_doas(const MLassoFit& fit, const AngularGrid& grid, int k);

/// |<m_j, e_psi>| per grid point, recomputed at the fit's (s, sigma). At a
/// valid fit the entries equal lambda on the active set and are bounded by
/// lambda off it.
Eigen::VectorXd correlation_spectrum(const LossModel& loss, const Problem& problem,
                                     const MLassoFit& fit,
                                     kernels::Exec exec = kernels::Exec::Auto);

}  // namespace classo
