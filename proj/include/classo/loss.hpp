#pragma once

#include <cmath>
#include <complex>

#include "classo/errors.hpp"

namespace classo {

using Complex = std::complex<double>;

/// Complex signum: e/|e| for e != 0, and exactly 0 at the origin.
inline Complex ssgn(Complex e) {
  const double m = std::abs(e);
  if (m == 0.0) return Complex(0.0, 0.0);
  return e / m;
}

enum class LossKind { LeastSquares, Huber };

/// One loss family: the radial loss rho0, its score function psi, the
/// chi-function driving the scale equation, and the Fisher-consistency
/// factor alpha that makes the scale estimate consistent under
/// circular complex Gaussian noise.
///
/// Immutable value type; all member operations are pure and safe to call
/// concurrently from any number of threads.
struct LossModel {
  LossKind kind = LossKind::LeastSquares;
  double c = 0.0;      // Huber clipping threshold; unused for least squares
  double alpha = 1.0;  // E[chi(|e|)] for e ~ CN(0,1)

  static LossModel least_squares() { return LossModel{LossKind::LeastSquares, 0.0, 1.0}; }

  static LossModel huber(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw InvalidArgument("Huber threshold c must be positive and finite");
    LossModel m;
    m.kind = LossKind::Huber;
    m.c = c;
    m.alpha = 1.0 - std::exp(-c * c);
    return m;
  }

  static LossModel huber_from_q(double q);

  bool is_huber() const { return kind == LossKind::Huber; }
};

/// Clipping threshold c such that a fraction q of standardized CN(0,1)
/// residuals falls in the quadratic region: c^2 = (1/2) * Finv_chi2_2(q),
/// with the 2-dof quantile in closed form Finv(q) = -2*log(1-q).
inline double huber_threshold_from_q(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw InvalidArgument("q must lie in (0,1)");
  return std::sqrt(-std::log1p(-q));
}

inline LossModel LossModel::huber_from_q(double q) { return huber(huber_threshold_from_q(q)); }

/// Loss value rho(e) = rho0(|e|). Least squares: |e|^2. Huber: |e|^2 in the
/// quadratic region |e| <= c, linear 2c|e| - c^2 beyond. Both branches agree
/// at |e| = c; the closed condition evaluates the quadratic branch there.
inline double rho(const LossModel& loss, Complex e) {
  const double m = std::abs(e);
  if (loss.kind == LossKind::LeastSquares) return m * m;
  if (m <= loss.c) return m * m;
  return 2.0 * loss.c * m - loss.c * loss.c;
}

/// Score function psi(e) = (1/2) rho0'(|e|) ssgn(e). Identity for least
/// squares; for Huber a winsorizer clipping the modulus at c.
inline Complex psi(const LossModel& loss, Complex e) {
  if (loss.kind == LossKind::LeastSquares) return e;
  const double m = std::abs(e);
  if (m <= loss.c) return e;
  return (loss.c / m) * e;
}

/// chi(t) = rho0'(t) t - rho0(t) for t >= 0. Least squares: t^2.
/// Huber: t^2 capped at c^2, equivalently |psi(e)|^2 at t = |e|.
inline double chi(const LossModel& loss, double t) {
  if (loss.kind == LossKind::LeastSquares) return t * t;
  if (t <= loss.c) return t * t;
  return loss.c * loss.c;
}

/// Fisher-consistency factor alpha = E[chi(|e|)] for e ~ CN(0,1), i.e.
/// independent N(0, 1/2) real and imaginary parts. Least squares: exactly 1.
/// Huber(c): c^2 (1 - F2(2c^2)) + F4(2c^2) with chi-square CDFs in closed
/// form F2(x) = 1 - exp(-x/2) and F4(x) = 1 - exp(-x/2)(1 + x/2), which
/// collapses to 1 - exp(-c^2).
inline double consistency_factor(const LossModel& loss) {
  if (loss.kind == LossKind::LeastSquares) return 1.0;
  return 1.0 - std::exp(-loss.c * loss.c);
}

}  // namespace classo
