#pragma once

#include <Eigen/Dense>

#include "classo/loss.hpp"

namespace classo::kernels {

/// Execution policy for the data-parallel kernels. Auto picks Parallel when
/// OpenMP is available and the operation is large enough to amortize thread
/// startup. Every parallel kernel is bit-identical to its serial reference:
/// work is split over independent output elements, and scalar reductions use
/// a fixed chunk decomposition whose combine order does not depend on the
/// thread count.
enum class Exec { Auto, Serial, Parallel };

/// Number of partial sums in deterministic scalar reductions. Fixed so that
/// results do not change with the number of threads.
inline constexpr int kReductionChunks = 64;

/// Serial reference implementations. These are the correctness baseline the
/// parallel versions are tested against.
namespace ref {

/// out[j] = <m_j, v> = m_j^H v for every column of M.
void adjoint_correlations(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v,
                          Eigen::VectorXcd& out);

/// out = y - M s.
void residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& s, const Eigen::VectorXcd& y,
              Eigen::VectorXcd& out);

/// out[i] = psi(e[i]/sigma) * sigma, elementwise.
void pseudo_residual(const LossModel& loss, const Eigen::VectorXcd& e, double sigma,
                     Eigen::VectorXcd& out);

/// sum_i chi(|e[i]| / sigma).
double chi_sum(const LossModel& loss, const Eigen::VectorXcd& e, double sigma);

}  // namespace ref

namespace omp {

void adjoint_correlations(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v,
                          Eigen::VectorXcd& out);
void residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& s, const Eigen::VectorXcd& y,
              Eigen::VectorXcd& out);
void pseudo_residual(const LossModel& loss, const Eigen::VectorXcd& e, double sigma,
                     Eigen::VectorXcd& out);
double chi_sum(const LossModel& loss, const Eigen::VectorXcd& e, double sigma);

}  // namespace omp

// Dispatching entry points used by the solver and the diagnostics.
void adjoint_correlations(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v,
                          Eigen::VectorXcd& out, Exec exec = Exec::Auto);
void residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& s, const Eigen::VectorXcd& y,
              Eigen::VectorXcd& out, Exec exec = Exec::Auto);
void pseudo_residual(const LossModel& loss, const Eigen::VectorXcd& e, double sigma,
                     Eigen::VectorXcd& out, Exec exec = Exec::Auto);
double chi_sum(const LossModel& loss, const Eigen::VectorXcd& e, double sigma,
               Exec exec = Exec::Auto);

/// Fused single pass <m_j, psi(e/sigma)*sigma> for one column; the hot inner
/// step of the coordinate sweep, serial by design (coordinates are a
/// sequential chain).
std::complex<double> psi_dot_column(const LossModel& loss, const Eigen::MatrixXcd& M,
                                    Eigen::Index j, const Eigen::VectorXcd& e, double sigma);

/// True when OpenMP was compiled in and more than one thread is available.
bool parallel_available();

}  // namespace classo::kernels
