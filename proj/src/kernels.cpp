#include "classo/kernels.hpp"

namespace classo::kernels {

namespace {

// Work thresholds below which Auto stays serial; thread startup dominates for
// smaller operations.
constexpr long long kMatVecParallelCutoff = 1 << 15;
constexpr long long kVectorParallelCutoff = 1 << 14;

inline bool go_parallel(Exec exec, long long work, long long cutoff) {
  switch (exec) {
    case Exec::Serial:
      return false;
    case Exec::Parallel:
      return parallel_available();
    case Exec::Auto:
      break;
  }
  return parallel_available() && work >= cutoff;
}

}  // namespace

void adjoint_correlations(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v,
                          Eigen::VectorXcd& out, Exec exec) {
  const long long work = static_cast<long long>(M.rows()) * M.cols();
  if (go_parallel(exec, work, kMatVecParallelCutoff)) {
    omp::adjoint_correlations(M, v, out);
  } else {
    ref::adjoint_correlations(M, v, out);
  }
}

void residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& s, const Eigen::VectorXcd& y,
              Eigen::VectorXcd& out, Exec exec) {
  const long long work = static_cast<long long>(M.rows()) * M.cols();
  if (go_parallel(exec, work, kMatVecParallelCutoff)) {
    omp::residual(M, s, y, out);
  } else {
    ref::residual(M, s, y, out);
  }
}

void pseudo_residual(const LossModel& loss, const Eigen::VectorXcd& e, double sigma,
                     Eigen::VectorXcd& out, Exec exec) {
  if (go_parallel(exec, e.size(), kVectorParallelCutoff)) {
    omp::pseudo_residual(loss, e, sigma, out);
  } else {
    ref::pseudo_residual(loss, e, sigma, out);
  }
}

double chi_sum(const LossModel& loss, const Eigen::VectorXcd& e, double sigma, Exec exec) {
  if (go_parallel(exec, e.size(), kVectorParallelCutoff)) {
    return omp::chi_sum(loss, e, sigma);
  }
  return ref::chi_sum(loss, e, sigma);
}

}  // namespace classo::kernels
