#include "classo/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Each kernel mirrors its ref:: counterpart exactly: one thread owns one
// output element (or one reduction chunk) and runs the same inner loop in the
// same order, so serial and parallel results agree bitwise.

namespace classo::kernels {

namespace {

inline std::pair<Eigen::Index, Eigen::Index> chunk_bounds(Eigen::Index n, int k) {
  const auto lo = static_cast<Eigen::Index>((n * static_cast<long long>(k)) / kReductionChunks);
  const auto hi = static_cast<Eigen::Index>((n * static_cast<long long>(k + 1)) / kReductionChunks);
  return {lo, hi};
}

}  // namespace

bool parallel_available() {
#ifdef _OPENMP
  return omp_get_max_threads() > 1;
#else
  return false;
#endif
}

namespace omp {

void adjoint_correlations(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v,
                          Eigen::VectorXcd& out) {
  const Eigen::Index n = M.rows();
  const Eigen::Index p = M.cols();
  out.resize(p);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Eigen::Index j = 0; j < p; ++j) {
    const Complex* col = M.col(j).data();
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) acc += std::conj(col[i]) * v[i];
    out[j] = acc;
  }
}

void residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& s, const Eigen::VectorXcd& y,
              Eigen::VectorXcd& out) {
  const Eigen::Index n = M.rows();
  const Eigen::Index p = M.cols();
  out.resize(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex acc = y[i];
    for (Eigen::Index j = 0; j < p; ++j) {
      if (s[j] == Complex(0.0, 0.0)) continue;
      acc -= M(i, j) * s[j];
    }
    out[i] = acc;
  }
}

void pseudo_residual(const LossModel& loss, const Eigen::VectorXcd& e, double sigma,
                     Eigen::VectorXcd& out) {
  const Eigen::Index n = e.size();
  out.resize(n);
  if (!loss.is_huber()) {
    out = e;
    return;
  }
  const double clip = loss.c * sigma;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(e[i]);
    out[i] = (m <= clip) ? e[i] : e[i] * (clip / m);
  }
}

double chi_sum(const LossModel& loss, const Eigen::VectorXcd& e, double sigma) {
  const Eigen::Index n = e.size();
  double partial[kReductionChunks];
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < kReductionChunks; ++k) {
    const auto [lo, hi] = chunk_bounds(n, k);
    double acc = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) acc += chi(loss, std::abs(e[i]) / sigma);
    partial[k] = acc;
  }
  double total = 0.0;
  for (int k = 0; k < kReductionChunks; ++k) total += partial[k];
  return total;
}

}  // namespace omp
}  // namespace classo::kernels
