#include "classo/kernels.hpp"

namespace classo::kernels {

namespace {

// Chunk bounds for the deterministic reduction: contiguous blocks, the same
// decomposition in the serial and parallel versions.
inline std::pair<Eigen::Index, Eigen::Index> chunk_bounds(Eigen::Index n, int k) {
  const auto lo = static_cast<Eigen::Index>((n * static_cast<long long>(k)) / kReductionChunks);
  const auto hi = static_cast<Eigen::Index>((n * static_cast<long long>(k + 1)) / kReductionChunks);
  return {lo, hi};
}

}  // namespace

namespace ref {

void adjoint_correlations(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v,
                          Eigen::VectorXcd& out) {
  const Eigen::Index n = M.rows();
  const Eigen::Index p = M.cols();
  out.resize(p);
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
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(e[i]);
    out[i] = (m <= clip) ? e[i] : e[i] * (clip / m);
  }
}

double chi_sum(const LossModel& loss, const Eigen::VectorXcd& e, double sigma) {
  const Eigen::Index n = e.size();
  double partial[kReductionChunks];
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

}  // namespace ref

std::complex<double> psi_dot_column(const LossModel& loss, const Eigen::MatrixXcd& M,
                                    Eigen::Index j, const Eigen::VectorXcd& e, double sigma) {
  const Eigen::Index n = M.rows();
  const Complex* col = M.col(j).data();
  Complex acc(0.0, 0.0);
  if (!loss.is_huber()) {
    for (Eigen::Index i = 0; i < n; ++i) acc += std::conj(col[i]) * e[i];
    return acc;
  }
  const double clip = loss.c * sigma;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(e[i]);
    const Complex ei = (m <= clip) ? e[i] : e[i] * (clip / m);
    acc += std::conj(col[i]) * ei;
  }
  return acc;
}

}  // namespace classo::kernels
