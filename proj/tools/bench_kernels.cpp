#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "classo/kernels.hpp"
#include "classo/rng.hpp"

using classo::Complex;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Timing {
  double serial = 0.0;
  double parallel = 0.0;
  bool identical = true;
};

bool bitwise_equal(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
  }
  return true;
}

void print_row(const char* name, const Timing& t, int reps) {
  const double speedup = t.parallel > 0.0 ? t.serial / t.parallel : 0.0;
  std::printf("%-22s %10.3f ms %10.3f ms %8.2fx   %s\n", name, 1e3 * t.serial / reps,
              1e3 * t.parallel / reps, speedup, t.identical ? "bitwise equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int n = 4096;
  int p = 512;
  int reps = 20;

  CLI::App app{"Timing comparison of the serial and OpenMP kernels"};
  app.add_option("--n", n, "Rows")->capture_default_str();
  app.add_option("--p", p, "Columns")->capture_default_str();
  app.add_option("--reps", reps, "Repetitions per kernel")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  classo::Rng rng(42);
  Eigen::MatrixXcd M(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) M(i, j) = rng.cnormal(1.0);
  Eigen::VectorXcd v(n), s(p), y(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.cnormal(1.0);
  for (Eigen::Index j = 0; j < p; ++j) s[j] = rng.cnormal(1.0);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.cnormal(1.0);
  const classo::LossModel huber = classo::LossModel::huber(1.3774);
  const double sigma = 0.7;

  std::printf("n=%d p=%d reps=%d, OpenMP %savailable\n\n", n, p, reps,
              classo::kernels::parallel_available() ? "" : "NOT ");
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  Eigen::VectorXcd out_a, out_b;
  double sink = 0.0;

  {
    Timing t;
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) classo::kernels::ref::adjoint_correlations(M, v, out_a);
    t.serial = seconds_since(start);
    start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) classo::kernels::omp::adjoint_correlations(M, v, out_b);
    t.parallel = seconds_since(start);
    t.identical = bitwise_equal(out_a, out_b);
    sink += std::abs(out_a[0]);
    print_row("adjoint_correlations", t, reps);
  }
  {
    Timing t;
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) classo::kernels::ref::residual(M, s, y, out_a);
    t.serial = seconds_since(start);
    start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) classo::kernels::omp::residual(M, s, y, out_b);
    t.parallel = seconds_since(start);
    t.identical = bitwise_equal(out_a, out_b);
    sink += std::abs(out_a[0]);
    print_row("residual", t, reps);
  }
  {
    Timing t;
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) classo::kernels::ref::pseudo_residual(huber, v, sigma, out_a);
    t.serial = seconds_since(start);
    start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) classo::kernels::omp::pseudo_residual(huber, v, sigma, out_b);
    t.parallel = seconds_since(start);
    t.identical = bitwise_equal(out_a, out_b);
    sink += std::abs(out_a[0]);
    print_row("pseudo_residual", t, reps);
  }
  {
    Timing t;
    double sum_a = 0.0, sum_b = 0.0;
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) sum_a = classo::kernels::ref::chi_sum(huber, v, sigma);
    t.serial = seconds_since(start);
    start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) sum_b = classo::kernels::omp::chi_sum(huber, v, sigma);
    t.parallel = seconds_since(start);
    t.identical = (sum_a == sum_b);
    sink += sum_a;
    print_row("chi_sum", t, reps);
  }

  std::printf("\nchecksum %.6g\n", sink);
  return 0;
}
