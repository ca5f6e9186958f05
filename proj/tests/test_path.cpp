#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "classo/errors.hpp"
#include "classo/path.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace classo;
namespace tu = classo::testutil;

namespace {

// Orthonormal fixture with exactly known path structure: M = I, so the LS
// fit is S_lambda(y) coordinatewise and active-set counts are readable off
// the moduli of y.
Problem identity_problem(const Eigen::VectorXcd& y) {
  return Problem(Eigen::MatrixXcd::Identity(y.size(), y.size()), y);
}

// Independent bisection on the null-model scale equation
// sum chi(|y_i|/sigma) = alpha n, used to cross-check the production route.
double bisect_null_scale(const LossModel& loss, const Eigen::VectorXcd& y) {
  double lo = 1e-9, hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) sum += chi(loss, std::abs(y[i]) / mid);
    (sum > loss.alpha * static_cast<double>(y.size()) ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("null model scale for least squares is the rms") {
  Rng rng(51);
  const Problem prob = tu::random_problem(rng, 16, 9);
  const double expected = prob.observation().norm() / 4.0;
  CHECK(std::abs(null_model_scale(LossModel::least_squares(), prob) - expected) < 1e-12);
}

TEST_CASE("null model scale for huber matches an independent bisection") {
  // frozen case: y = (1,1,1,100), c = 1.3774
  Eigen::VectorXcd y(4);
  y << Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(100, 0);
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
  const LossModel hub = LossModel::huber(1.3774);
  const double sigma = null_model_scale(hub, Problem(m, y));
  CHECK(std::abs(sigma - 1.4128786922681429) < 1e-9);

  // random cases against the test-side bisection
  Rng rng(52);
  for (int t = 0; t < 5; ++t) {
    const Problem prob = tu::random_problem(rng, 12, 6);
    const double got = null_model_scale(hub, prob);
    const double ref = bisect_null_scale(hub, prob.observation());
    CHECK(std::abs(got - ref) < 1e-8 * ref);
  }
}

TEST_CASE("huber null scale detects a saturated chi") {
  // one huge entry, rest zero: sup of sum chi is c^2 < alpha n, no root
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(8);
  y[0] = Complex(100.0, 0.0);
  Rng rng(53);
  const Problem prob(tu::random_unit_columns(rng, 8, 5), y);
  const LossModel hub = LossModel::huber(1.3774);
  CHECK_THROWS_AS(null_model_scale(hub, prob), DegenerateScale);
  CHECK_THROWS_AS(lambda_max(hub, prob), DegenerateScale);
}

TEST_CASE("lambda max closed form for least squares") {
  // psi = identity, so lambda_max = max |<m_j, y>| independent of scale
  Rng rng(54);
  const Problem prob = tu::random_problem(rng, 20, 30);
  const double expected = (prob.matrix().adjoint() * prob.observation()).cwiseAbs().maxCoeff();
  CHECK(std::abs(lambda_max(LossModel::least_squares(), prob) - expected) < 1e-12);
}

TEST_CASE("huber lambda max shrinks under an outlier") {
  Eigen::VectorXcd y = Eigen::VectorXcd::Ones(8);
  y[0] = Complex(100.0, 0.0);
  Rng rng(55);
  const Problem prob(tu::random_unit_columns(rng, 8, 12), y);
  const double ls = lambda_max(LossModel::least_squares(), prob);
  const double hub = lambda_max(LossModel::huber(1.3774), prob);
  CHECK(hub < ls);
  CHECK(hub > 0.0);
}

TEST_CASE("lambda grid shape") {
  const Eigen::VectorXd g = lambda_grid(10.0, 3, 0.01);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 10.0 * (1.0 - kGridTopOffset));
  CHECK(std::abs(g[2] - 0.1) < 1e-12);
  CHECK(std::abs(g[1] - std::sqrt(g[0] * g[2])) < 1e-9);  // log-spaced midpoint

  const Eigen::VectorXd single = lambda_grid(5.0, 1, 0.001);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 5.0 * (1.0 - kGridTopOffset));

  const Eigen::VectorXd dflt = lambda_grid(2.0, 200, 1e-3);
  REQUIRE(dflt.size() == 200);
  for (Eigen::Index i = 1; i < 200; ++i) CHECK(dflt[i] < dflt[i - 1]);
  CHECK(std::abs(dflt[199] - 2e-3) < 1e-15);

  CHECK_THROWS_AS(lambda_grid(1.0, 0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(lambda_grid(1.0, 10, 0.0), InvalidArgument);
  CHECK_THROWS_AS(lambda_grid(1.0, 10, 1.0), InvalidArgument);
  CHECK_THROWS_AS(lambda_grid(0.0, 10, 0.1), InvalidArgument);
}

TEST_CASE("solve path runs the grid with warm starts") {
  Rng rng(56);
  const Problem prob = tu::planted_problem(rng, 20, 36, 3, 0.05);
  const LossModel hub = LossModel::huber_from_q(0.85);
  const SolverConfig config;
  const double lmax = lambda_max(hub, prob);
  const Eigen::VectorXd grid = lambda_grid(lmax, 40, 1e-2);
  const SolutionPath path = solve_path(hub, prob, grid, config);

  REQUIRE(path.fits.size() == 40);
  CHECK(path.lambda_max == lmax);
  CHECK((path.lambdas - grid).cwiseAbs().maxCoeff() == 0.0);
  for (const MLassoFit& fit : path.fits) CHECK(fit.kkt.pass);

  // warm-started fits match cold solves
  for (Eigen::Index i : {0, 13, 39}) {
    const MLassoFit cold = ccd_solve(hub, prob, grid[i], config);
    const double tol =
        10.0 * config.coef_tol * std::max(1.0, cold.coefficients.cwiseAbs().maxCoeff());
    CHECK((path.fits[static_cast<size_t>(i)].coefficients - cold.coefficients)
              .cwiseAbs()
              .maxCoeff() < tol);
  }
}

TEST_CASE("solve path rejects bad grids") {
  Rng rng(57);
  const Problem prob = tu::random_problem(rng, 10, 6);
  const LossModel ls = LossModel::least_squares();
  CHECK_THROWS_AS(solve_path(ls, prob, Eigen::VectorXd(), SolverConfig{}), InvalidArgument);
  Eigen::VectorXd up(2);
  up << 0.1, 0.2;
  CHECK_THROWS_AS(solve_path(ls, prob, up, SolverConfig{}), InvalidArgument);
  Eigen::VectorXd neg(2);
  neg << 0.2, -0.1;
  CHECK_THROWS_AS(solve_path(ls, prob, neg, SolverConfig{}), InvalidArgument);
}

TEST_CASE("l1 norm shrinks as the penalty grows") {
  Rng rng(58);
  const Problem prob = tu::planted_problem(rng, 20, 36, 3, 0.05);
  for (const LossModel& loss : {LossModel::least_squares(), LossModel::huber_from_q(0.85)}) {
    const Eigen::VectorXd grid = lambda_grid(lambda_max(loss, prob), 50, 1e-3);
    const SolutionPath path = solve_path(loss, prob, grid, SolverConfig{});
    double prev = -1.0;
    for (const MLassoFit& fit : path.fits) {
      const double l1 = fit.coefficients.cwiseAbs().sum();
      CHECK(l1 >= prev - 1e-8 * std::max(1.0, l1));  // descending grid: l1 grows
      prev = l1;
    }
  }
}

// Refining the grid 2x moves each coordinate's activation penalty by at most
// one coarse spacing.
TEST_CASE("activation penalties are stable under grid refinement") {
  Rng rng(59);
  const Problem prob = tu::planted_problem(rng, 20, 36, 3, 0.02);
  const LossModel ls = LossModel::least_squares();
  const double lmax = lambda_max(ls, prob);
  const SolverConfig config;

  auto activations = [&](int count) {
    const Eigen::VectorXd grid = lambda_grid(lmax, count, 1e-2);
    const SolutionPath path = solve_path(ls, prob, grid, config);
    Eigen::VectorXd first = Eigen::VectorXd::Zero(prob.p());
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (path.fits[static_cast<size_t>(i)].coefficients[j] != Complex(0.0, 0.0)) {
          first[j] = grid[i];
          break;
        }
      }
    }
    return first;
  };

  const Eigen::VectorXd coarse = activations(80);
  const Eigen::VectorXd fine = activations(160);
  const double coarse_step = std::log(100.0) / 79.0;  // log spacing of the coarse grid
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    if (coarse[j] == 0.0 || fine[j] == 0.0) continue;  // activates on one grid only
    CHECK(std::abs(std::log(coarse[j]) - std::log(fine[j])) <= coarse_step * (1.0 + 1e-9));
  }
}

TEST_CASE("find lambda for k on an exactly solvable fixture") {
  Eigen::VectorXcd y(4);
  y << Complex(2, 0), Complex(2, 0), Complex(1, 0), Complex(0, 0);
  const Problem prob = identity_problem(y);
  const LossModel ls = LossModel::least_squares();
  // counts by construction: 0 for lambda >= 2, 2 on [1,2), 3 below 1

  SUBCASE("exact window boundary, k=2") {
    const LambdaStar star = find_lambda_for_k(ls, prob, 2);
    CHECK(star.lambda < 2.0);
    CHECK(star.lambda > 2.0 - 1e-4);
    CHECK(star.fit.nonzeros() == 2);
    CHECK(star.fit.coefficients[0] != Complex(0.0, 0.0));
    CHECK(star.fit.coefficients[1] != Complex(0.0, 0.0));
    CHECK(star.fit.coefficients[2] == Complex(0.0, 0.0));
  }

  SUBCASE("exact window boundary, k=3") {
    const LambdaStar star = find_lambda_for_k(ls, prob, 3);
    CHECK(star.lambda < 1.0);
    CHECK(star.lambda > 1.0 - 1e-4);
    CHECK(star.fit.nonzeros() == 3);
  }

  SUBCASE("count jumps over k=1") {
    CHECK_THROWS_WITH_AS(find_lambda_for_k(ls, prob, 1),
                         doctest::Contains("jumps over"), NoSuchSparsity);
  }

  SUBCASE("k out of range") {
    CHECK_THROWS_AS(find_lambda_for_k(ls, prob, 0), InvalidArgument);
    CHECK_THROWS_AS(find_lambda_for_k(ls, prob, -2), InvalidArgument);
    CHECK_THROWS_AS(find_lambda_for_k(ls, prob, 5), InvalidArgument);
  }
}

TEST_CASE("find lambda for k reports an unreachable count") {
  // third coordinate sits below the grid floor, so the path never reaches 3
  Eigen::VectorXcd y(4);
  y << Complex(2, 0), Complex(2, 0), Complex(1e-5, 0), Complex(0, 0);
  const Problem prob = identity_problem(y);
  CHECK_THROWS_WITH_AS(find_lambda_for_k(LossModel::least_squares(), prob, 3),
                       doctest::Contains("never reaches"), NoSuchSparsity);
}

TEST_CASE("find lambda for k on a generic problem") {
  Rng rng(60);
  const Problem prob = tu::planted_problem(rng, 20, 36, 3, 0.01);
  for (const LossModel& loss : {LossModel::least_squares(), LossModel::huber_from_q(0.85)}) {
    const LambdaStar star = find_lambda_for_k(loss, prob, 3);
    CHECK(star.fit.nonzeros() == 3);
    CHECK(star.fit.kkt.pass);
    CHECK(star.lambda > 0.0);
    CHECK(star.lambda < lambda_max(loss, prob));
    // nothing larger still yields 3 actives
    const MLassoFit above = ccd_solve(loss, prob, star.lambda * 1.01);
    CHECK(above.nonzeros() < 3);
  }
}
