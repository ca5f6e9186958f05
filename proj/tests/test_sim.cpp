#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "classo/errors.hpp"
#include "classo/sim.hpp"
#include "doctest.h"

using namespace classo;

TEST_CASE("standard scenario matches the reference setup") {
  const DoaScenario s = DoaScenario::standard(7, false);
  CHECK(s.ula.sensors == 20);
  CHECK(s.ula.spacing_wavelengths == 0.5);
  REQUIRE(s.grid.size() == 36);
  CHECK(s.grid.angles_deg[0] == -90.0);
  REQUIRE(s.true_doas_deg.size() == 3);
  CHECK(s.true_doas_deg[0] == -5.0);
  CHECK(s.true_doas_deg[1] == 0.0);
  CHECK(s.true_doas_deg[2] == 20.0);
  CHECK(s.amplitudes[0] == 1.0);
  CHECK(s.amplitudes[1] == 0.6);
  CHECK(s.amplitudes[2] == 0.2);
  CHECK(s.snr_db == 15.0);
  CHECK(s.seed == 7);
  CHECK_FALSE(s.corruption.has_value());

  const DoaScenario c = DoaScenario::standard(7, true);
  REQUIRE(c.corruption.has_value());
  CHECK(c.corruption->index == 0);
  CHECK(c.corruption->factor == 100.0);
}

TEST_CASE("scenario validation") {
  DoaScenario s = DoaScenario::standard(1, false);
  CHECK_NOTHROW(s.validate());

  DoaScenario dup = s;
  dup.true_doas_deg[1] = dup.true_doas_deg[0];
  CHECK_THROWS_AS(dup.validate(), InvalidArgument);

  DoaScenario amp = s;
  amp.amplitudes[2] = 0.0;
  CHECK_THROWS_AS(amp.validate(), InvalidArgument);

  DoaScenario oob = s;
  oob.true_doas_deg[2] = 95.0;
  CHECK_THROWS_AS(oob.validate(), InvalidArgument);

  DoaScenario snr = s;
  snr.snr_db = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(snr.validate(), InvalidArgument);

  DoaScenario corr = DoaScenario::standard(1, true);
  corr.corruption->index = 20;  // one past the last sensor
  CHECK_THROWS_AS(corr.validate(), InvalidArgument);
  corr.corruption->index = -1;
  CHECK_THROWS_AS(corr.validate(), InvalidArgument);
  corr.corruption->index = 0;
  corr.corruption->factor = 0.0;
  CHECK_THROWS_AS(corr.validate(), InvalidArgument);
}

TEST_CASE("noise sigma from snr") {
  Eigen::VectorXd amps(3);
  amps << 1.0, 0.6, 0.2;
  // mean power 7/15; frozen reference values
  CHECK(std::abs(noise_sigma_from_snr(amps, 15.0) - 0.12147961041859015) < 1e-15);
  CHECK(std::abs(noise_sigma_from_snr(amps, 15.0) - 0.1215) < 1e-4);
  CHECK(std::abs(noise_sigma_from_snr(amps, 0.0) - 0.6831300510639732) < 1e-15);

  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(std::abs(noise_sigma_from_snr(one, 20.0) - 0.1) < 1e-15);
  CHECK_THROWS_AS(noise_sigma_from_snr(Eigen::VectorXd(), 10.0), InvalidArgument);
}

TEST_CASE("snapshot generation is deterministic") {
  const DoaScenario s = DoaScenario::standard(13, true);
  const auto [prob_a, snap_a] = generate_snapshot(s);
  const auto [prob_b, snap_b] = generate_snapshot(s);
  REQUIRE(snap_a.y.size() == 20);
  for (Eigen::Index i = 0; i < 20; ++i) CHECK(snap_a.y[i] == snap_b.y[i]);
  for (Eigen::Index i = 0; i < 20; ++i)
    for (Eigen::Index j = 0; j < 36; ++j) CHECK(prob_a.matrix()(i, j) == prob_b.matrix()(i, j));
  CHECK(snap_a.truth.noise_sigma == snap_b.truth.noise_sigma);
  for (Eigen::Index k = 0; k < 3; ++k)
    CHECK(snap_a.truth.source_phases[k] == snap_b.truth.source_phases[k]);

  const auto [prob_c, snap_c] = generate_snapshot(DoaScenario::standard(14, true));
  CHECK((snap_a.y - snap_c.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("corruption scales one entry and preserves phase") {
  const DoaScenario clean = DoaScenario::standard(21, false);
  const DoaScenario corrupted = DoaScenario::standard(21, true);
  const auto [prob_a, snap_clean] = generate_snapshot(clean);
  const auto [prob_b, snap_corr] = generate_snapshot(corrupted);

  // same draws, entry 0 scaled by exactly 100
  CHECK(snap_corr.y[0] == snap_clean.y[0] * 100.0);
  for (Eigen::Index i = 1; i < 20; ++i) CHECK(snap_corr.y[i] == snap_clean.y[i]);
  CHECK(std::abs(ssgn(snap_corr.y[0]) - ssgn(snap_clean.y[0])) < 1e-15);
  CHECK(std::abs(std::abs(snap_corr.y[0]) - 100.0 * std::abs(snap_clean.y[0])) <
        1e-12 * std::abs(snap_corr.y[0]));
}

TEST_CASE("source phases are uniform draws in source order") {
  const auto [prob, snap] = generate_snapshot(DoaScenario::standard(31, false));
  REQUIRE(snap.truth.source_phases.size() == 3);
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(snap.truth.source_phases[k] >= 0.0);
    CHECK(snap.truth.source_phases[k] < 2.0 * M_PI);
  }
  // the clean snapshot is the phased sum of full-amplitude array responses
  const DoaScenario s = DoaScenario::standard(31, false);
  Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(20);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const Complex source =
        s.amplitudes[k] * std::exp(Complex(0.0, snap.truth.source_phases[k]));
    expected += source * array_response(s.ula, s.true_doas_deg[k]);
  }
  CHECK((snap.truth.clean_y - expected).cwiseAbs().maxCoeff() < 1e-12);
}

// Mean noise power over 10^4 draws lands within 2% of sigma^2.
TEST_CASE("empirical snr") {
  const double sigma = 0.12147961041859015;
  double sum = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto [prob, snap] = generate_snapshot(DoaScenario::standard(seed, false));
    const Eigen::VectorXcd noise = snap.y - snap.truth.clean_y;
    sum += noise.squaredNorm();
    count += static_cast<int>(noise.size());
  }
  REQUIRE(count == 10000);
  CHECK(std::abs(sum / count - sigma * sigma) < 0.02 * sigma * sigma);
}

TEST_CASE("trial on effectively noiseless data recovers the sources") {
  DoaScenario s = DoaScenario::standard(3, false);
  s.snr_db = 300.0;  // noise at machine-negligible level
  const TrialResult r = run_trial(s, LossModel::least_squares(), 3);
  CHECK(r.success);
  CHECK(r.order_match);
  REQUIRE(r.estimated_deg.size() == 3);
  CHECK(r.estimated_deg[0] == -5.0);
  CHECK(r.estimated_deg[1] == 0.0);
  CHECK(r.estimated_deg[2] == 20.0);
  CHECK(r.failure_reason.empty());
  CHECK(r.lambda_star > 0.0);
}

TEST_CASE("trial reports the huber clean-data reference result") {
  const TrialResult r = run_trial(DoaScenario::standard(1, false), LossModel::huber_from_q(0.85), 3);
  CHECK(r.success);
  CHECK(r.order_match);
  CHECK(r.scale > 0.0);
  CHECK(r.sweeps > 0);
}

// The robust fit keeps the clean-data active set when one observation is
// magnified: clean and corrupted trials with the same seed agree on the
// estimated angle set in at least 90% of 50 trials.
TEST_CASE("huber active set survives the corruption") {
  const LossModel hub = LossModel::huber_from_q(0.85);
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TrialResult clean = run_trial(DoaScenario::standard(seed, false), hub, 3);
    const TrialResult corr = run_trial(DoaScenario::standard(seed, true), hub, 3);
    if (clean.estimated_deg.size() != corr.estimated_deg.size()) continue;
    Eigen::VectorXd a = clean.estimated_deg;
    Eigen::VectorXd b = corr.estimated_deg;
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    if ((a - b).cwiseAbs().maxCoeff() < 1e-9) ++agree;
  }
  CHECK(agree >= 45);
}
