#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "classo/doa.hpp"
#include "classo/path.hpp"
#include "classo/rng.hpp"

namespace classo {

/// Scale one observation's magnitude by factor, preserving its phase.
struct Corruption {
  int index = 0;
  double factor = 100.0;
};

/// Single-snapshot source scenario: on-grid or off-grid sources with fixed
/// amplitudes and uniformly random phases, circular complex Gaussian noise
/// at a target SNR, optional corruption. Generation is pure given the seed.
struct DoaScenario {
  UlaConfig ula;
  AngularGrid grid;
  Eigen::VectorXd true_doas_deg;
  Eigen::VectorXd amplitudes;
  double snr_db = 15.0;
  std::optional<Corruption> corruption;
  std::uint64_t seed = 0;

  /// Three sources at -5, 0 and 20 degrees with amplitudes 1, 0.6 and 0.2,
  /// SNR 15 dB, the 36-point 5-degree grid over [-90, 90).
  static DoaScenario standard(std::uint64_t seed, bool corrupted, int sensors = 20);

  void validate() const;
};

/// Generated snapshot plus the ground truth kept for evaluation.
struct SnapshotTruth {
  Eigen::VectorXd source_phases;
  double noise_sigma = 0.0;
  Eigen::VectorXcd clean_y;
};

struct Snapshot {
  Eigen::VectorXcd y;
  SnapshotTruth truth;
};

/// Noise scale for a target SNR: sigma^2 = mean(|s_k|^2) * 10^(-snr_db/10).
double noise_sigma_from_snr(const Eigen::VectorXd& amplitudes, double snr_db);

/// Draws source phases from Unif(0, 2*pi) in source order, then noise
/// entries CN(0, sigma^2) in sensor order, forms y from exact modulus-one
/// array responses at the true angles (each sensor sees the full source
/// amplitudes), and applies the corruption last. Deterministic given the
/// scenario seed.
std::pair<Problem, Snapshot> generate_snapshot(const DoaScenario& scenario);

struct TrialResult {
  bool success = false;           // estimated angle set equals the true set
  bool order_match = false;       // angles in magnitude order match the true order
  Eigen::VectorXd estimated_deg;  // by descending coefficient magnitude
  double lambda_star = 0.0;
  double scale = 0.0;
  int sweeps = 0;
  std::string failure_reason;     // nonempty when the penalty search failed
};

/// One end-to-end trial: generate, search the penalty for k active
/// coefficients, read the angles off the fit. A NoSuchSparsity from the
/// search is reported as a failed trial, not an error.
TrialResult run_trial(const DoaScenario& scenario, const LossModel& loss, int k,
                      const SolverConfig& config = {});

}  // namespace classo
