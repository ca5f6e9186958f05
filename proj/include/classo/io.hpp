#pragma once

#include <string>
#include <vector>

#include "classo/path.hpp"
#include "classo/sim.hpp"
#include "classo/solver.hpp"

namespace classo::io {

/// Fixed decimal formatting contract for CSV output ("%.12g"); part of the
/// byte-for-byte reproducibility guarantee.
std::string format_double(double v);

/// Problem files are JSON: {"matrix": [[[re,im],...],...] row-major,
/// "y": [[re,im],...]}. Throws ParseError with the offending key/index in
/// the message.
Problem load_problem(const std::string& file, bool normalize_columns);
void save_problem(const std::string& file, const Problem& problem);

/// Fit files carry coefficients as [re,im] pairs plus scale, lambda,
/// iteration count and the optimality report.
void save_fit(const std::string& file, const MLassoFit& fit);

/// Scenario JSON schema used by the simulation commands.
std::string scenario_to_json(const DoaScenario& scenario);
DoaScenario scenario_from_json(const std::string& text);
DoaScenario load_scenario(const std::string& file);
void save_scenario(const std::string& file, const DoaScenario& scenario);

/// Path CSV: one row per grid point with columns
///   lambda, l1_norm, l1_norm_rel, nonzeros, abs_s_<label>...
/// l1_norm_rel is l1_norm divided by its maximum over the path.
void save_path_csv(const std::string& file, const SolutionPath& path,
                   const std::vector<std::string>& coef_labels = {});

/// Correlation spectrum CSV: angle_deg, correlation, active.
void save_spectrum_csv(const std::string& file, const AngularGrid& grid,
                       const Eigen::VectorXd& spectrum, const MLassoFit& fit);

/// Estimate JSON for one method/condition of the reproduction run.
void save_doa_estimate(const std::string& file, const DoaEstimate& estimate, double lambda_star,
                       const MLassoFit& fit, const DoaScenario& scenario);

/// Everything needed to re-run a command deterministically: tool version,
/// subcommand and its full argument list.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::string> args;
  std::string out_dir;
};

void save_manifest(const std::string& file, const RunManifest& manifest);
RunManifest load_manifest(const std::string& file);

}  // namespace classo::io
