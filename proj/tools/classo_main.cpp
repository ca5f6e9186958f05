#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "classo/doa.hpp"
#include "classo/io.hpp"
#include "classo/path.hpp"
#include "classo/rng.hpp"
#include "classo/sim.hpp"
#include "classo/solver.hpp"
#include "classo/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitKkt = 4;
constexpr int kExitInvalid = 5;

// Shortest round-trip formatting for manifest arguments, so a re-run parses
// back the exact same value.
std::string fmt_arg(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct LossChoice {
  std::string kind;  // "ls" or "huber"
  classo::LossModel model;
  bool q_given = false;
  double q = 0.0;
};

struct CommonOpts {
  std::string loss = "";  // empty: command default
  double q = 0.85;
  double c = 0.0;
  bool q_set = false;
  bool c_set = false;
  std::string out = ".";
};

// Resolves one --loss/--q/--c combination. The threshold flags only make
// sense for the Huber loss.
LossChoice resolve_loss(const std::string& kind, const CommonOpts& opts) {
  if (opts.q_set && opts.c_set) {
    throw classo::InvalidArgument("--q and --c are mutually exclusive");
  }
  LossChoice choice;
  choice.kind = kind;
  if (kind == "ls") {
    if (opts.q_set || opts.c_set) {
      throw classo::InvalidArgument("--q/--c apply to the Huber loss only");
    }
    choice.model = classo::LossModel::least_squares();
    return choice;
  }
  if (kind != "huber") {
    throw classo::InvalidArgument("unknown loss \"" + kind + "\" (expected ls or huber)");
  }
  if (opts.c_set) {
    choice.model = classo::LossModel::huber(opts.c);
  } else {
    choice.model = classo::LossModel::huber_from_q(opts.q);
    choice.q_given = true;
    choice.q = opts.q;
  }
  return choice;
}

std::vector<std::string> loss_args(const LossChoice& choice) {
  std::vector<std::string> args{"--loss", choice.kind};
  if (choice.kind == "huber") {
    if (choice.q_given) {
      args.push_back("--q");
      args.push_back(fmt_arg(choice.q));
    } else {
      args.push_back("--c");
      args.push_back(fmt_arg(choice.model.c));
    }
  }
  return args;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    std::vector<std::string> args) {
  classo::io::RunManifest manifest;
  manifest.tool_version = CLASSO_VERSION_STRING;
  manifest.command = command;
  manifest.args = std::move(args);
  manifest.out_dir = out_dir;
  classo::io::save_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
}

std::string angles_text(const Eigen::VectorXd& angles) {
  std::string text = "(";
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    if (i > 0) text += ", ";
    text += classo::io::format_double(angles[i]);
  }
  return text + ")";
}

int env_thread_cap() {
  const char* raw = std::getenv("ROBUST_CLASSO_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || value < 1) {
    throw classo::InvalidArgument("ROBUST_CLASSO_THREADS must be a positive integer, got \"" +
                                  std::string(raw) + "\"");
  }
  return static_cast<int>(value);
}

struct SolveOpts {
  CommonOpts common;
  std::string input;
  double lambda = 0.0;
  bool normalize = false;
};

int cmd_solve(const SolveOpts& opts) {
  const LossChoice loss = resolve_loss(opts.common.loss.empty() ? "huber" : opts.common.loss,
                                       opts.common);
  const classo::Problem problem = classo::io::load_problem(opts.input, opts.normalize);
  const classo::MLassoFit fit = classo::ccd_solve(loss.model, problem, opts.lambda);

  fs::create_directories(opts.common.out);
  classo::io::save_fit((fs::path(opts.common.out) / "fit.json").string(), fit);
  std::vector<std::string> args{"--input", opts.input};
  for (auto& a : loss_args(loss)) args.push_back(a);
  args.push_back("--lambda");
  args.push_back(fmt_arg(opts.lambda));
  if (opts.normalize) args.push_back("--normalize");
  write_manifest(opts.common.out, "solve", std::move(args));

  std::cout << "lambda=" << classo::io::format_double(fit.lambda)
            << " nonzeros=" << fit.nonzeros()
            << " scale=" << classo::io::format_double(fit.scale) << " sweeps=" << fit.sweeps
            << " kkt_max_violation=" << classo::io::format_double(fit.kkt.max_violation)
            << " kkt=" << (fit.kkt.pass ? "pass" : "FAIL") << "\n";
  return fit.kkt.pass ? kExitOk : kExitKkt;
}

struct PathOpts {
  CommonOpts common;
  std::string input;
  int grid_count = 200;
  double grid_floor = 1e-3;
  bool normalize = false;
};

int cmd_path(const PathOpts& opts) {
  const LossChoice loss = resolve_loss(opts.common.loss.empty() ? "huber" : opts.common.loss,
                                       opts.common);
  const classo::Problem problem = classo::io::load_problem(opts.input, opts.normalize);
  const double lmax = classo::lambda_max(loss.model, problem);
  const Eigen::VectorXd grid = classo::lambda_grid(lmax, opts.grid_count, opts.grid_floor);
  const classo::SolutionPath path = classo::solve_path(loss.model, problem, grid);

  fs::create_directories(opts.common.out);
  classo::io::save_path_csv((fs::path(opts.common.out) / "path.csv").string(), path);
  std::vector<std::string> args{"--input", opts.input};
  for (auto& a : loss_args(loss)) args.push_back(a);
  args.push_back("--grid-count");
  args.push_back(std::to_string(opts.grid_count));
  args.push_back("--grid-floor");
  args.push_back(fmt_arg(opts.grid_floor));
  if (opts.normalize) args.push_back("--normalize");
  write_manifest(opts.common.out, "path", std::move(args));

  int kkt_failures = 0;
  for (const auto& fit : path.fits) {
    if (!fit.kkt.pass) ++kkt_failures;
  }
  std::cout << "lambda_max=" << classo::io::format_double(path.lambda_max)
            << " rows=" << path.fits.size() << " kkt_failures=" << kkt_failures << "\n";
  return kkt_failures == 0 ? kExitOk : kExitKkt;
}

struct DoaReproOpts {
  CommonOpts common;
  std::uint64_t seed = 1;
  int sensors = 20;
  int k = 3;
  int grid_count = 200;
  double grid_floor = 1e-3;
};

int cmd_doa_repro(const DoaReproOpts& opts) {
  std::vector<std::string> kinds;
  if (opts.common.loss.empty()) {
    kinds = {"ls", "huber"};
  } else {
    kinds = {opts.common.loss};
  }

  fs::create_directories(opts.common.out);
  const fs::path dir(opts.common.out);

  for (const char* condition : {"clean", "corrupted"}) {
    const bool corrupted = std::string(condition) == "corrupted";
    const classo::DoaScenario scenario =
        classo::DoaScenario::standard(opts.seed, corrupted, opts.sensors);
    classo::io::save_scenario((dir / ("scenario_" + std::string(condition) + ".json")).string(),
                              scenario);
  }

  for (const auto& kind : kinds) {
    const LossChoice loss = resolve_loss(kind, opts.common);
    for (const char* condition : {"clean", "corrupted"}) {
      const bool corrupted = std::string(condition) == "corrupted";
      const classo::DoaScenario scenario =
          classo::DoaScenario::standard(opts.seed, corrupted, opts.sensors);
      auto [problem, snapshot] = classo::generate_snapshot(scenario);

      const double lmax = classo::lambda_max(loss.model, problem);
      const Eigen::VectorXd grid = classo::lambda_grid(lmax, opts.grid_count, opts.grid_floor);
      const classo::SolutionPath path = classo::solve_path(loss.model, problem, grid);
      std::vector<std::string> labels;
      for (Eigen::Index j = 0; j < scenario.grid.size(); ++j) {
        labels.push_back(classo::io::format_double(scenario.grid.angles_deg[j]));
      }
      const std::string stem = kind + "_" + condition;
      classo::io::save_path_csv((dir / ("path_" + stem + ".csv")).string(), path, labels);

      const classo::LambdaStar star = classo::find_lambda_for_k(
          loss.model, problem, opts.k, classo::SolverConfig{}, opts.grid_count, opts.grid_floor);
      const Eigen::VectorXd spectrum =
          classo::correlation_spectrum(loss.model, problem, star.fit);
      classo::io::save_spectrum_csv((dir / ("spectrum_" + stem + ".csv")).string(), scenario.grid,
                                    spectrum, star.fit);
      const classo::DoaEstimate estimate = classo::extract_doas(star.fit, scenario.grid, opts.k);
      classo::io::save_doa_estimate((dir / ("estimate_" + stem + ".json")).string(), estimate,
                                    star.lambda, star.fit, scenario);

      std::cout << kind << " " << condition
                << ": lambda_star=" << classo::io::format_double(star.lambda)
                << " doas=" << angles_text(estimate.angles_deg) << " (descending |s|)\n";
    }
  }

  std::vector<std::string> args;
  if (!opts.common.loss.empty()) {
    for (auto& a : loss_args(resolve_loss(opts.common.loss, opts.common))) args.push_back(a);
  } else if (opts.common.q_set || opts.common.c_set) {
    for (auto& a : loss_args(resolve_loss("huber", opts.common))) {
      if (a != "--loss" && a != "huber") args.push_back(a);
    }
  }
  args.push_back("--seed");
  args.push_back(std::to_string(opts.seed));
  args.push_back("--sensors");
  args.push_back(std::to_string(opts.sensors));
  args.push_back("--k");
  args.push_back(std::to_string(opts.k));
  args.push_back("--grid-count");
  args.push_back(std::to_string(opts.grid_count));
  args.push_back("--grid-floor");
  args.push_back(fmt_arg(opts.grid_floor));
  write_manifest(opts.common.out, "doa-repro", std::move(args));
  return kExitOk;
}

struct MonteCarloOpts {
  CommonOpts common;
  int trials = 50;
  std::uint64_t seed = 1;
  bool corrupt = false;
  int sensors = 20;
  int k = 3;
};

int cmd_montecarlo(const MonteCarloOpts& opts) {
  if (opts.trials < 1) throw classo::InvalidArgument("--trials must be >= 1");
  std::vector<std::string> kinds;
  if (opts.common.loss.empty()) {
    kinds = {"ls", "huber"};
  } else {
    kinds = {opts.common.loss};
  }

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  const int cap = env_thread_cap();
  if (cap > 0) threads = std::min(threads, cap);
  threads = std::min(threads, opts.trials);

  json summary;
  summary["format"] = "classo-montecarlo";
  summary["version"] = 1;
  summary["trials"] = opts.trials;
  summary["k"] = opts.k;
  summary["corrupted"] = opts.corrupt;
  summary["master_seed"] = opts.seed;
  summary["sensors"] = opts.sensors;
  summary["scenario_template"] = json::parse(classo::io::scenario_to_json(
      classo::DoaScenario::standard(opts.seed, opts.corrupt, opts.sensors)));
  json per_loss = json::array();

  for (const auto& kind : kinds) {
    const LossChoice loss = resolve_loss(kind, opts.common);
    std::vector<classo::TrialResult> results(static_cast<size_t>(opts.trials));
    std::vector<std::string> errors(static_cast<size_t>(opts.trials));

    const auto start = std::chrono::steady_clock::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
#endif
    for (int t = 0; t < opts.trials; ++t) {
      try {
        const classo::DoaScenario scenario = classo::DoaScenario::standard(
            classo::derive_seed(opts.seed, static_cast<std::uint64_t>(t)), opts.corrupt,
            opts.sensors);
        results[static_cast<size_t>(t)] = classo::run_trial(scenario, loss.model, opts.k);
      } catch (const std::exception& err) {
        errors[static_cast<size_t>(t)] = err.what();
      }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& err : errors) {
      if (!err.empty()) throw classo::Error("montecarlo trial failed: " + err);
    }

    int successes = 0;
    int order_matches = 0;
    int search_failures = 0;
    int fitted = 0;
    double scale_sum = 0.0;
    long long sweep_sum = 0;
    for (const auto& r : results) {
      if (!r.failure_reason.empty()) {
        ++search_failures;
        continue;
      }
      ++fitted;
      scale_sum += r.scale;
      sweep_sum += r.sweeps;
      if (r.success) ++successes;
      if (r.order_match) ++order_matches;
    }

    json row;
    row["loss"] = kind;
    if (kind == "huber") {
      row["c"] = loss.model.c;
      if (loss.q_given) row["q"] = loss.q;
    }
    row["successes"] = successes;
    row["order_matches"] = order_matches;
    row["search_failures"] = search_failures;
    row["fitted"] = fitted;
    row["success_rate"] = static_cast<double>(successes) / opts.trials;
    row["order_match_rate"] = static_cast<double>(order_matches) / opts.trials;
    row["mean_scale"] = fitted > 0 ? scale_sum / fitted : 0.0;
    row["mean_sweeps"] = fitted > 0 ? static_cast<double>(sweep_sum) / fitted : 0.0;
    row["total_sweeps"] = sweep_sum;
    per_loss.push_back(std::move(row));

    std::cout << kind << ": success " << successes << "/" << opts.trials << ", order "
              << order_matches << "/" << opts.trials << ", search failures " << search_failures
              << ", " << classo::io::format_double(elapsed) << " s, " << threads
              << (threads == 1 ? " thread\n" : " threads\n");
  }
  summary["results"] = std::move(per_loss);

  fs::create_directories(opts.common.out);
  {
    std::ofstream out(fs::path(opts.common.out) / "summary.json", std::ios::binary);
    if (!out) throw classo::Error("cannot write summary.json");
    out << summary.dump(2) << "\n";
  }
  std::vector<std::string> args;
  if (!opts.common.loss.empty()) {
    for (auto& a : loss_args(resolve_loss(opts.common.loss, opts.common))) args.push_back(a);
  } else if (opts.common.q_set || opts.common.c_set) {
    for (auto& a : loss_args(resolve_loss("huber", opts.common))) {
      if (a != "--loss" && a != "huber") args.push_back(a);
    }
  }
  args.push_back("--trials");
  args.push_back(std::to_string(opts.trials));
  args.push_back("--seed");
  args.push_back(std::to_string(opts.seed));
  if (opts.corrupt) args.push_back("--corrupt");
  args.push_back("--sensors");
  args.push_back(std::to_string(opts.sensors));
  args.push_back("--k");
  args.push_back(std::to_string(opts.k));
  write_manifest(opts.common.out, "montecarlo", std::move(args));
  return kExitOk;
}

void add_loss_flags(CLI::App* sub, CommonOpts& common) {
  sub->add_option("--loss", common.loss, "Loss function: ls or huber")
      ->check(CLI::IsMember({"ls", "huber"}));
  sub->add_option("--q", common.q, "Huber clipping quantile in (0, 1)")
      ->each([&common](const std::string&) { common.q_set = true; });
  sub->add_option("--c", common.c, "Huber threshold (overrides --q)")
      ->each([&common](const std::string&) { common.c_set = true; });
  sub->add_option("--out", common.out, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex M-Lasso solver and single-snapshot DoA experiment driver"};
  app.set_version_flag("--version", CLASSO_VERSION_STRING);
  app.require_subcommand(1);

  SolveOpts solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "Solve one problem file at a fixed lambda");
  add_loss_flags(solve, solve_opts.common);
  solve->add_option("--input", solve_opts.input, "Problem JSON file")->required();
  solve->add_option("--lambda", solve_opts.lambda, "Penalty level")->required();
  solve->add_flag("--normalize", solve_opts.normalize, "Rescale matrix columns to unit norm");

  PathOpts path_opts;
  CLI::App* path = app.add_subcommand("path", "Solve a full penalty path for one problem file");
  add_loss_flags(path, path_opts.common);
  path->add_option("--input", path_opts.input, "Problem JSON file")->required();
  path->add_option("--grid-count", path_opts.grid_count, "Grid size")->capture_default_str();
  path->add_option("--grid-floor", path_opts.grid_floor, "Bottom of the grid as a fraction of lambda_max")
      ->capture_default_str();
  path->add_flag("--normalize", path_opts.normalize, "Rescale matrix columns to unit norm");

  DoaReproOpts repro_opts;
  CLI::App* repro = app.add_subcommand(
      "doa-repro", "Reproduce the single-snapshot experiment: paths, spectra and estimates for "
                   "clean and corrupted data");
  add_loss_flags(repro, repro_opts.common);
  repro->add_option("--seed", repro_opts.seed, "Scenario seed")->capture_default_str();
  repro->add_option("--sensors", repro_opts.sensors, "Array size")->capture_default_str();
  repro->add_option("--k", repro_opts.k, "Number of sources to recover")->capture_default_str();
  repro->add_option("--grid-count", repro_opts.grid_count, "Grid size")->capture_default_str();
  repro->add_option("--grid-floor", repro_opts.grid_floor, "Bottom of the grid as a fraction of lambda_max")
      ->capture_default_str();

  MonteCarloOpts mc_opts;
  CLI::App* mc = app.add_subcommand("montecarlo", "Run repeated seeded trials and report rates");
  add_loss_flags(mc, mc_opts.common);
  mc->add_option("--trials", mc_opts.trials, "Number of trials")->capture_default_str();
  mc->add_option("--seed", mc_opts.seed, "Master seed; trial seeds derive from it")
      ->capture_default_str();
  mc->add_flag("--corrupt", mc_opts.corrupt, "Corrupt the first sensor by a factor of 100");
  mc->add_option("--sensors", mc_opts.sensors, "Array size")->capture_default_str();
  mc->add_option("--k", mc_opts.k, "Number of sources to recover")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (app.got_subcommand(solve)) return cmd_solve(solve_opts);
    if (app.got_subcommand(path)) return cmd_path(path_opts);
    if (app.got_subcommand(repro)) return cmd_doa_repro(repro_opts);
    if (app.got_subcommand(mc)) return cmd_montecarlo(mc_opts);
  } catch (const classo::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitParse;
  } catch (const classo::InvalidArgument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalid;
  } catch (const classo::DimensionMismatch& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalid;
  } catch (const classo::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return kExitOk;
}
