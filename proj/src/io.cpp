#include "classo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace classo::io {

namespace {

using nlohmann::json;

std::string read_text(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(file + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw ParseError(file + ": read failed");
  return buf.str();
}

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(file + ": cannot open for writing");
  out << text;
  if (!out.good()) throw Error(file + ": write failed");
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(where + ": " + err.what());
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing key \"" + key + "\"");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ParseError(where + ": key \"" + key + "\" is not a number");
  return v.get<double>();
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(where + ": expected a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::VectorXd real_vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError(where + "[" + std::to_string(i) + "]: expected a number");
    }
    out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return out;
}

json real_vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json complex_vector_to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

json scenario_json(const DoaScenario& scenario) {
  json j;
  j["format"] = "classo-scenario";
  j["version"] = 1;
  j["sensors"] = scenario.ula.sensors;
  j["spacing_wavelengths"] = scenario.ula.spacing_wavelengths;
  j["grid_angles_deg"] = real_vector_to_json(scenario.grid.angles_deg);
  j["true_doas_deg"] = real_vector_to_json(scenario.true_doas_deg);
  j["amplitudes"] = real_vector_to_json(scenario.amplitudes);
  j["snr_db"] = scenario.snr_db;
  if (scenario.corruption.has_value()) {
    j["corruption"] = {{"index", scenario.corruption->index},
                       {"factor", scenario.corruption->factor}};
  } else {
    j["corruption"] = nullptr;
  }
  j["seed"] = scenario.seed;
  return j;
}

json kkt_json(const KktReport& kkt) {
  json j;
  j["lambda"] = kkt.lambda;
  j["tol"] = kkt.tol;
  j["max_violation"] = kkt.max_violation;
  j["scale_residual"] = kkt.scale_residual;
  j["pass"] = kkt.pass;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Problem load_problem(const std::string& file, bool normalize_columns) {
  const json j = parse_json(read_text(file), file);
  const json& jm = require(j, "matrix", file);
  const json& jy = require(j, "y", file);
  if (!jm.is_array() || jm.empty()) throw ParseError(file + ": \"matrix\" must be a nonempty array");
  if (!jy.is_array()) throw ParseError(file + ": \"y\" must be an array");

  const auto n = static_cast<Eigen::Index>(jm.size());
  if (!jm[0].is_array() || jm[0].empty()) {
    throw ParseError(file + ": matrix[0] must be a nonempty array");
  }
  const auto p = static_cast<Eigen::Index>(jm[0].size());
  Eigen::MatrixXcd M(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = jm[static_cast<size_t>(i)];
    const std::string where = file + ": matrix[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != p) {
      throw ParseError(where + ": expected " + std::to_string(p) + " entries");
    }
    for (Eigen::Index jcol = 0; jcol < p; ++jcol) {
      M(i, jcol) = complex_from_json(row[static_cast<size_t>(jcol)],
                                     where + "[" + std::to_string(jcol) + "]");
    }
  }
  Eigen::VectorXcd y(static_cast<Eigen::Index>(jy.size()));
  for (size_t i = 0; i < jy.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] =
        complex_from_json(jy[i], file + ": y[" + std::to_string(i) + "]");
  }
  return normalize_columns ? Problem::with_normalized_columns(std::move(M), std::move(y))
                           : Problem(std::move(M), std::move(y));
}

void save_problem(const std::string& file, const Problem& problem) {
  json j;
  j["format"] = "classo-problem";
  j["version"] = 1;
  json rows = json::array();
  for (Eigen::Index i = 0; i < problem.n(); ++i) {
    json row = json::array();
    for (Eigen::Index jcol = 0; jcol < problem.p(); ++jcol) {
      row.push_back(complex_to_json(problem.matrix()(i, jcol)));
    }
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["y"] = complex_vector_to_json(problem.observation());
  write_text(file, dump(j));
}

void save_fit(const std::string& file, const MLassoFit& fit) {
  json j;
  j["format"] = "classo-fit";
  j["version"] = 1;
  j["lambda"] = fit.lambda;
  j["scale"] = fit.scale;
  j["sweeps"] = fit.sweeps;
  j["converged"] = fit.converged;
  j["nonzeros"] = fit.nonzeros();
  j["coefficients"] = complex_vector_to_json(fit.coefficients);
  j["kkt"] = kkt_json(fit.kkt);
  write_text(file, dump(j));
}

std::string scenario_to_json(const DoaScenario& scenario) { return dump(scenario_json(scenario)); }

DoaScenario scenario_from_json(const std::string& text) {
  const std::string where = "scenario";
  const json j = parse_json(text, where);
  DoaScenario scenario;
  scenario.ula.sensors = static_cast<int>(require_number(j, "sensors", where));
  scenario.ula.spacing_wavelengths = require_number(j, "spacing_wavelengths", where);
  scenario.grid.angles_deg = real_vector_from_json(require(j, "grid_angles_deg", where),
                                                   where + ": grid_angles_deg");
  scenario.true_doas_deg =
      real_vector_from_json(require(j, "true_doas_deg", where), where + ": true_doas_deg");
  scenario.amplitudes =
      real_vector_from_json(require(j, "amplitudes", where), where + ": amplitudes");
  scenario.snr_db = require_number(j, "snr_db", where);
  const json& jc = require(j, "corruption", where);
  if (!jc.is_null()) {
    Corruption corruption;
    corruption.index = static_cast<int>(require_number(jc, "index", where + ": corruption"));
    corruption.factor = require_number(jc, "factor", where + ": corruption");
    scenario.corruption = corruption;
  }
  const json& js = require(j, "seed", where);
  if (!js.is_number_integer() && !js.is_number_unsigned()) {
    throw ParseError(where + ": key \"seed\" is not an integer");
  }
  scenario.seed = js.get<std::uint64_t>();
  scenario.validate();
  return scenario;
}

void save_scenario(const std::string& file, const DoaScenario& scenario) {
  write_text(file, scenario_to_json(scenario));
}

DoaScenario load_scenario(const std::string& file) {
  try {
    return scenario_from_json(read_text(file));
  } catch (const ParseError& err) {
    throw ParseError(file + ": " + err.what());
  }
}

void save_path_csv(const std::string& file, const SolutionPath& path,
                   const std::vector<std::string>& coef_labels) {
  if (path.fits.size() != static_cast<size_t>(path.lambdas.size())) {
    throw DimensionMismatch("path has " + std::to_string(path.fits.size()) + " fits for " +
                            std::to_string(path.lambdas.size()) + " lambdas");
  }
  const Eigen::Index p = path.fits.empty() ? 0 : path.fits.front().coefficients.size();
  std::vector<std::string> labels = coef_labels;
  if (labels.empty()) {
    for (Eigen::Index j = 0; j < p; ++j) labels.push_back(std::to_string(j));
  }
  if (static_cast<Eigen::Index>(labels.size()) != p) {
    throw InvalidArgument("expected " + std::to_string(p) + " coefficient labels, got " +
                          std::to_string(labels.size()));
  }

  std::vector<double> l1(path.fits.size(), 0.0);
  double l1_max = 0.0;
  for (size_t r = 0; r < path.fits.size(); ++r) {
    l1[r] = path.fits[r].coefficients.cwiseAbs().sum();
    l1_max = std::max(l1_max, l1[r]);
  }

  std::ostringstream out;
  out << "lambda,l1_norm,l1_norm_rel,nonzeros";
  for (const auto& label : labels) out << ",abs_s_" << label;
  out << "\n";
  for (size_t r = 0; r < path.fits.size(); ++r) {
    const MLassoFit& fit = path.fits[r];
    const double rel = (l1_max > 0.0) ? l1[r] / l1_max : 0.0;
    out << format_double(path.lambdas[static_cast<Eigen::Index>(r)]) << ","
        << format_double(l1[r]) << "," << format_double(rel) << "," << fit.nonzeros();
    for (Eigen::Index j = 0; j < p; ++j) out << "," << format_double(std::abs(fit.coefficients[j]));
    out << "\n";
  }
  write_text(file, out.str());
}

void save_spectrum_csv(const std::string& file, const AngularGrid& grid,
                       const Eigen::VectorXd& spectrum, const MLassoFit& fit) {
  if (spectrum.size() != grid.size() || fit.coefficients.size() != grid.size()) {
    throw DimensionMismatch("spectrum, fit and grid sizes disagree");
  }
  std::ostringstream out;
  out << "angle_deg,correlation,active\n";
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const bool active = fit.coefficients[j] != Complex(0.0, 0.0);
    out << format_double(grid.angles_deg[j]) << "," << format_double(spectrum[j]) << ","
        << (active ? 1 : 0) << "\n";
  }
  write_text(file, out.str());
}

void save_doa_estimate(const std::string& file, const DoaEstimate& estimate, double lambda_star,
                       const MLassoFit& fit, const DoaScenario& scenario) {
  json j;
  j["format"] = "classo-doa-estimate";
  j["version"] = 1;
  j["angles_deg"] = real_vector_to_json(estimate.angles_deg);
  j["amplitudes"] = real_vector_to_json(estimate.amplitudes);
  j["coefficients"] = complex_vector_to_json(estimate.source_coeffs);
  j["complete"] = estimate.complete;
  j["lambda_star"] = lambda_star;
  j["scale"] = fit.scale;
  j["sweeps"] = fit.sweeps;
  j["converged"] = fit.converged;
  j["kkt"] = kkt_json(fit.kkt);
  j["scenario"] = scenario_json(scenario);
  write_text(file, dump(j));
}

void save_manifest(const std::string& file, const RunManifest& manifest) {
  json j;
  j["format"] = "classo-manifest";
  j["version"] = 1;
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["args"] = manifest.args;
  j["out_dir"] = manifest.out_dir;
  write_text(file, dump(j));
}

RunManifest load_manifest(const std::string& file) {
  const json j = parse_json(read_text(file), file);
  RunManifest manifest;
  const json& jt = require(j, "tool_version", file);
  const json& jc = require(j, "command", file);
  const json& ja = require(j, "args", file);
  const json& jo = require(j, "out_dir", file);
  if (!jt.is_string() || !jc.is_string() || !jo.is_string() || !ja.is_array()) {
    throw ParseError(file + ": malformed manifest fields");
  }
  manifest.tool_version = jt.get<std::string>();
  manifest.command = jc.get<std::string>();
  for (const auto& a : ja) {
    if (!a.is_string()) throw ParseError(file + ": manifest args must be strings");
    manifest.args.push_back(a.get<std::string>());
  }
  manifest.out_dir = jo.get<std::string>();
  return manifest;
}

}  // namespace classo::io
