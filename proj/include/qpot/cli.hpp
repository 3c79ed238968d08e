#pragma once

// Scenario runner behind the `qpot` tool. Every scenario reads a key-value
// config, produces its artifacts in memory and then writes them together with
// manifest.json (inputs, versions, seed, config hash, per-file digests) and
// timings.json. Everything except timings.json is byte-identical on rerun.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>
#include <Eigen/Core>
#include <json.hpp>

#include "qpot/coeffs.hpp"
#include "qpot/config.hpp"
#include "qpot/dynamics.hpp"
#include "qpot/elcheck.hpp"
#include "qpot/io.hpp"
#include "qpot/parser.hpp"
#include "qpot/qpotential.hpp"
#include "qpot/spectra.hpp"

namespace qpot::cli {

namespace fs = std::filesystem;
using io::json;
using grid::GridFunction;

inline constexpr const char* version = "1.0.0";

class CliError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { verify_el, coefficients, box, hydrogen, evolve, ratios };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::verify_el: return "verify-el";
    case Scenario::coefficients: return "coefficients";
    case Scenario::box: return "box";
    case Scenario::hydrogen: return "hydrogen";
    case Scenario::evolve: return "evolve";
    case Scenario::ratios: return "ratios";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& name) {
  for (auto s : {Scenario::verify_el, Scenario::coefficients, Scenario::box, Scenario::hydrogen, Scenario::evolve,
                 Scenario::ratios}) {
    if (name == to_string(s)) {
      return s;
    }
  }
  throw CliError("unknown scenario '" + name +
                 "' (expected verify-el, coefficients, box, hydrogen, evolve or ratios)");
}

struct Artifact {
  std::string name;
  std::string text;
};

struct ScenarioOutput {
  std::vector<Artifact> artifacts;
  json summary = json::object();
};

/// Parsed run configuration. Command-line overrides are applied before hashing.
struct RunConfig {
  Scenario scenario = Scenario::coefficients;
  std::uint64_t seed = 1;
  fs::path out_dir;
  config::KeyValues kv;
  /// Separate spec file named by the `spec` key, if any.
  std::optional<config::KeyValues> spec_kv;
  std::string spec_text;
  std::string spec_path;
  std::string config_hash;
  /// Config path for diagnostics; empty for in-memory text.
  std::string source;
};

struct Overrides {
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_dir;
};

inline RunConfig make_run_config(const std::string& text, const fs::path& base_dir, const Overrides& o = {}) {
  RunConfig rc;
  rc.kv = config::KeyValues::parse(text);
  std::string scenario = rc.kv.get("scenario", "");
  if (o.scenario) {
    scenario = *o.scenario;
  }
  if (scenario.empty()) {
    throw config::ConfigError("missing key 'scenario'");
  }
  rc.scenario = parse_scenario(scenario);
  const long long seed = rc.kv.get_int("seed", 1);
  if (seed < 0) {
    throw rc.kv.error_at("seed", "seed must be non-negative");
  }
  rc.seed = o.seed ? *o.seed : static_cast<std::uint64_t>(seed);
  const std::string out = rc.kv.get("out", "");
  rc.out_dir = o.out_dir ? *o.out_dir : fs::path(out);
  if (rc.kv.has("spec")) {
    fs::path p = rc.kv.require("spec");
    if (p.is_relative()) {
      p = base_dir / p;
    }
    rc.spec_text = io::read_text(p);
    rc.spec_path = p.string();
    try {
      rc.spec_kv = config::KeyValues::parse(rc.spec_text);
    } catch (const config::ConfigError& e) {
      throw config::ConfigError(p.string() + ": " + e.what());
    }
  }

  // Canonical form: sorted keys with overrides applied; `out` and `spec` (a path) are excluded.
  std::string canonical;
  for (const auto& [k, e] : rc.kv.entries()) {
    if (k == "out" || k == "spec" || k == "scenario" || k == "seed") {
      continue;
    }
    canonical += k + "=" + e.value + "\n";
  }
  canonical += std::string("scenario=") + to_string(rc.scenario) + "\nseed=" + std::to_string(rc.seed) + "\n";
  if (rc.spec_kv) {
    for (const auto& [k, e] : rc.spec_kv->entries()) {
      canonical += "spec." + k + "=" + e.value + "\n";
    }
  }
  rc.config_hash = io::content_hash(canonical);
  return rc;
}

inline RunConfig load_run_config(const fs::path& path, const Overrides& o = {}) {
  try {
    auto rc = make_run_config(io::read_text(path), path.parent_path(), o);
    rc.source = path.string();
    return rc;
  } catch (const config::ConfigError& e) {
    throw config::ConfigError(path.string() + ": " + e.what());
  }
}

namespace detail {

inline std::string fmt(double x) { return io::format_double(x); }

/// Spec keys come from the separate spec file when given, otherwise from the config itself.
inline SpecFile load_spec(const RunConfig& rc) {
  if (!rc.spec_kv) {
    return spec_from_config(rc.kv);
  }
  try {
    auto s = spec_from_config(*rc.spec_kv);
    rc.spec_kv->reject_unknown();
    return s;
  } catch (const config::ConfigError& e) {
    throw CliError(rc.spec_path + ": " + e.what());
  }
}

inline json spec_json(const SpecFile& s) {
  json terms = json::array();
  for (const auto& t : s.spec.terms) {
    json j;
    j["order"] = t.order;
    j["a"] = to_fraction_string(t.a);
    j["prefactor"] = prefactor(t, s.params);
    terms.push_back(j);
  }
  json out;
  out["units"] = s.units;
  out["terms"] = terms;
  out["truncation_order"] = s.spec.truncation_order;
  out["regularization_floor"] = s.spec.regularization_floor;
  return out;
}

inline grid::Backend parse_backend(const config::KeyValues& kv, const std::string& fallback) {
  const std::string b = kv.get("backend", fallback);
  if (b == "spectral") return grid::Backend::spectral;
  if (b == "finite-difference" || b == "fd") return grid::Backend::finite_difference;
  throw kv.error_at("backend", "backend must be 'spectral' or 'finite-difference'");
}

inline int positive_int(const config::KeyValues& kv, const std::string& key, long long fallback) {
  const long long v = kv.get_int(key, fallback);
  if (v < 1 || v > 100000000) {
    throw kv.error_at(key, "'" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

inline double positive_double(const config::KeyValues& kv, const std::string& key, double fallback) {
  const double v = kv.get_double(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw kv.error_at(key, "'" + key + "' must be positive");
  }
  return v;
}

inline std::vector<int> positive_list(const config::KeyValues& kv, const std::string& key,
                                      std::vector<long long> fallback) {
  std::vector<int> out;
  for (long long v : kv.get_int_list(key, std::move(fallback))) {
    if (v < 1 || v > 1000) {
      throw kv.error_at(key, "'" + key + "' entries must be integers in [1, 1000]");
    }
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) {
    throw kv.error_at(key, "'" + key + "' may not be empty");
  }
  return out;
}

inline json residual_report_json(const elcheck::ResidualReport& r) {
  json j;
  j["candidate"] = r.candidate.to_string();
  j["residual"] = r.residual.to_string();
  j["dimension"] = r.dimension;
  j["passes"] = r.passes;
  j["max_abs_residual"] = r.max_abs_residual;
  j["max_relative_residual"] = r.max_relative_residual;
  j["samples_used"] = r.samples_used;
  j["resamples"] = r.resamples;
  j["exact_checks"] = r.exact_checks;
  j["exact_nonzero"] = r.exact_nonzero;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  return j;
}

inline ScenarioOutput run_verify_el(const RunConfig& rc) {
  const auto& kv = rc.kv;
  const int dim = static_cast<int>(kv.get_int("dim", 1));
  const std::string text = kv.require("q");
  expr::Expression q;
  try {
    q = expr::parse_q_expression(text, dim);
  } catch (const std::exception& e) {
    throw kv.error_at("q", e.what());
  }
  elcheck::CertifyOptions opt;
  opt.trials = positive_int(kv, "trials", 100);
  opt.tolerance = positive_double(kv, "tolerance", 1e-10);
  opt.exact_trials = static_cast<int>(kv.get_int("exact_trials", 20));
  opt.seed = rc.seed;
  const auto report = elcheck::certify(q, dim, opt);
  json j = residual_report_json(report);
  j["config_hash"] = rc.config_hash;
  ScenarioOutput out;
  out.artifacts.push_back({"residual_report.json", j.dump(2) + "\n"});
  out.summary["passes"] = report.passes;
  out.summary["max_relative_residual"] = report.max_relative_residual;
  return out;
}

inline ScenarioOutput run_coefficients(const RunConfig& rc) {
  const int max_n = static_cast<int>(rc.kv.get_int("max_n", 20));
  if (max_n < 0 || max_n > 500) {
    throw rc.kv.error_at("max_n", "max_n must be in [0, 500]");
  }
  io::CsvTable t({"n", "a_2n", "value", "binomial", "match"});
  bool all = true;
  for (const auto& e : coeffs::table(max_n)) {
    const Rational b = coeffs::sqrt_binomial_coeff(e.n);
    const bool match = e.a_2n == b;
    all = all && match;
    t.row({std::to_string(e.n), to_fraction_string(e.a_2n), fmt(to_double(e.a_2n)), to_fraction_string(b),
           match ? "true" : "false"});
  }
  ScenarioOutput out;
  out.artifacts.push_back({"coefficients.csv", t.text()});
  out.summary["rows"] = max_n + 1;
  out.summary["all_match"] = all;
  return out;
}

inline double box_closed_form_q4(double L, int tau, const PhysicalParams& p) {
  const double pc = tau * std::numbers::pi * p.hbar_c() / L;
  return -std::pow(pc, 4) / (8.0 * std::pow(p.rest_energy(), 3));
}

inline ScenarioOutput run_box(const RunConfig& rc) {
  const auto& kv = rc.kv;
  const SpecFile s = load_spec(rc);
  const double L = positive_double(kv, "L", 1.0);
  const auto states = positive_list(kv, "states", {1});
  const int points = positive_int(kv, "points", 256);
  const auto backend = parse_backend(kv, "spectral");
  const int count = std::max(positive_int(kv, "eigenvalues", 8), *std::max_element(states.begin(), states.end()));

  json records = json::array();
  io::CsvTable terms({"state", "order", "delta_E"});
  for (int tau : states) {
    const auto st = spectra::box_eigenstate(L, tau, static_cast<std::size_t>(points), s.params, backend);
    json r;
    r["state"] = st.label;
    r["tau"] = tau;
    r["E0"] = st.E0;
    double total = 0.0;
    for (const auto& t : s.spec.terms) {
      const double d = spectra::perturbative_shift(st, t.order, s.params, s.spec);
      terms.row({st.label, std::to_string(t.order), fmt(d)});
      if (t.order >= 4) {
        total += d;
      }
    }
    r["delta_E"] = total;
    if (s.spec.find(4) != nullptr) {
      const auto cmp = spectra::compare_q4_shift(st, s.params);
      r["delta_E_q4"] = cmp.delta_E;
      r["delta_E_reference"] = cmp.delta_E_reference;
      r["relative_gap"] = cmp.relative_gap;
      const double closed = box_closed_form_q4(L, tau, s.params);
      r["closed_form"] = closed;
      r["closed_form_gap"] = std::abs(cmp.delta_E - closed) / std::abs(closed);
    }
    records.push_back(r);
  }

  ScenarioOutput out;
  if (s.spec.max_order() <= 4) {
    const auto g = grid::Grid::dirichlet(0.0, L, static_cast<std::size_t>(points), backend);
    const auto V = GridFunction::zeros(g);
    QuantumPotentialSpec linear = QuantumPotentialSpec::relativistic({2});
    const auto base = spectra::solve_modified_eigenproblem(V, linear, s.params, count);
    const auto mod = spectra::solve_modified_eigenproblem(V, s.spec, s.params, count);
    io::CsvTable t({"index", "E_standard", "E_modified", "shift", "closed_form_shift"});
    for (int i = 0; i < count; ++i) {
      const double shift = mod[static_cast<std::size_t>(i)].energy - base[static_cast<std::size_t>(i)].energy;
      const double rest = s.spec.find(0) ? s.params.rest_energy() : 0.0;
      t.row({std::to_string(i + 1), fmt(base[static_cast<std::size_t>(i)].energy),
             fmt(mod[static_cast<std::size_t>(i)].energy), fmt(shift),
             fmt(rest + (s.spec.find(4) ? box_closed_form_q4(L, i + 1, s.params) : 0.0))});
    }
    out.artifacts.push_back({"eigenvalues.csv", t.text()});
    for (auto& r : records) {
      const int tau = r["tau"];
      r["eigen_shift"] = mod[static_cast<std::size_t>(tau - 1)].energy - base[static_cast<std::size_t>(tau - 1)].energy;
    }
  }

  json doc;
  doc["problem"] = "box";
  doc["L"] = L;
  doc["points"] = points;
  doc["backend"] = grid::to_string(backend);
  doc["spec"] = spec_json(s);
  doc["shifts"] = records;
  doc["config_hash"] = rc.config_hash;
  out.artifacts.push_back({"shifts.json", doc.dump(2) + "\n"});
  out.artifacts.push_back({"term_shifts.csv", terms.text()});
  out.summary["shifts"] = records;
  return out;
}

/// Kinetic p^4 correction for hydrogen, l = 0: -(E_n^2 / 2mc^2)(8n - 3).
inline double hydrogen_analytic_shift(int n, const PhysicalParams& p) {
  const double En = -0.5 * p.rest_energy() * fine_structure * fine_structure / (n * n);
  return -(En * En / (2.0 * p.rest_energy())) * (8.0 * n - 3.0);
}

inline ScenarioOutput run_hydrogen(const RunConfig& rc) {
  const auto& kv = rc.kv;
  const SpecFile s = load_spec(rc);
  const auto states = positive_list(kv, "states", {1, 2});
  const int points = positive_int(kv, "points", 2048);
  const auto g = spectra::hydrogen_grid(s.params, static_cast<std::size_t>(points));
  json records = json::array();
  io::CsvTable t({"n", "E0", "delta_E", "delta_E_reference", "analytic", "analytic_gap"});
  for (int n : states) {
    const auto st = spectra::hydrogen_radial_state(n, 0, s.params, g);
    const auto cmp = spectra::compare_q4_shift(st, s.params);
    const double exact = hydrogen_analytic_shift(n, s.params);
    json r;
    r["state"] = cmp.state;
    r["n"] = n;
    r["E0"] = st.E0;
    r["delta_E"] = cmp.delta_E;
    r["delta_E_reference"] = cmp.delta_E_reference;
    r["relative_gap"] = cmp.relative_gap;
    r["analytic"] = exact;
    r["analytic_gap"] = std::abs(cmp.delta_E - exact) / std::abs(exact);
    records.push_back(r);
    t.row({std::to_string(n), fmt(st.E0), fmt(cmp.delta_E), fmt(cmp.delta_E_reference), fmt(exact),
           fmt(r["analytic_gap"].get<double>())});
  }
  json doc;
  doc["problem"] = "hydrogen";
  doc["points"] = points;
  doc["r_min"] = g->x_min();
  doc["r_max"] = g->x_max();
  doc["spec"] = spec_json(s);
  doc["shifts"] = records;
  doc["config_hash"] = rc.config_hash;
  ScenarioOutput out;
  out.artifacts.push_back({"shifts.json", doc.dump(2) + "\n"});
  out.artifacts.push_back({"hydrogen.csv", t.text()});
  out.summary["shifts"] = records;
  return out;
}

inline ScenarioOutput run_ratios(const RunConfig& rc) {
  const auto& kv = rc.kv;
  const std::string particle = kv.get("particle", kv.get("units", "electron"));
  PhysicalParams p = PhysicalParams::electron();
  try {
    p = PhysicalParams::preset(particle);
  } catch (const std::exception& e) {
    throw kv.error_at(kv.has("particle") ? "particle" : "units", e.what());
  }
  const double L = positive_double(kv, "L", 1.0);
  const int tau = positive_int(kv, "tau", 1);
  const int max_n = positive_int(kv, "max_n", 4);
  const double x = box_expansion_parameter(L, tau, p);
  io::CsvTable t({"n", "coefficient_ratio", "expansion_parameter", "term_ratio"});
  for (int n = 1; n <= max_n; ++n) {
    t.row({std::to_string(n), fmt(to_double(coeffs::a2n(n + 1) / coeffs::a2n(n))), fmt(x),
           fmt(term_ratio(L, tau, n, p))});
  }

  // |Q4/Q2| on the sampled box mode, away from the nodes.
  const auto st = spectra::box_eigenstate(L, tau, 256, p, grid::Backend::spectral);
  const auto spec = QuantumPotentialSpec::relativistic({2, 4});
  const auto q2 = eval_q2n(st.R0, 1, p, spec);
  const auto q4 = eval_q2n(st.R0, 2, p, spec);
  const std::size_t mid = st.R0.size() / (2 * static_cast<std::size_t>(tau));
  const double grid_ratio = std::abs(q4[mid] / q2[mid]);

  io::CsvTable summary({"particle", "L", "tau", "compton_wavelength", "expansion_parameter", "order_of_magnitude",
                        "grid_q4_over_q2"});
  const int order = static_cast<int>(std::floor(std::log10(x)));
  summary.row({particle, fmt(L), std::to_string(tau), fmt(p.compton_wavelength()), fmt(x), std::to_string(order),
               fmt(grid_ratio)});
  ScenarioOutput out;
  out.artifacts.push_back({"ratios.csv", summary.text()});
  out.artifacts.push_back({"term_ratios.csv", t.text()});
  out.summary["particle"] = particle;
  out.summary["expansion_parameter"] = x;
  out.summary["order_of_magnitude"] = order;
  out.summary["grid_q4_over_q2"] = grid_ratio;
  return out;
}

inline ScenarioOutput run_evolve(const RunConfig& rc) {
  using namespace dynamics;
  const auto& kv = rc.kv;
  const SpecFile s = load_spec(rc);
  const std::string boundary = kv.get("boundary", "periodic");
  const double lo = kv.get_double("x_min", -10.0);
  const double hi = kv.get_double("x_max", 10.0);
  if (!(hi > lo)) {
    throw kv.error_at("x_max", "x_max must exceed x_min");
  }
  const int points = positive_int(kv, "points", 512);
  const auto backend = parse_backend(kv, "spectral");
  grid::GridPtr g;
  if (boundary == "periodic") {
    g = grid::Grid::periodic(lo, hi - lo, static_cast<std::size_t>(points), backend);
  } else if (boundary == "dirichlet") {
    g = grid::Grid::dirichlet(lo, hi, static_cast<std::size_t>(points), backend);
  } else {
    throw kv.error_at("boundary", "boundary must be 'periodic' or 'dirichlet'");
  }

  const std::string potential = kv.get("potential", "none");
  GridFunction V = GridFunction::zeros(g);
  if (potential == "harmonic") {
    const double k = kv.get_double("spring", 1.0);
    const double c = kv.get_double("center", 0.5 * (lo + hi));
    V = GridFunction::sample(g, [&](double x) { return 0.5 * k * (x - c) * (x - c); });
  } else if (potential != "none") {
    throw kv.error_at("potential", "potential must be 'none' or 'harmonic'");
  }

  const std::string initial = kv.get("initial", "gaussian");
  WaveField psi0;
  if (initial == "gaussian") {
    psi0 = gaussian_packet(g, kv.get_double("x0", 0.5 * (lo + hi)), positive_double(kv, "sigma", 1.0),
                           kv.get_double("k0", 0.0));
  } else if (initial == "eigenmode") {
    if (boundary != "dirichlet") {
      throw kv.error_at("initial", "eigenmode initial state needs a dirichlet boundary");
    }
    const int tau = positive_int(kv, "tau", 1);
    auto R = GridFunction::sample(g, [&](double x) { return std::sin(tau * std::numbers::pi * (x - lo) / (hi - lo)); });
    R.values.front() = 0.0;
    R.values.back() = 0.0;
    grid::normalize(R);
    psi0 = WaveField::from_real(R);
  } else {
    throw kv.error_at("initial", "initial must be 'gaussian' or 'eigenmode'");
  }

  EvolutionConfig cfg;
  cfg.dt = positive_double(kv, "dt", 1e-4);
  cfg.steps = positive_int(kv, "steps", 100);
  cfg.frame_interval = positive_int(kv, "frame_interval", std::max(1, cfg.steps / 10));
  cfg.corrector_iterations = positive_int(kv, "correctors", 2);
  if (kv.has("q_cap")) {
    cfg.q_cap = positive_double(kv, "q_cap", 1.0);
  }
  cfg.norm_limit = positive_double(kv, "norm_limit", 1e-4);
  const int n_traj = static_cast<int>(kv.get_int("trajectories", 0));
  if (n_traj < 0) {
    throw kv.error_at("trajectories", "trajectories must be non-negative");
  }
  if (n_traj > 0 && cfg.steps % cfg.frame_interval != 0) {
    throw kv.error_at("frame_interval", "trajectories need frame_interval to divide steps");
  }
  const int bins = positive_int(kv, "histogram_bins", 50);

  const auto run = evolve(psi0, V, s.spec, s.params, cfg);

  ScenarioOutput out;
  json frames = json::array();
  for (const auto& f : run.frames) {
    char name[40];
    std::snprintf(name, sizeof name, "frames/frame_%06d.csv", f.step);
    io::CsvTable t({"x", "re", "im", "rho"});
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      const auto z = f.psi.values[i];
      t.row({fmt((*g)[i]), fmt(z.real()), fmt(z.imag()), fmt(std::norm(z))});
    }
    out.artifacts.push_back({name, t.text()});
    json j;
    j["file"] = name;
    j["step"] = f.step;
    j["time"] = f.time;
    j["norm"] = f.norm;
    j["energy"] = f.energy;
    j["clamp_count"] = f.clamp_count;
    frames.push_back(j);
  }
  json doc;
  doc["dt"] = cfg.dt;
  doc["steps"] = cfg.steps;
  doc["scheme"] = to_string(run.scheme);
  doc["q_cap"] = run.q_cap;
  doc["total_clamps"] = run.total_clamps;
  doc["grid"] = io::grid_descriptor(*g);
  doc["spec"] = spec_json(s);
  doc["frames"] = frames;
  doc["config_hash"] = rc.config_hash;
  const double drift = std::abs(run.frames.back().norm / run.frames.front().norm - 1.0);
  out.summary["norm_drift"] = drift;
  out.summary["total_clamps"] = run.total_clamps;
  out.summary["scheme"] = to_string(run.scheme);

  if (n_traj > 0) {
    std::vector<double> rho(g->size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      rho[i] = std::norm(psi0.values[i]);
    }
    const auto seeds = stratified_seeds(GridFunction(g, std::move(rho)), static_cast<std::size_t>(n_traj), rc.seed);
    const auto traj = integrate_trajectories(run.frames, seeds, s.params);
    io::CsvTable t({"seed_index", "time", "x"});
    std::vector<double> ends;
    for (std::size_t k = 0; k < traj.paths.size(); ++k) {
      for (std::size_t j = 0; j < traj.paths[k].size(); ++j) {
        t.row({std::to_string(k), fmt(traj.times[j]), fmt(traj.paths[k][j])});
      }
      if (!traj.exited[k]) {
        ends.push_back(traj.paths[k].back());
      }
    }
    out.artifacts.push_back({"trajectories.csv", t.text()});
    const double l1 = histogram_l1(ends, run.frames.back().psi, g->x_min(), g->x_max(), bins);
    doc["trajectories"] = n_traj;
    doc["histogram_l1"] = l1;
    out.summary["histogram_l1"] = l1;
  }
  out.artifacts.push_back({"frames.json", doc.dump(2) + "\n"});
  return out;
}

inline ScenarioOutput dispatch(const RunConfig& rc) {
  switch (rc.scenario) {
    case Scenario::verify_el: return run_verify_el(rc);
    case Scenario::coefficients: return run_coefficients(rc);
    case Scenario::box: return run_box(rc);
    case Scenario::hydrogen: return run_hydrogen(rc);
    case Scenario::evolve: return run_evolve(rc);
    case Scenario::ratios: return run_ratios(rc);
  }
  throw CliError("unreachable scenario");
}

}  // namespace detail

struct RunResult {
  std::vector<fs::path> files;
  json summary;
};

/// Runs the scenario in memory, without touching the filesystem.
inline ScenarioOutput execute(const RunConfig& rc) {
  ScenarioOutput out;
  try {
    out = detail::dispatch(rc);
    rc.kv.reject_unknown();
  } catch (const config::ConfigError& e) {
    throw config::ConfigError(rc.source.empty() ? e.what() : rc.source + ": " + e.what());
  } catch (const std::exception& e) {
    throw CliError(std::string("scenario '") + to_string(rc.scenario) + "': " + e.what());
  }
  return out;
}

inline json manifest(const RunConfig& rc, const ScenarioOutput& out) {
  json m;
  m["tool"] = "qpot";
  m["version"] = version;
  json libs;
  libs["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
  libs["fftw"] = std::string(fftw_version);
  libs["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                          std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  m["libraries"] = libs;
  m["scenario"] = to_string(rc.scenario);
  m["seed"] = rc.seed;
  m["config_hash"] = rc.config_hash;
  json inputs = json::object();
  for (const auto& [k, e] : rc.kv.entries()) {
    if (k != "out") {
      inputs[k] = e.value;
    }
  }
  m["inputs"] = inputs;
  if (rc.spec_kv) {
    json spec = json::object();
    for (const auto& [k, e] : rc.spec_kv->entries()) {
      spec[k] = e.value;
    }
    m["spec_inputs"] = spec;
  }
  json files = json::array();
  for (const auto& a : out.artifacts) {
    json f;
    f["file"] = a.name;
    f["bytes"] = a.text.size();
    f["content_hash"] = io::content_hash(a.text);
    f["config_hash"] = rc.config_hash;
    files.push_back(f);
  }
  m["outputs"] = files;
  m["results"] = out.summary;
  return m;
}

/// Runs the scenario and writes artifacts, manifest.json and timings.json into rc.out_dir.
inline RunResult run(const RunConfig& rc) {
  if (rc.out_dir.empty()) {
    throw CliError("no output directory (set 'out' or pass --out)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioOutput out = execute(rc);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::error_code ec;
  fs::create_directories(rc.out_dir, ec);
  if (ec) {
    throw CliError("cannot create output directory " + rc.out_dir.string() + ": " + ec.message());
  }
  RunResult result;
  for (const auto& a : out.artifacts) {
    const fs::path p = rc.out_dir / a.name;
    fs::create_directories(p.parent_path());
    io::write_text(p, a.text);
    result.files.push_back(p);
  }
  io::write_json(rc.out_dir / "manifest.json", manifest(rc, out));
  result.files.push_back(rc.out_dir / "manifest.json");
  json timing;
  timing["config_hash"] = rc.config_hash;
  timing["scenario"] = to_string(rc.scenario);
  timing["wall_seconds"] = seconds;
  io::write_json(rc.out_dir / "timings.json", timing);
  result.files.push_back(rc.out_dir / "timings.json");
  result.summary = out.summary;
  return result;
}

}  // namespace qpot::cli
