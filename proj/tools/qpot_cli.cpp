// qpot: command-line front end for the quantum-potential laboratory.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qpot/cli.hpp"

namespace fs = std::filesystem;
using namespace qpot;

namespace {

struct ConfigText {
  std::string text;

  ConfigText& set(const std::string& key, const std::string& value) {
    text += key + " = " + value + "\n";
    return *this;
  }
};

std::string spec_line_path(const std::string& path) { return fs::absolute(path).string(); }

/// Drops `key = ...` lines so a command-line flag can replace them.
std::string without_key(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    const auto body = line.substr(0, hash);
    const auto eq = body.find('=');
    if (eq != std::string::npos && config::trim(body.substr(0, eq)) == key) {
      out += "# " + key + " replaced on the command line\n";
      continue;
    }
    out += line + "\n";
  }
  return out;
}

/// Runs a scenario built from flags; prints the named artifact when no output directory is given.
int run_inline(const ConfigText& cfg, const std::optional<std::string>& out_dir, const std::string& primary) {
  cli::Overrides o;
  if (out_dir) {
    o.out_dir = *out_dir;
  }
  const auto rc = cli::make_run_config(cfg.text, fs::current_path(), o);
  if (out_dir) {
    cli::run(rc);
    std::cerr << "wrote " << *out_dir << "\n";
    return 0;
  }
  const auto out = cli::execute(rc);
  for (const auto& a : out.artifacts) {
    if (a.name == primary) {
      std::cout << a.text;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-potential hierarchy laboratory"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a scenario from a key-value config file");
  std::string run_config;
  std::optional<std::string> run_out, run_scenario;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--config", run_config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory (overrides config)");
  run->add_option("--seed", run_seed, "Random seed (overrides config)");
  run->add_option("--scenario", run_scenario, "Scenario name (overrides config)");

  // verify-el
  auto* verify = app.add_subcommand("verify-el", "Certify a candidate Q against the stationarity condition");
  std::string q_text;
  int dim = 1, trials = 100;
  std::uint64_t seed = 1;
  std::optional<std::string> verify_out;
  verify->add_option("--q", q_text, "Candidate expression, e.g. \"A2*lap(R)/R\"")->required();
  verify->add_option("--dim", dim, "Spatial dimension (1-3)")->check(CLI::Range(1, 3));
  verify->add_option("--trials", trials, "Randomized jets")->check(CLI::Range(20, 1000000));
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--out", verify_out, "Output directory");

  // coefficients
  auto* coefficients = app.add_subcommand("coefficients", "Tabulate a_2n against the binomial series");
  int max_n = 20;
  std::optional<std::string> coeff_out;
  coefficients->add_option("--max-n", max_n, "Largest n")->check(CLI::Range(0, 500));
  coefficients->add_option("--out", coeff_out, "Output directory");

  // qpot
  auto* qpot_cmd = app.add_subcommand("qpot", "Evaluate the complete quantum potential of a sampled R");
  std::string spec_path, input_path, q_out;
  qpot_cmd->add_option("--spec", spec_path, "Spec file")->required()->check(CLI::ExistingFile);
  qpot_cmd->add_option("--input", input_path, "R as CSV with a JSON sidecar")->required()->check(CLI::ExistingFile);
  qpot_cmd->add_option("--out", q_out, "Output CSV")->required();

  // spectra
  auto* spectra_cmd = app.add_subcommand("spectra", "Energy shifts for the box or hydrogen");
  std::string problem, spectra_spec, spectra_out;
  std::optional<double> box_length;
  std::optional<int> points;
  std::optional<std::string> states;
  spectra_cmd->add_option("--problem", problem, "box or hydrogen")
      ->required()
      ->check(CLI::IsMember({"box", "hydrogen"}));
  spectra_cmd->add_option("--spec", spectra_spec, "Spec file")->required()->check(CLI::ExistingFile);
  spectra_cmd->add_option("--out", spectra_out, "Output JSON path")->required();
  spectra_cmd->add_option("--L", box_length, "Box length in angstrom");
  spectra_cmd->add_option("--points", points, "Grid points");
  spectra_cmd->add_option("--states", states, "Comma-separated quantum numbers");

  // evolve
  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve a wave packet under the truncated quantum potential");
  std::string evolve_spec, evolve_config, evolve_out;
  std::optional<std::string> initial;
  std::optional<std::uint64_t> evolve_seed;
  evolve_cmd->add_option("--spec", evolve_spec, "Spec file")->required()->check(CLI::ExistingFile);
  evolve_cmd->add_option("--config", evolve_config, "Evolution config")->required()->check(CLI::ExistingFile);
  evolve_cmd->add_option("--initial", initial, "gaussian or eigenmode")
      ->check(CLI::IsMember({"gaussian", "eigenmode"}));
  evolve_cmd->add_option("--out", evolve_out, "Output directory")->required();
  evolve_cmd->add_option("--seed", evolve_seed, "Seed for trajectory sampling");

  // ratios
  auto* ratios = app.add_subcommand("ratios", "Scale-separation ratios of successive terms");
  std::string particle = "electron";
  double ratio_length = 1.0;
  int tau = 1;
  std::optional<std::string> ratios_out;
  ratios->add_option("--particle", particle, "electron, proton or natural")
      ->check(CLI::IsMember({"electron", "proton", "natural"}));
  ratios->add_option("--L", ratio_length, "Box length in angstrom")->check(CLI::PositiveNumber);
  ratios->add_option("--tau", tau, "Box mode number")->check(CLI::Range(1, 1000));
  ratios->add_option("--out", ratios_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cli::Overrides o;
      if (run_out) o.out_dir = *run_out;
      if (run_seed) o.seed = *run_seed;
      if (run_scenario) o.scenario = *run_scenario;
      const auto rc = cli::load_run_config(run_config, o);
      const auto result = cli::run(rc);
      std::cout << result.summary.dump(2) << "\n";
      return 0;
    }
    if (*verify) {
      ConfigText c;
      c.set("scenario", "verify-el").set("q", q_text).set("dim", std::to_string(dim));
      c.set("trials", std::to_string(trials)).set("seed", std::to_string(seed));
      return run_inline(c, verify_out, "residual_report.json");
    }
    if (*coefficients) {
      ConfigText c;
      c.set("scenario", "coefficients").set("max_n", std::to_string(max_n));
      return run_inline(c, coeff_out, "coefficients.csv");
    }
    if (*qpot_cmd) {
      const auto spec = spec_from_config(config::KeyValues::load(spec_path));
      const auto R = io::read_grid_function(input_path);
      const auto Q = eval_complete_q(R.function, spec.params, spec.spec);
      io::write_grid_function(q_out, Q, "Q", "eV");
      std::cerr << "wrote " << q_out << "\n";
      return 0;
    }
    if (*spectra_cmd) {
      ConfigText c;
      c.set("scenario", problem).set("spec", spec_line_path(spectra_spec));
      if (box_length) {
        if (problem != "box") throw cli::CliError("--L applies only to the box problem");
        c.set("L", io::format_double(*box_length));
      }
      if (points) c.set("points", std::to_string(*points));
      if (states) c.set("states", *states);
      const auto rc = cli::make_run_config(c.text, fs::current_path());
      const auto out = cli::execute(rc);
      const fs::path json_path = spectra_out;
      for (const auto& a : out.artifacts) {
        if (a.name == "shifts.json") {
          io::write_text(json_path, a.text);
        } else if (a.name.ends_with(".csv")) {
          fs::path p = json_path;
          p.replace_extension();
          p += "." + a.name;
          io::write_text(p, a.text);
        }
      }
      std::cerr << "wrote " << spectra_out << "\n";
      return 0;
    }
    if (*evolve_cmd) {
      std::string text = without_key(io::read_text(evolve_config), "spec");
      if (initial) text = without_key(text, "initial");
      ConfigText c{text};
      c.set("spec", spec_line_path(evolve_spec));
      if (initial) c.set("initial", *initial);
      cli::Overrides o;
      o.out_dir = evolve_out;
      o.scenario = "evolve";
      if (evolve_seed) o.seed = *evolve_seed;
      const auto rc = cli::make_run_config(c.text, fs::path(evolve_config).parent_path(), o);
      std::cout << cli::run(rc).summary.dump(2) << "\n";
      return 0;
    }
    if (*ratios) {
      ConfigText c;
      c.set("scenario", "ratios").set("particle", particle).set("L", io::format_double(ratio_length));
      c.set("tau", std::to_string(tau));
      return run_inline(c, ratios_out, "ratios.csv");
    }
  } catch (const std::exception& e) {
    std::cerr << "qpot: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
