// fecim: run reproducible array experiments and write plot-ready data.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fecim/error.hpp"
#include "fecim/experiments.hpp"
#include "fecim/io.hpp"

namespace {

using fecim::cli::ExperimentConfig;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::string sigma_vth;
  std::string sigma_cm;
  std::string domain;
  std::string preset;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> n_rows;
  std::string workload;
};

ExperimentConfig load(const std::string& path) {
  if (path.empty()) return {};
  return fecim::cli::parse_config(fecim::io::read_file(path));
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = o.seed;
  if (!o.out.empty()) {
    cfg.out_dir = o.out;
  } else if (cfg.out_dir == ".") {
    if (const char* env = std::getenv("FECIM_OUT_DIR"); env && *env) cfg.out_dir = env;
  }
  if (!o.format.empty()) cfg.format = o.format;
  if (!o.sigma_vth.empty()) cfg.params["sigma_vth"] = o.sigma_vth;
  if (!o.sigma_cm.empty()) cfg.params["sigma_cm"] = o.sigma_cm;
  if (!o.domain.empty()) cfg.params["domain"] = o.domain;
  if (!o.preset.empty()) cfg.params["preset"] = o.preset;
  if (o.trials) cfg.params["trials"] = *o.trials;
  if (o.n_rows) cfg.params["n_rows"] = *o.n_rows;
  if (!o.workload.empty()) cfg.params["workload_file"] = o.workload;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral simulator for 1FeFET-1C charge-domain compute-in-memory arrays"};
  app.set_version_flag("--version", std::string(fecim::cli::kToolVersion));
  app.require_subcommand(1);

  std::string experiment;
  std::string config_path;
  Overrides o;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("experiment", experiment,
                  "transfer-curve | worst-case | sense-margin | scaling | edp-table | hdc-quality | map-workload");
  run->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  run->add_option("--seed", o.seed, "Base seed (required here or in the config)");
  run->add_option("--out", o.out, "Output directory (default: config, then $FECIM_OUT_DIR, then .)");
  run->add_option("--format", o.format, "csv or json");
  run->add_option("--sigma-vth", o.sigma_vth, "Vth sigma, e.g. 170mV or 30mV,54mV");
  run->add_option("--sigma-cm", o.sigma_cm, "Relative capacitor sigma, e.g. 5%");
  run->add_option("--domain", o.domain, "charge or current");
  run->add_option("--trials", o.trials, "Monte-Carlo trials");
  run->add_option("--n-rows", o.n_rows, "Rows per column");
  run->add_option("--preset", o.preset, "nominal or wide-window");
  run->add_option("--workload", o.workload, "Workload JSON for map-workload")->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("validate", "Report every problem with a config");
  check->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list", "List experiment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (auto id : fecim::cli::kExperiments) std::cout << id << '\n';
    return 0;
  }

  ExperimentConfig cfg;
  try {
    cfg = load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (check->parsed()) {
    apply(cfg, o);
    const auto diags = fecim::cli::validate(cfg);
    for (const auto& d : diags) std::cerr << d << '\n';
    if (diags.empty()) std::cout << "ok\n";
    return diags.empty() ? 0 : 2;
  }

  if (!experiment.empty()) cfg.experiment = experiment;
  apply(cfg, o);
  const auto result = fecim::cli::run(cfg);
  if (result.exit_code != 0) {
    std::cerr << "error: " << result.message;
    if (!result.message.empty() && result.message.back() != '\n') std::cerr << '\n';
    return result.exit_code;
  }
  std::cout << result.message << '\n';
  for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
  return 0;
}
