// Command-line front end. Every verb is a thin shell over the library: it
// loads a scenario, applies flag overrides, calls the same entry points the
// tests use and emits JSON/CSV.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qfso/scenario.hpp"

namespace {

using nlohmann::json;
using namespace qfso;

struct CommonOpts {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<double> wavelength_nm;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* config = cmd->add_option("--config", opts.config, "Scenario JSON file");
  if (config_required) config->required();
  cmd->add_option("--out", opts.out, "Output file (verb-specific)");
  cmd->add_option("--seed", opts.seed, "Override the scenario seed");
  cmd->add_option("--chains", opts.chains, "Override the sampler chain count");
  cmd->add_option("--wavelength-nm", opts.wavelength_nm, "Override the wavelength");
}

scenario::Scenario load_with_overrides(const CommonOpts& opts) {
  scenario::Scenario s =
      opts.config.empty() ? scenario::Scenario{} : scenario::load_scenario(opts.config);
  if (opts.seed) s.seed = *opts.seed;
  if (opts.wavelength_nm) s.geometry.wavelength_nm = *opts.wavelength_nm;
  if (opts.chains && s.experiment) s.experiment->sampler.chains = *opts.chains;
  return s;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

json stamp(const scenario::Scenario& s) {
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << scenario::scenario_hash(s);
  return json{{"scenario_hash", hash.str()}, {"seed", s.seed}};
}

int run_link_budget(CommonOpts& opts) {
  scenario::Scenario s = load_with_overrides(opts);
  s.experiment.reset();  // the estimation pipeline has its own verb
  if (!opts.out.empty()) s.output_path = opts.out;
  const scenario::ScenarioResult result = scenario::run_scenario(s);
  std::cout << scenario::result_json(result);
  return 0;
}

int run_cloud(CommonOpts& opts) {
  const scenario::Scenario s = load_with_overrides(opts);
  if (s.disturbance != scenario::DisturbanceKind::none &&
      s.disturbance != scenario::DisturbanceKind::cloud) {
    throw scenario::ConfigError("config: $.disturbance.kind: expected \"cloud\" (or \"none\" for defaults)");
  }
  const channel::StabilizedCloud cloud =
      s.disturbance == scenario::DisturbanceKind::cloud ? s.cloud : channel::StabilizedCloud{};
  const double a = channel::stabilized_cloud_attenuation(
      cloud, s.geometry.to_link_geometry().wavelength);
  json summary = stamp(s);
  summary["a_cloud_db"] = a;
  summary["wavelength_nm"] = s.geometry.wavelength_nm;
  emit(opts.out, summary.dump(2) + "\n");
  return 0;
}

int run_column(CommonOpts& opts) {
  const scenario::Scenario s = load_with_overrides(opts);
  if (s.disturbance != scenario::DisturbanceKind::column) {
    throw scenario::ConfigError("config: $.disturbance.kind: the column verb needs kind \"column\"");
  }
  const channel::AtmosphericColumn column = channel::read_column_csv(s.column_path);
  const double a = channel::column_attenuation(column, s.column_distribution,
                                               s.geometry.to_link_geometry().wavelength);
  json summary = stamp(s);
  summary["a_column_db"] = a;
  summary["wavelength_nm"] = s.geometry.wavelength_nm;
  summary["particles_per_m2"] = channel::column_particle_count(column);
  emit(opts.out, summary.dump(2) + "\n");
  return 0;
}

int run_haze(CommonOpts& opts) {
  const scenario::Scenario s = load_with_overrides(opts);
  if (s.disturbance != scenario::DisturbanceKind::none &&
      s.disturbance != scenario::DisturbanceKind::haze) {
    throw scenario::ConfigError("config: $.disturbance.kind: expected \"haze\" (or \"none\" for defaults)");
  }
  const channel::HazeScenario haze = s.disturbance == scenario::DisturbanceKind::haze
                                         ? s.haze.to_haze_scenario()
                                         : channel::HazeScenario{};
  const double a = channel::haze_attenuation(haze, s.geometry.to_link_geometry().wavelength);
  json summary = stamp(s);
  summary["a_haze_db"] = a;
  summary["wavelength_nm"] = s.geometry.wavelength_nm;
  emit(opts.out, summary.dump(2) + "\n");
  return 0;
}

int run_qse_sweep(CommonOpts& opts) {
  scenario::Scenario s = load_with_overrides(opts);
  if (!s.experiment) {
    throw scenario::ConfigError("config: $.experiment: the qse-sweep verb needs this section");
  }
  if (!opts.out.empty()) s.experiment->sweep_path = opts.out;
  s.output_path.clear();
  const scenario::ScenarioResult result = scenario::run_scenario(s);

  json summary = stamp(s);
  summary["rows"] = json::array();
  for (std::size_t i = 0; i < result.sweep.size(); ++i) {
    const experiment::SweepRow& row = result.sweep[i];
    const auto n_samples = result.posteriors[i].pooled().size();
    summary["rows"].push_back(json{{"attenuation_db", row.attenuation_db},
                                   {"alpha_mean", row.alpha_mean},
                                   {"alpha_std", row.alpha_std},
                                   {"eof_mean", row.eof_mean},
                                   {"eof_std", row.eof_std},
                                   {"n_samples", n_samples},
                                   {"converged", row.converged}});
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_golden(CommonOpts& opts) {
  const std::string directory = opts.out.empty() ? "golden" : opts.out;
  const auto written = scenario::generate_reference_tables(directory);
  json summary;
  summary["written"] = written;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical attenuation and entanglement survival on ground-satellite links"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* link_budget =
      app.add_subcommand("link-budget", "Clear-air link budget plus configured disturbance");
  add_common(link_budget, opts, true);
  CLI::App* cloud = app.add_subcommand("cloud", "Stabilized-cloud attenuation");
  add_common(cloud, opts, false);
  CLI::App* column = app.add_subcommand("column", "Layered-column attenuation from a CSV");
  add_common(column, opts, true);
  CLI::App* haze = app.add_subcommand("haze", "PM2.5 haze attenuation");
  add_common(haze, opts, false);
  CLI::App* qse = app.add_subcommand("qse-sweep", "Entanglement estimation over attenuations");
  add_common(qse, opts, true);
  CLI::App* golden = app.add_subcommand("golden", "Write the reference value tables");
  add_common(golden, opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(link_budget)) return run_link_budget(opts);
    if (app.got_subcommand(cloud)) return run_cloud(opts);
    if (app.got_subcommand(column)) return run_column(opts);
    if (app.got_subcommand(haze)) return run_haze(opts);
    if (app.got_subcommand(qse)) return run_qse_sweep(opts);
    if (app.got_subcommand(golden)) return run_golden(opts);
  } catch (const scenario::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
