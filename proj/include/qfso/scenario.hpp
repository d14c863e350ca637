// Scenario plumbing: JSON configuration tying together geometry, turbulence,
// one disturbance source and an optional estimation sweep; evaluation of the
// combined attenuation; emission of summaries, sweep tables and the golden
// reference values.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfso/disturbed_channel.hpp"
#include "qfso/experiment.hpp"
#include "qfso/link_budget.hpp"

namespace qfso::scenario {

// Configuration problems: syntax errors carry line/column, semantic errors
// the dotted key path.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DisturbanceKind { none, cloud, column, haze };

// Geometry in the units the config file uses (nanometers, degrees); held
// verbatim so that emit/parse is an exact identity and the scenario hash is
// a fixed point. Converted to SI radians only when handed to the library.
struct GeometryConfig {
  double wavelength_nm = 1550.0;
  double link_distance_m = 400e3;
  double transmitter_aperture_m = 0.1;
  double receiver_aperture_m = 1.0;
  double zenith_angle_deg = 0.0;
  double start_height_m = 0.0;
  link::Direction direction = link::Direction::downlink;

  link::LinkGeometry to_link_geometry() const;
};

struct HazeConfig {
  double pm25_ug_m3 = 0.0;
  double thickness_m = 3000.0;
  double elevation_deg = 90.0;
  double mass_extinction_m2_g = 3.0;
  bool humidity_valid = true;

  channel::HazeScenario to_haze_scenario() const;
};

struct ExperimentPlan {
  std::uint64_t pairs_per_basis = 10000;
  std::vector<double> attenuations_db{0.0};
  quantum::SamplerConfig sampler{};  // seed is overwritten by the scenario seed
  std::string sweep_path;            // CSV table; empty keeps it in memory only
  std::string posterior_path;        // per-row sample CSV + summary JSON
};

struct Scenario {
  GeometryConfig geometry{};
  link::TurbulenceProfile turbulence{};
  double clear_air_db = 1.0;
  DisturbanceKind disturbance = DisturbanceKind::none;
  channel::StabilizedCloud cloud{};
  std::string column_path;
  channel::ParticleSizeDistribution column_distribution{};
  HazeConfig haze{};
  std::optional<ExperimentPlan> experiment;
  std::string output_path;  // summary JSON; empty writes nothing
  std::uint64_t seed = 0;
};

struct ScenarioResult {
  double a_atm_db = 0.0;
  std::optional<double> a_disturbance_db;
  double a_total_paper_db = 0.0;
  double a_total_serial_db = 0.0;
  std::vector<experiment::SweepRow> sweep;
  std::vector<quantum::PosteriorResult> posteriors;  // parallel to sweep
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
};

// Strict parse of the versioned scenario schema. Angles are degrees and
// wavelengths nanometers on the wire; everything is SI internally.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Canonical JSON for a scenario (keys sorted, stable formatting); feeding it
// back through parse_scenario_text reproduces the scenario.
std::string emit_scenario(const Scenario& scenario);

std::uint64_t fnv1a64(const std::string& text);

// Hash of the canonical form with output locations cleared, so re-pointing
// artifacts does not change a scenario's identity. Carried on every output.
std::uint64_t scenario_hash(const Scenario& scenario);

// Pure evaluation: clear-air budget, disturbance term, combined totals and
// the optional estimation sweep. Numeric failures are rethrown naming the
// operation that failed.
ScenarioResult evaluate_scenario(const Scenario& scenario);

// evaluate_scenario plus file emission: summary JSON to output_path, sweep
// CSV and per-row posterior exports to the paths in the experiment plan.
ScenarioResult run_scenario(const Scenario& scenario);

// Every artifact embeds the scenario hash and seed: the JSON summaries as
// fields, the CSVs as a leading "# scenario <hash> seed <n>" comment line.
std::string result_json(const ScenarioResult& result);
std::string sweep_csv(const std::vector<experiment::SweepRow>& rows, std::uint64_t scenario_hash,
                      std::uint64_t seed);

void write_posterior_csv(std::ostream& out, const quantum::PosteriorResult& posterior,
                         std::uint64_t scenario_hash, std::uint64_t seed);
std::string posterior_summary_json(const quantum::PosteriorResult& posterior,
                                   std::uint64_t scenario_hash, std::uint64_t seed);

struct GoldenRow {
  std::string name;
  double value = 0.0;
  std::string unit;
  std::string description;

  bool operator==(const GoldenRow&) const = default;
};

// Reference values the test suite checks against, one row per quantity.
std::vector<GoldenRow> golden_reference_rows();

void write_golden_csv(std::ostream& out, const std::vector<GoldenRow>& rows);
std::vector<GoldenRow> read_golden_csv(std::istream& in);

// Writes golden_values.csv and a regeneration log into the directory,
// creating it if needed; returns the paths written.
std::vector<std::string> generate_reference_tables(const std::string& directory);

}  // namespace qfso::scenario
