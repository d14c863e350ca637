#include "qfso/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <sstream>

namespace qfso::scenario {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegree = kPi / 180.0;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config: " + path + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + item.key(), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  const json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_number()) fail(path + "." + key, "expected a number");
  return j->get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& path, const char* key,
                        std::uint64_t fallback) {
  const json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_number_unsigned()) fail(path + "." + key, "expected a non-negative integer");
  return j->get<std::uint64_t>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  const json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_number_integer()) fail(path + "." + key, "expected an integer");
  return j->get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  const json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_boolean()) fail(path + "." + key, "expected true or false");
  return j->get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
  const json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_string()) fail(path + "." + key, "expected a string");
  return j->get<std::string>();
}

const json& get_object(const json& obj, const std::string& path, const char* key) {
  const json* j = find(obj, key);
  if (!j || !j->is_object()) fail(path + "." + key, "expected an object");
  return *j;
}

mie::RefractiveIndex parse_index(const json& obj, const std::string& path,
                                 mie::RefractiveIndex fallback) {
  check_keys(obj, path, {"real", "imag"});
  mie::RefractiveIndex index = fallback;
  index.real_part = get_number(obj, path, "real", fallback.real_part);
  index.imag_part = get_number(obj, path, "imag", fallback.imag_part);
  return index;
}

channel::ParticleSizeDistribution parse_distribution(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"kind", "median_diameter_m", "geometric_std", "min_diameter_m", "max_diameter_m",
              "size_classes", "refractive_index", "material_density_kg_m3", "table"});
  channel::ParticleSizeDistribution dist;
  const std::string kind = get_string(obj, path, "kind", "lognormal");
  if (kind == "lognormal") {
    dist.kind = channel::DistributionKind::lognormal;
  } else if (kind == "tabulated") {
    dist.kind = channel::DistributionKind::tabulated;
  } else {
    fail(path + ".kind", "expected \"lognormal\" or \"tabulated\"");
  }
  dist.median_diameter = get_number(obj, path, "median_diameter_m", dist.median_diameter);
  dist.geometric_std = get_number(obj, path, "geometric_std", dist.geometric_std);
  dist.min_diameter = get_number(obj, path, "min_diameter_m", dist.min_diameter);
  dist.max_diameter = get_number(obj, path, "max_diameter_m", dist.max_diameter);
  dist.size_classes = get_int(obj, path, "size_classes", dist.size_classes);
  dist.material_density = get_number(obj, path, "material_density_kg_m3", dist.material_density);
  if (const json* index = find(obj, "refractive_index")) {
    if (!index->is_object()) fail(path + ".refractive_index", "expected an object");
    dist.refractive_index = parse_index(*index, path + ".refractive_index", dist.refractive_index);
  }
  if (const json* table = find(obj, "table")) {
    if (!table->is_array()) fail(path + ".table", "expected an array");
    dist.table.clear();
    for (std::size_t i = 0; i < table->size(); ++i) {
      const std::string row_path = path + ".table[" + std::to_string(i) + "]";
      const json& row = (*table)[i];
      if (!row.is_object()) fail(row_path, "expected an object");
      check_keys(row, row_path, {"diameter_m", "weight"});
      channel::SizeClass entry;
      entry.diameter = get_number(row, row_path, "diameter_m", 0.0);
      entry.weight = get_number(row, row_path, "weight", 0.0);
      dist.table.push_back(entry);
    }
  }
  return dist;
}

GeometryConfig parse_geometry(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"wavelength_nm", "link_distance_m", "transmitter_aperture_m", "receiver_aperture_m",
              "zenith_angle_deg", "start_height_m", "direction"});
  GeometryConfig geometry;
  geometry.wavelength_nm = get_number(obj, path, "wavelength_nm", geometry.wavelength_nm);
  geometry.link_distance_m = get_number(obj, path, "link_distance_m", geometry.link_distance_m);
  geometry.transmitter_aperture_m =
      get_number(obj, path, "transmitter_aperture_m", geometry.transmitter_aperture_m);
  geometry.receiver_aperture_m =
      get_number(obj, path, "receiver_aperture_m", geometry.receiver_aperture_m);
  geometry.zenith_angle_deg =
      get_number(obj, path, "zenith_angle_deg", geometry.zenith_angle_deg);
  geometry.start_height_m = get_number(obj, path, "start_height_m", geometry.start_height_m);
  const std::string direction = get_string(obj, path, "direction", "downlink");
  if (direction == "downlink") {
    geometry.direction = link::Direction::downlink;
  } else if (direction == "uplink") {
    geometry.direction = link::Direction::uplink;
  } else {
    fail(path + ".direction", "expected \"downlink\" or \"uplink\"");
  }
  return geometry;
}

link::TurbulenceProfile parse_turbulence(const json& obj, const std::string& path) {
  check_keys(obj, path, {"rms_wind_speed_m_s", "ground_turbulence"});
  link::TurbulenceProfile profile;
  profile.rms_wind_speed = get_number(obj, path, "rms_wind_speed_m_s", profile.rms_wind_speed);
  profile.ground_turbulence =
      get_number(obj, path, "ground_turbulence", profile.ground_turbulence);
  return profile;
}

channel::StabilizedCloud parse_cloud(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"kind", "diameter_m", "water_content_g_m3", "droplet_diameter_m", "droplet_index",
              "soil_loading_g_m3", "soil"});
  channel::StabilizedCloud cloud;
  cloud.diameter = get_number(obj, path, "diameter_m", cloud.diameter);
  cloud.water_content = get_number(obj, path, "water_content_g_m3", cloud.water_content);
  cloud.droplet_diameter = get_number(obj, path, "droplet_diameter_m", cloud.droplet_diameter);
  if (const json* index = find(obj, "droplet_index")) {
    if (!index->is_object()) fail(path + ".droplet_index", "expected an object");
    cloud.droplet_index = parse_index(*index, path + ".droplet_index", cloud.droplet_index);
  }
  cloud.soil_loading = get_number(obj, path, "soil_loading_g_m3", cloud.soil_loading);
  if (const json* soil = find(obj, "soil")) {
    if (!soil->is_object()) fail(path + ".soil", "expected an object");
    cloud.soil_distribution = parse_distribution(*soil, path + ".soil");
  }
  return cloud;
}

HazeConfig parse_haze(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"kind", "pm25_ug_m3", "thickness_m", "elevation_deg", "mass_extinction_m2_g",
              "humidity_valid"});
  HazeConfig haze;
  haze.pm25_ug_m3 = get_number(obj, path, "pm25_ug_m3", haze.pm25_ug_m3);
  haze.thickness_m = get_number(obj, path, "thickness_m", haze.thickness_m);
  haze.elevation_deg = get_number(obj, path, "elevation_deg", haze.elevation_deg);
  haze.mass_extinction_m2_g =
      get_number(obj, path, "mass_extinction_m2_g", haze.mass_extinction_m2_g);
  haze.humidity_valid = get_bool(obj, path, "humidity_valid", haze.humidity_valid);
  return haze;
}

ExperimentPlan parse_experiment(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"pairs_per_basis", "attenuations_db", "chains", "burn_in", "samples_per_chain",
              "thin", "convergence_tolerance", "max_scans_per_chain", "sweep_path",
              "posterior_path"});
  ExperimentPlan plan;
  plan.pairs_per_basis = get_count(obj, path, "pairs_per_basis", plan.pairs_per_basis);
  if (const json* list = find(obj, "attenuations_db")) {
    if (!list->is_array() || list->empty()) fail(path + ".attenuations_db", "expected a non-empty array");
    plan.attenuations_db.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      const json& entry = (*list)[i];
      if (!entry.is_number()) {
        fail(path + ".attenuations_db[" + std::to_string(i) + "]", "expected a number");
      }
      plan.attenuations_db.push_back(entry.get<double>());
    }
  }
  plan.sampler.chains = get_int(obj, path, "chains", plan.sampler.chains);
  plan.sampler.burn_in = get_int(obj, path, "burn_in", plan.sampler.burn_in);
  plan.sampler.samples_per_chain =
      get_int(obj, path, "samples_per_chain", plan.sampler.samples_per_chain);
  plan.sampler.thin = get_int(obj, path, "thin", plan.sampler.thin);
  plan.sampler.convergence_tolerance =
      get_number(obj, path, "convergence_tolerance", plan.sampler.convergence_tolerance);
  plan.sampler.max_scans_per_chain =
      get_int(obj, path, "max_scans_per_chain", plan.sampler.max_scans_per_chain);
  plan.sweep_path = get_string(obj, path, "sweep_path", plan.sweep_path);
  plan.posterior_path = get_string(obj, path, "posterior_path", plan.posterior_path);
  return plan;
}

Scenario parse_scenario_json(const json& root) {
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "$",
             {"schema", "seed", "clear_air_db", "output_path", "geometry", "turbulence",
              "disturbance", "experiment"});
  const json* schema = find(root, "schema");
  if (!schema) fail("$.schema", "missing; expected 1");
  if (!schema->is_number_integer() || schema->get<int>() != 1) {
    fail("$.schema", "unsupported schema version; expected 1");
  }

  Scenario scenario;
  scenario.seed = get_count(root, "$", "seed", scenario.seed);
  scenario.clear_air_db = get_number(root, "$", "clear_air_db", scenario.clear_air_db);
  scenario.output_path = get_string(root, "$", "output_path", scenario.output_path);
  if (find(root, "geometry")) {
    scenario.geometry = parse_geometry(get_object(root, "$", "geometry"), "$.geometry");
  }
  if (find(root, "turbulence")) {
    scenario.turbulence = parse_turbulence(get_object(root, "$", "turbulence"), "$.turbulence");
  }
  if (const json* disturbance = find(root, "disturbance")) {
    if (!disturbance->is_object()) fail("$.disturbance", "expected an object");
    const std::string kind = get_string(*disturbance, "$.disturbance", "kind", "none");
    if (kind == "none") {
      check_keys(*disturbance, "$.disturbance", {"kind"});
      scenario.disturbance = DisturbanceKind::none;
    } else if (kind == "cloud") {
      scenario.disturbance = DisturbanceKind::cloud;
      scenario.cloud = parse_cloud(*disturbance, "$.disturbance");
    } else if (kind == "column") {
      check_keys(*disturbance, "$.disturbance", {"kind", "path", "distribution"});
      scenario.disturbance = DisturbanceKind::column;
      scenario.column_path = get_string(*disturbance, "$.disturbance", "path", "");
      if (scenario.column_path.empty()) fail("$.disturbance.path", "missing column CSV path");
      if (find(*disturbance, "distribution")) {
        scenario.column_distribution = parse_distribution(
            get_object(*disturbance, "$.disturbance", "distribution"),
            "$.disturbance.distribution");
      }
    } else if (kind == "haze") {
      scenario.disturbance = DisturbanceKind::haze;
      scenario.haze = parse_haze(*disturbance, "$.disturbance");
    } else {
      fail("$.disturbance.kind", "expected one of \"none\", \"cloud\", \"column\", \"haze\"");
    }
  }
  if (const json* experiment = find(root, "experiment")) {
    if (!experiment->is_object()) fail("$.experiment", "expected an object");
    scenario.experiment = parse_experiment(*experiment, "$.experiment");
  }
  return scenario;
}

json emit_index(const mie::RefractiveIndex& index) {
  return json{{"real", index.real_part}, {"imag", index.imag_part}};
}

json emit_distribution(const channel::ParticleSizeDistribution& dist) {
  json obj{
      {"kind", dist.kind == channel::DistributionKind::lognormal ? "lognormal" : "tabulated"},
      {"median_diameter_m", dist.median_diameter},
      {"geometric_std", dist.geometric_std},
      {"min_diameter_m", dist.min_diameter},
      {"max_diameter_m", dist.max_diameter},
      {"size_classes", dist.size_classes},
      {"refractive_index", emit_index(dist.refractive_index)},
      {"material_density_kg_m3", dist.material_density},
  };
  if (!dist.table.empty()) {
    json table = json::array();
    for (const channel::SizeClass& entry : dist.table) {
      table.push_back(json{{"diameter_m", entry.diameter}, {"weight", entry.weight}});
    }
    obj["table"] = std::move(table);
  }
  return obj;
}

json emit_scenario_json(const Scenario& scenario) {
  json root;
  root["schema"] = 1;
  root["seed"] = scenario.seed;
  root["clear_air_db"] = scenario.clear_air_db;
  if (!scenario.output_path.empty()) root["output_path"] = scenario.output_path;
  root["geometry"] = json{
      {"wavelength_nm", scenario.geometry.wavelength_nm},
      {"link_distance_m", scenario.geometry.link_distance_m},
      {"transmitter_aperture_m", scenario.geometry.transmitter_aperture_m},
      {"receiver_aperture_m", scenario.geometry.receiver_aperture_m},
      {"zenith_angle_deg", scenario.geometry.zenith_angle_deg},
      {"start_height_m", scenario.geometry.start_height_m},
      {"direction",
       scenario.geometry.direction == link::Direction::downlink ? "downlink" : "uplink"},
  };
  root["turbulence"] = json{
      {"rms_wind_speed_m_s", scenario.turbulence.rms_wind_speed},
      {"ground_turbulence", scenario.turbulence.ground_turbulence},
  };
  switch (scenario.disturbance) {
    case DisturbanceKind::none:
      root["disturbance"] = json{{"kind", "none"}};
      break;
    case DisturbanceKind::cloud:
      root["disturbance"] = json{
          {"kind", "cloud"},
          {"diameter_m", scenario.cloud.diameter},
          {"water_content_g_m3", scenario.cloud.water_content},
          {"droplet_diameter_m", scenario.cloud.droplet_diameter},
          {"droplet_index", emit_index(scenario.cloud.droplet_index)},
          {"soil_loading_g_m3", scenario.cloud.soil_loading},
          {"soil", emit_distribution(scenario.cloud.soil_distribution)},
      };
      break;
    case DisturbanceKind::column:
      root["disturbance"] = json{
          {"kind", "column"},
          {"path", scenario.column_path},
          {"distribution", emit_distribution(scenario.column_distribution)},
      };
      break;
    case DisturbanceKind::haze:
      root["disturbance"] = json{
          {"kind", "haze"},
          {"pm25_ug_m3", scenario.haze.pm25_ug_m3},
          {"thickness_m", scenario.haze.thickness_m},
          {"elevation_deg", scenario.haze.elevation_deg},
          {"mass_extinction_m2_g", scenario.haze.mass_extinction_m2_g},
          {"humidity_valid", scenario.haze.humidity_valid},
      };
      break;
  }
  if (scenario.experiment) {
    const ExperimentPlan& plan = *scenario.experiment;
    json experiment{
        {"pairs_per_basis", plan.pairs_per_basis},
        {"attenuations_db", plan.attenuations_db},
        {"chains", plan.sampler.chains},
        {"burn_in", plan.sampler.burn_in},
        {"samples_per_chain", plan.sampler.samples_per_chain},
        {"thin", plan.sampler.thin},
        {"convergence_tolerance", plan.sampler.convergence_tolerance},
        {"max_scans_per_chain", plan.sampler.max_scans_per_chain},
    };
    if (!plan.sweep_path.empty()) experiment["sweep_path"] = plan.sweep_path;
    if (!plan.posterior_path.empty()) experiment["posterior_path"] = plan.posterior_path;
    root["experiment"] = std::move(experiment);
  }
  return root;
}

template <typename F>
auto named_op(const char* name, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

std::string hex_hash(std::uint64_t hash) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << hash;
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

// 20.0 -> "20db", 12.5 -> "12p5db": filesystem-safe row labels.
std::string attenuation_label(double db) {
  std::ostringstream out;
  out << db;
  std::string label = out.str();
  for (char& c : label) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return label + "db";
}

std::string suffixed_path(const std::string& path, const std::string& label) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t sep = path.find_last_of("/\\");
  if (dot == std::string::npos || (sep != std::string::npos && dot < sep)) {
    return path + "_" + label;
  }
  return path.substr(0, dot) + "_" + label + path.substr(dot);
}

std::string replace_extension(const std::string& path, const std::string& extension) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t sep = path.find_last_of("/\\");
  if (dot == std::string::npos || (sep != std::string::npos && dot < sep)) {
    return path + extension;
  }
  return path.substr(0, dot) + extension;
}

}  // namespace

link::LinkGeometry GeometryConfig::to_link_geometry() const {
  link::LinkGeometry geometry;
  geometry.wavelength = wavelength_nm * 1e-9;
  geometry.link_distance = link_distance_m;
  geometry.transmitter_aperture = transmitter_aperture_m;
  geometry.receiver_aperture = receiver_aperture_m;
  geometry.zenith_angle = zenith_angle_deg * kDegree;
  geometry.start_height = start_height_m;
  geometry.direction = direction;
  return geometry;
}

channel::HazeScenario HazeConfig::to_haze_scenario() const {
  channel::HazeScenario haze;
  haze.pm25 = pm25_ug_m3;
  haze.thickness = thickness_m;
  haze.elevation_angle = elevation_deg * kDegree;
  haze.mass_extinction_efficiency = mass_extinction_m2_g;
  haze.humidity_valid = humidity_valid;
  return haze;
}

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = e.byte > 0 ? std::min<std::size_t>(e.byte - 1, text.size()) : 0;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config: line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  return parse_scenario_json(root);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

std::string emit_scenario(const Scenario& scenario) {
  return emit_scenario_json(scenario).dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  Scenario canonical = scenario;
  canonical.output_path.clear();
  if (canonical.experiment) {
    canonical.experiment->sweep_path.clear();
    canonical.experiment->posterior_path.clear();
  }
  return fnv1a64(emit_scenario(canonical));
}

ScenarioResult evaluate_scenario(const Scenario& scenario) {
  ScenarioResult result;
  result.seed = scenario.seed;
  result.scenario_hash = scenario_hash(scenario);

  const link::LinkGeometry geometry = scenario.geometry.to_link_geometry();
  double theta_atm = 0.0;
  if (geometry.direction == link::Direction::uplink) {
    const double r0 = named_op("fried parameter", [&] {
      return link::fried_parameter(geometry, scenario.turbulence);
    });
    theta_atm = link::atmospheric_divergence(r0, geometry.wavelength);
  }
  result.a_atm_db = named_op("channel attenuation", [&] {
    return link::channel_attenuation(geometry, theta_atm, scenario.clear_air_db);
  });

  link::LossLedger ledger;
  ledger.a_atm = result.a_atm_db;
  const double wavelength = geometry.wavelength;
  switch (scenario.disturbance) {
    case DisturbanceKind::none:
      break;
    case DisturbanceKind::cloud:
      result.a_disturbance_db = named_op("cloud attenuation", [&] {
        return channel::stabilized_cloud_attenuation(scenario.cloud, wavelength);
      });
      ledger.a_nuc = result.a_disturbance_db;
      break;
    case DisturbanceKind::column: {
      const channel::AtmosphericColumn column = [&] {
        try {
          return channel::read_column_csv(scenario.column_path);
        } catch (const std::exception& e) {
          throw ConfigError("config: $.disturbance.path: " + std::string(e.what()));
        }
      }();
      result.a_disturbance_db = named_op("column attenuation", [&] {
        return channel::column_attenuation(column, scenario.column_distribution, wavelength);
      });
      ledger.a_nuc = result.a_disturbance_db;
      break;
    }
    case DisturbanceKind::haze:
      result.a_disturbance_db = named_op("haze attenuation", [&] {
        return channel::haze_attenuation(scenario.haze.to_haze_scenario(), wavelength);
      });
      ledger.a_smoke = result.a_disturbance_db;
      break;
  }
  result.a_total_paper_db =
      named_op("loss combination", [&] { return link::combine_losses_power(ledger); });
  result.a_total_serial_db =
      named_op("loss combination", [&] { return link::combine_losses_serial(ledger); });

  if (scenario.experiment) {
    const ExperimentPlan& plan = *scenario.experiment;
    for (std::size_t i = 0; i < plan.attenuations_db.size(); ++i) {
      experiment::ExperimentConfig config;
      config.pairs_per_basis = plan.pairs_per_basis;
      config.attenuation_db = plan.attenuations_db[i];
      config.seed = scenario.seed + i;
      experiment::EstimateBundle bundle = named_op("posterior estimation", [&] {
        return experiment::estimate_attenuation(config, plan.sampler);
      });
      result.sweep.push_back(bundle.row);
      result.posteriors.push_back(std::move(bundle.posterior));
    }
  }
  return result;
}

ScenarioResult run_scenario(const Scenario& scenario) {
  ScenarioResult result = evaluate_scenario(scenario);
  if (!scenario.output_path.empty()) {
    write_text_file(scenario.output_path, result_json(result));
  }
  if (scenario.experiment) {
    const ExperimentPlan& plan = *scenario.experiment;
    if (!plan.sweep_path.empty()) {
      write_text_file(plan.sweep_path, sweep_csv(result.sweep, result.scenario_hash, result.seed));
    }
    if (!plan.posterior_path.empty()) {
      for (std::size_t i = 0; i < result.posteriors.size(); ++i) {
        const std::string base =
            result.posteriors.size() > 1
                ? suffixed_path(plan.posterior_path,
                                attenuation_label(result.sweep[i].attenuation_db))
                : plan.posterior_path;
        std::ostringstream samples;
        write_posterior_csv(samples, result.posteriors[i], result.scenario_hash, result.seed);
        write_text_file(base, samples.str());
        write_text_file(replace_extension(base, ".json"),
                        posterior_summary_json(result.posteriors[i], result.scenario_hash,
                                               result.seed));
      }
    }
  }
  return result;
}

std::string result_json(const ScenarioResult& result) {
  json summary;
  summary["a_atm_db"] = result.a_atm_db;
  if (result.a_disturbance_db) {
    summary["a_disturbance_db"] = *result.a_disturbance_db;
  } else {
    summary["a_disturbance_db"] = nullptr;
  }
  summary["a_total_paper_db"] = result.a_total_paper_db;
  summary["a_total_serial_db"] = result.a_total_serial_db;
  summary["scenario_hash"] = hex_hash(result.scenario_hash);
  summary["seed"] = result.seed;
  return summary.dump(2) + "\n";
}

namespace {

std::string stamp_comment(std::uint64_t scenario_hash, std::uint64_t seed) {
  return "# scenario " + hex_hash(scenario_hash) + " seed " + std::to_string(seed) + "\n";
}

}  // namespace

std::string sweep_csv(const std::vector<experiment::SweepRow>& rows, std::uint64_t scenario_hash,
                      std::uint64_t seed) {
  std::ostringstream out;
  out << stamp_comment(scenario_hash, seed);
  out << "attenuation_db,alpha_mean,alpha_std,eof_mean,eof_std,converged\n";
  out << std::setprecision(17);
  for (const experiment::SweepRow& row : rows) {
    out << row.attenuation_db << ',' << row.alpha_mean << ',' << row.alpha_std << ','
        << row.eof_mean << ',' << row.eof_std << ',' << (row.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_posterior_csv(std::ostream& out, const quantum::PosteriorResult& posterior,
                         std::uint64_t scenario_hash, std::uint64_t seed) {
  out << stamp_comment(scenario_hash, seed);
  out << "chain,sample_index,alpha,eof,fidelity\n";
  out << std::setprecision(17);
  for (std::size_t c = 0; c < posterior.chains.size(); ++c) {
    for (std::size_t i = 0; i < posterior.chains[c].size(); ++i) {
      const quantum::PosteriorSample& s = posterior.chains[c][i];
      out << c << ',' << i << ',' << s.alpha << ',' << s.eof << ',' << s.fidelity << '\n';
    }
  }
}

std::string posterior_summary_json(const quantum::PosteriorResult& posterior,
                                   std::uint64_t scenario_hash, std::uint64_t seed) {
  const auto samples = posterior.pooled();
  const auto alpha = quantum::bme_estimate(samples, [](const auto& s) { return s.alpha; });
  const auto eof = quantum::bme_estimate(samples, [](const auto& s) { return s.eof; });
  json summary;
  summary["alpha_mean"] = alpha.first;
  summary["alpha_std"] = alpha.second;
  summary["eof_mean"] = eof.first;
  summary["eof_std"] = eof.second;
  summary["n_samples"] = samples.size();
  summary["converged"] = posterior.converged;
  summary["scenario_hash"] = hex_hash(scenario_hash);
  summary["seed"] = seed;
  return summary.dump(2) + "\n";
}

std::vector<GoldenRow> golden_reference_rows() {
  return {
      {"clear_air_downlink_db", 16.0, "dB",
       "400 km downlink; 0.1 m transmitter; 1 m receiver; 1550 nm; 1 dB absorption"},
      {"clear_air_uplink_db", 34.0, "dB",
       "same geometry reversed; divergence broadened by ground turbulence"},
      {"fried_parameter_1550nm_m", 0.193, "m",
       "zenith coherence length; 21 m/s wind; 1.7e-14 ground structure constant"},
      {"fried_parameter_500nm_m", 0.05, "m", "same turbulence profile evaluated at 500 nm"},
      {"divergence_1p0m_rad", 9.87e-7, "rad",
       "diffraction half-angle of a 1 m aperture at 1550 nm"},
      {"divergence_0p1m_rad", 9.87e-6, "rad",
       "diffraction half-angle of a 0.1 m aperture at 1550 nm"},
      {"combined_power_55p6_16p0_db", 55.6, "dB",
       "power-sum combination of 55.6 dB and 16.0 dB terms"},
      {"combined_power_9p12_16p0_db", 16.8, "dB",
       "power-sum combination of 9.12 dB and 16.0 dB terms"},
  };
}

void write_golden_csv(std::ostream& out, const std::vector<GoldenRow>& rows) {
  out << "name,value,unit,description\n";
  out << std::setprecision(17);
  for (const GoldenRow& row : rows) {
    out << row.name << ',' << row.value << ',' << row.unit << ',' << row.description << '\n';
  }
}

std::vector<GoldenRow> read_golden_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "name,value,unit,description") {
    throw std::runtime_error("golden csv: unexpected header");
  }
  std::vector<GoldenRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string, 3> head;
    std::size_t start = 0;
    for (std::size_t field = 0; field < 3; ++field) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        throw std::runtime_error("golden csv, line " + std::to_string(line_no) +
                                 ": expected 4 comma-separated fields");
      }
      head[field] = line.substr(start, comma - start);
      start = comma + 1;
    }
    GoldenRow row;
    row.name = head[0];
    try {
      std::size_t used = 0;
      row.value = std::stod(head[1], &used);
      if (used != head[1].size()) throw std::invalid_argument(head[1]);
    } catch (const std::exception&) {
      throw std::runtime_error("golden csv, line " + std::to_string(line_no) +
                               ": bad numeric value '" + head[1] + "'");
    }
    row.unit = head[2];
    row.description = line.substr(start);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> generate_reference_tables(const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path base(directory);

  const std::vector<GoldenRow> rows = golden_reference_rows();
  const std::string table_path = (base / "golden_values.csv").string();
  std::ostringstream table;
  write_golden_csv(table, rows);
  write_text_file(table_path, table.str());

  std::ostringstream log;
  log << "golden reference tables\n";
  log << "rows: " << rows.size() << "\n";
  for (const GoldenRow& row : rows) {
    log << "  " << row.name << " = " << row.value << " " << row.unit << "\n";
  }
  const std::string log_path = (base / "golden_log.txt").string();
  write_text_file(log_path, log.str());

  return {table_path, log_path};
}

}  // namespace qfso::scenario
