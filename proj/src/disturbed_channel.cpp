#include "qfso/disturbed_channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qfso::channel {

namespace {

constexpr double kDbPerOpticalDepth = 4.342944819032518;  // 10 log10(e)
constexpr double kWaterDensity = 1000.0;                  // kg/m^3
constexpr double kAirViscosity = 1.81e-5;                 // Pa s
constexpr double kGravity = 9.81;                         // m/s^2

double lognormal_cdf(double diameter, double median, double geometric_std) {
  const double z = std::log(diameter / median) / std::log(geometric_std);
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double sphere_mass(double diameter, double material_density) {
  return material_density * std::numbers::pi / 6.0 * diameter * diameter * diameter;
}

double stokes_settling_velocity(double diameter, double material_density) {
  return material_density * kGravity * diameter * diameter / (18.0 * kAirViscosity);
}

void check_column(const AtmosphericColumn& column) {
  for (double r : column.class_radii) {
    if (!(r > 0.0)) throw std::invalid_argument("column: class radii must be positive");
  }
  for (const ColumnLayer& layer : column.layers) {
    if (!(layer.thickness > 0.0)) {
      throw std::invalid_argument("column: layer thickness must be positive");
    }
    if (layer.number_density.size() != column.class_radii.size()) {
      throw std::invalid_argument("column: layer density count must match class count");
    }
    for (double n : layer.number_density) {
      if (n < 0.0 || !std::isfinite(n)) {
        throw std::invalid_argument("column: number densities must be finite and non-negative");
      }
    }
  }
}

AtmosphericColumn homogeneous_column(const std::vector<SizeClass>& classes, double total_density,
                                     double thickness) {
  AtmosphericColumn column;
  column.class_radii.reserve(classes.size());
  ColumnLayer layer;
  layer.thickness = thickness;
  layer.number_density.reserve(classes.size());
  for (const SizeClass& c : classes) {
    column.class_radii.push_back(c.diameter / 2.0);
    layer.number_density.push_back(total_density * c.weight);
  }
  column.layers.push_back(std::move(layer));
  return column;
}

ParticleSizeDistribution droplet_distribution(const StabilizedCloud& cloud) {
  ParticleSizeDistribution d;
  d.kind = DistributionKind::tabulated;
  d.refractive_index = cloud.droplet_index;
  d.material_density = kWaterDensity;
  d.table = {{cloud.droplet_diameter, 1.0}};
  return d;
}

}  // namespace

std::vector<SizeClass> lognormal_size_classes(const ParticleSizeDistribution& distribution) {
  if (distribution.kind != DistributionKind::lognormal) {
    throw std::invalid_argument("lognormal_size_classes: distribution is not lognormal");
  }
  if (!(distribution.min_diameter > 0.0) ||
      !(distribution.min_diameter < distribution.median_diameter) ||
      !(distribution.median_diameter < distribution.max_diameter)) {
    throw std::invalid_argument("lognormal_size_classes: need 0 < min < median < max");
  }
  if (distribution.size_classes < 1) {
    throw std::invalid_argument("lognormal_size_classes: need at least one size class");
  }
  if (!(distribution.geometric_std > 1.0)) {
    throw std::invalid_argument("lognormal_size_classes: geometric std must exceed 1");
  }

  const int count = distribution.size_classes;
  const double log_min = std::log(distribution.min_diameter);
  const double log_step = (std::log(distribution.max_diameter) - log_min) / count;

  std::vector<SizeClass> classes(static_cast<std::size_t>(count));
  double weight_sum = 0.0;
  for (int i = 0; i < count; ++i) {
    const double lo = std::exp(log_min + i * log_step);
    const double hi = std::exp(log_min + (i + 1) * log_step);
    classes[static_cast<std::size_t>(i)].diameter = std::sqrt(lo * hi);
    const double w = lognormal_cdf(hi, distribution.median_diameter, distribution.geometric_std) -
                     lognormal_cdf(lo, distribution.median_diameter, distribution.geometric_std);
    classes[static_cast<std::size_t>(i)].weight = w;
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) {
    throw std::invalid_argument("lognormal_size_classes: distribution has no mass in [min, max]");
  }
  for (SizeClass& c : classes) c.weight /= weight_sum;
  return classes;
}

std::vector<SizeClass> size_classes(const ParticleSizeDistribution& distribution) {
  if (distribution.kind == DistributionKind::lognormal) {
    return lognormal_size_classes(distribution);
  }
  if (distribution.table.empty()) {
    throw std::invalid_argument("size_classes: tabulated distribution has no entries");
  }
  double weight_sum = 0.0;
  for (const SizeClass& c : distribution.table) {
    if (!(c.diameter > 0.0) || c.weight < 0.0) {
      throw std::invalid_argument("size_classes: table entries need diameter > 0, weight >= 0");
    }
    weight_sum += c.weight;
  }
  if (!(weight_sum > 0.0)) {
    throw std::invalid_argument("size_classes: table weights sum to zero");
  }
  std::vector<SizeClass> classes = distribution.table;
  for (SizeClass& c : classes) c.weight /= weight_sum;
  return classes;
}

double number_density_from_mass(const ParticleSizeDistribution& distribution,
                                double mass_loading_g_m3) {
  if (mass_loading_g_m3 < 0.0) {
    throw std::invalid_argument("number_density_from_mass: mass loading must be non-negative");
  }
  if (!(distribution.material_density > 0.0)) {
    throw std::invalid_argument("number_density_from_mass: material density must be positive");
  }
  if (mass_loading_g_m3 == 0.0) return 0.0;
  double mean_mass = 0.0;
  for (const SizeClass& c : size_classes(distribution)) {
    mean_mass += c.weight * sphere_mass(c.diameter, distribution.material_density);
  }
  return mass_loading_g_m3 * 1e-3 / mean_mass;
}

double column_attenuation(const AtmosphericColumn& column,
                          const ParticleSizeDistribution& distribution, double wavelength) {
  check_column(column);
  if (!(wavelength > 0.0)) {
    throw std::invalid_argument("column_attenuation: wavelength must be positive");
  }

  const std::size_t n_classes = column.class_radii.size();
  std::vector<double> column_density(n_classes, 0.0);  // integral of n dz per class
  for (const ColumnLayer& layer : column.layers) {
    for (std::size_t d = 0; d < n_classes; ++d) {
      column_density[d] += layer.number_density[d] * layer.thickness;
    }
  }

  double tau = 0.0;
  for (std::size_t d = 0; d < n_classes; ++d) {
    if (column_density[d] == 0.0) continue;
    const double r = column.class_radii[d];
    const double x = mie::size_parameter(2.0 * r, wavelength);
    const double q_ext = mie::mie_efficiencies(distribution.refractive_index, x).q_ext;
    tau += column_density[d] * std::numbers::pi * r * r * q_ext;
  }
  return kDbPerOpticalDepth * tau;
}

CloudColumn cloud_column(const StabilizedCloud& cloud) {
  if (!(cloud.diameter > 0.0)) {
    throw std::invalid_argument("cloud_column: cloud diameter must be positive");
  }
  if (cloud.water_content < 0.0 || cloud.soil_loading < 0.0) {
    throw std::invalid_argument("cloud_column: mass loadings must be non-negative");
  }
  const ParticleSizeDistribution droplets = droplet_distribution(cloud);
  CloudColumn column;
  column.droplets = homogeneous_column(size_classes(droplets),
                                       number_density_from_mass(droplets, cloud.water_content),
                                       cloud.diameter);
  column.soil = homogeneous_column(
      size_classes(cloud.soil_distribution),
      number_density_from_mass(cloud.soil_distribution, cloud.soil_loading), cloud.diameter);
  return column;
}

double cloud_column_attenuation(const CloudColumn& column, const StabilizedCloud& cloud,
                                double wavelength) {
  return column_attenuation(column.droplets, droplet_distribution(cloud), wavelength) +
         column_attenuation(column.soil, cloud.soil_distribution, wavelength);
}

double stabilized_cloud_attenuation(const StabilizedCloud& cloud, double wavelength) {
  return cloud_column_attenuation(cloud_column(cloud), cloud, wavelength);
}

namespace {

AtmosphericColumn diffuse_species(const AtmosphericColumn& homogeneous, double sigma0,
                                  double sigma, double survival_scale,
                                  const std::vector<double>& settling_velocity) {
  const ColumnLayer& base = homogeneous.layers.front();
  const std::size_t n_classes = homogeneous.class_radii.size();
  constexpr int kLayers = 11;

  AtmosphericColumn out;
  out.class_radii = homogeneous.class_radii;
  const double dilution = std::pow(sigma0 / sigma, 3);
  const double span = 6.0 * sigma;  // +-3 sigma
  const double thickness = span / kLayers;
  for (int l = 0; l < kLayers; ++l) {
    const double z = -3.0 * sigma + (l + 0.5) * thickness;
    ColumnLayer layer;
    layer.thickness = thickness;
    layer.number_density.resize(n_classes);
    for (std::size_t d = 0; d < n_classes; ++d) {
      const double survive =
          settling_velocity.empty() ? 1.0 : std::exp(-settling_velocity[d] * survival_scale);
      layer.number_density[d] = base.number_density[d] * dilution *
                                std::exp(-z * z / (2.0 * sigma * sigma)) * survive;
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

std::vector<double> settling_velocities(const AtmosphericColumn& column, double material_density) {
  std::vector<double> v;
  v.reserve(column.class_radii.size());
  for (double r : column.class_radii) {
    v.push_back(stokes_settling_velocity(2.0 * r, material_density));
  }
  return v;
}

}  // namespace

CloudColumn gaussian_puff_column(const StabilizedCloud& cloud, double time_after_stabilization,
                                 double diffusivity, bool settling) {
  if (time_after_stabilization < 0.0) {
    throw std::invalid_argument("gaussian_puff_column: time must be non-negative");
  }
  if (diffusivity < 0.0) {
    throw std::invalid_argument("gaussian_puff_column: diffusivity must be non-negative");
  }
  CloudColumn start = cloud_column(cloud);
  if (time_after_stabilization == 0.0) return start;

  // sigma0 makes the t -> 0 center-line integral of the Gaussian equal the
  // homogeneous column's n0 * diameter.
  const double sigma0 = cloud.diameter / std::sqrt(2.0 * std::numbers::pi);
  const double sigma =
      std::sqrt(sigma0 * sigma0 + 2.0 * diffusivity * time_after_stabilization);
  const double survival_scale = settling ? time_after_stabilization / cloud.diameter : 0.0;

  std::vector<double> none;
  CloudColumn out;
  out.droplets = diffuse_species(start.droplets, sigma0, sigma, survival_scale,
                                 settling ? settling_velocities(start.droplets, kWaterDensity)
                                          : none);
  out.soil = diffuse_species(
      start.soil, sigma0, sigma, survival_scale,
      settling ? settling_velocities(start.soil, cloud.soil_distribution.material_density)
               : none);
  return out;
}

double column_particle_count(const AtmosphericColumn& column) {
  double count = 0.0;
  for (const ColumnLayer& layer : column.layers) {
    for (double n : layer.number_density) count += n * layer.thickness;
  }
  return count;
}

double haze_attenuation(const HazeScenario& scenario, double wavelength) {
  (void)wavelength;  // gamma is specified at the operating wavelength
  if (scenario.pm25 < 0.0) {
    throw std::invalid_argument("haze_attenuation: pm25 must be non-negative");
  }
  if (!(scenario.thickness > 0.0)) {
    throw std::invalid_argument("haze_attenuation: thickness must be positive");
  }
  if (!(scenario.elevation_angle > 0.0) ||
      scenario.elevation_angle > std::numbers::pi / 2.0 + 1e-12) {
    throw std::invalid_argument("haze_attenuation: elevation must lie in (0, pi/2]");
  }
  if (!scenario.humidity_valid) {
    throw std::invalid_argument(
        "haze_attenuation: linear PM2.5 model only holds below 60% relative humidity");
  }
  const double concentration = scenario.pm25 * 1e-6;  // g/m^3
  const double beta_ext = scenario.mass_extinction_efficiency * concentration;  // 1/m
  return kDbPerOpticalDepth * beta_ext * scenario.thickness /
         std::sin(scenario.elevation_angle);
}

namespace {

[[noreturn]] void csv_error(std::size_t line, const std::string& message) {
  throw std::runtime_error("column csv, line " + std::to_string(line) + ": " + message);
}

}  // namespace

AtmosphericColumn read_column_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) csv_error(1, "missing header");
  ++line_no;
  // Tolerate a trailing carriage return from foreign line endings.
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "layer_index,thickness_m,class_index,radius_m,number_density_per_m3") {
    csv_error(line_no, "unexpected header '" + line + "'");
  }

  struct Row {
    long layer;
    double thickness;
    long cls;
    double radius;
    double density;
  };
  std::vector<Row> rows;
  long max_layer = -1;
  long max_class = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    Row row{};
    char c1, c2, c3, c4;
    if (!(fields >> row.layer >> c1 >> row.thickness >> c2 >> row.cls >> c3 >> row.radius >> c4 >>
          row.density) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      csv_error(line_no, "expected 5 comma-separated fields");
    }
    std::string rest;
    if (fields >> rest) csv_error(line_no, "trailing content '" + rest + "'");
    if (row.layer < 0 || row.cls < 0) csv_error(line_no, "indices must be non-negative");
    if (row.thickness <= 0.0) csv_error(line_no, "thickness must be positive");
    if (row.radius <= 0.0) csv_error(line_no, "radius must be positive");
    if (row.density < 0.0) csv_error(line_no, "number density must be non-negative");
    max_layer = std::max(max_layer, row.layer);
    max_class = std::max(max_class, row.cls);
    rows.push_back(row);
  }
  if (rows.empty()) csv_error(line_no + 1, "no data rows");

  const std::size_t n_layers = static_cast<std::size_t>(max_layer) + 1;
  const std::size_t n_classes = static_cast<std::size_t>(max_class) + 1;
  AtmosphericColumn column;
  column.class_radii.assign(n_classes, -1.0);
  column.layers.assign(n_layers, ColumnLayer{});
  for (ColumnLayer& layer : column.layers) {
    layer.number_density.assign(n_classes, -1.0);
  }

  for (const Row& row : rows) {
    ColumnLayer& layer = column.layers[static_cast<std::size_t>(row.layer)];
    const std::size_t d = static_cast<std::size_t>(row.cls);
    if (layer.thickness == 0.0) {
      layer.thickness = row.thickness;
    } else if (layer.thickness != row.thickness) {
      throw std::runtime_error("column csv: conflicting thickness for layer " +
                               std::to_string(row.layer));
    }
    if (column.class_radii[d] < 0.0) {
      column.class_radii[d] = row.radius;
    } else if (column.class_radii[d] != row.radius) {
      throw std::runtime_error("column csv: conflicting radius for class " +
                               std::to_string(row.cls));
    }
    if (layer.number_density[d] >= 0.0) {
      throw std::runtime_error("column csv: duplicate (layer, class) pair (" +
                               std::to_string(row.layer) + ", " + std::to_string(row.cls) + ")");
    }
    layer.number_density[d] = row.density;
  }

  for (std::size_t l = 0; l < n_layers; ++l) {
    if (column.layers[l].thickness == 0.0) {
      throw std::runtime_error("column csv: layer indices not contiguous, missing layer " +
                               std::to_string(l));
    }
    for (std::size_t d = 0; d < n_classes; ++d) {
      if (column.layers[l].number_density[d] < 0.0) {
        throw std::runtime_error("column csv: missing entry for layer " + std::to_string(l) +
                                 ", class " + std::to_string(d));
      }
    }
  }
  check_column(column);
  return column;
}

AtmosphericColumn read_column_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("column csv: cannot open '" + path + "'");
  return read_column_csv(in);
}

void write_column_csv(std::ostream& out, const AtmosphericColumn& column) {
  check_column(column);
  out << "layer_index,thickness_m,class_index,radius_m,number_density_per_m3\n";
  out.precision(17);
  for (std::size_t l = 0; l < column.layers.size(); ++l) {
    const ColumnLayer& layer = column.layers[l];
    for (std::size_t d = 0; d < column.class_radii.size(); ++d) {
      out << l << ',' << layer.thickness << ',' << d << ',' << column.class_radii[d] << ','
          << layer.number_density[d] << '\n';
    }
  }
}

void write_column_csv(const std::string& path, const AtmosphericColumn& column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("column csv: cannot open '" + path + "' for writing");
  write_column_csv(out, column);
  if (!out) throw std::runtime_error("column csv: write to '" + path + "' failed");
}

}  // namespace qfso::channel
