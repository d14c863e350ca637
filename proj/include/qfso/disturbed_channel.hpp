// Attenuation sources for a nuclear-disturbed atmosphere: the stabilized
// debris cloud, layered transported-dust columns, and PM2.5 fire haze.
// Everything funnels into an optical-depth sum over (layer, size-class)
// pairs; results are dB terms for the link-budget ledger.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qfso/mie.hpp"

namespace qfso::channel {

enum class DistributionKind { lognormal, tabulated };

struct SizeClass {
  double diameter = 0.0;  // meters
  double weight = 0.0;    // number fraction
};

struct ParticleSizeDistribution {
  DistributionKind kind = DistributionKind::lognormal;
  double median_diameter = 130e-6;
  double geometric_std = 4.0;
  double min_diameter = 3e-6;
  double max_diameter = 450e-6;
  int size_classes = 100;
  mie::RefractiveIndex refractive_index{1.55, 0.005};
  double material_density = 2600.0;  // kg/m^3
  std::vector<SizeClass> table;      // consulted when kind == tabulated
};

struct ColumnLayer {
  double thickness = 0.0;              // meters
  std::vector<double> number_density;  // particles/m^3, one entry per size class
};

struct AtmosphericColumn {
  std::vector<double> class_radii;  // meters, shared by all layers
  std::vector<ColumnLayer> layers;
};

struct StabilizedCloud {
  double diameter = 3e3;          // meters, through-center path length
  double water_content = 1.0;     // g/m^3
  double droplet_diameter = 12e-6;
  mie::RefractiveIndex droplet_index{1.318, 1.0e-4};
  double soil_loading = 1.0;      // g/m^3
  ParticleSizeDistribution soil_distribution{};
};

// Droplets and soil carry different refractive indices, so a cloud column
// keeps the two species separate and sums their attenuations.
struct CloudColumn {
  AtmosphericColumn droplets;
  AtmosphericColumn soil;
};

struct HazeScenario {
  double pm25 = 0.0;        // micrograms/m^3
  double thickness = 3000;  // meters
  double elevation_angle = 1.5707963267948966;  // radians
  double mass_extinction_efficiency = 3.0;      // m^2/g
  bool humidity_valid = true;  // linear model holds below 60% RH
};

// Discretizes the lognormal into size_classes bins with log-spaced edges over
// [min_diameter, max_diameter]; weights come from CDF differences and are
// renormalized to sum to 1.
std::vector<SizeClass> lognormal_size_classes(const ParticleSizeDistribution& distribution);

// Dispatches on kind; tabulated distributions return their (renormalized) table.
std::vector<SizeClass> size_classes(const ParticleSizeDistribution& distribution);

// Total particle number density for a mass loading in g/m^3, using the
// distribution's class-weighted mean particle mass.
double number_density_from_mass(const ParticleSizeDistribution& distribution,
                                double mass_loading_g_m3);

// Optical depth of the column times 10 log10(e). The distribution supplies
// the refractive index for the Mie efficiencies; radii come from the column.
double column_attenuation(const AtmosphericColumn& column,
                          const ParticleSizeDistribution& distribution, double wavelength);

// Homogeneous single-layer column for the stabilized cloud, path length equal
// to the through-center chord.
CloudColumn cloud_column(const StabilizedCloud& cloud);

// Attenuation of any cloud-derived column: droplet and soil contributions are
// evaluated separately and added.
double cloud_column_attenuation(const CloudColumn& column, const StabilizedCloud& cloud,
                                double wavelength);

double stabilized_cloud_attenuation(const StabilizedCloud& cloud, double wavelength);

// Gaussian dilution of the stabilized cloud a given time after stabilization:
// an 11-layer column spanning +-3 sigma with sigma^2 = sigma0^2 + 2 K t,
// sigma0 chosen so the t -> 0 path integral matches the homogeneous cloud.
// With settling enabled, each class is thinned by exp(-v_s t / diameter)
// using the Stokes terminal velocity for its material density.
CloudColumn gaussian_puff_column(const StabilizedCloud& cloud, double time_after_stabilization,
                                 double diffusivity, bool settling);

// Columnar particle count per unit area, summed over layers and classes.
double column_particle_count(const AtmosphericColumn& column);

// Koschmieder-style haze loss: 10 log10(e) * gamma * C * thickness / sin(elevation),
// with C the PM2.5 mass concentration converted to g/m^3.
double haze_attenuation(const HazeScenario& scenario, double wavelength);

// CSV interchange, header: layer_index,thickness_m,class_index,radius_m,number_density_per_m3
AtmosphericColumn read_column_csv(std::istream& in);
AtmosphericColumn read_column_csv(const std::string& path);
void write_column_csv(std::ostream& out, const AtmosphericColumn& column);
void write_column_csv(const std::string& path, const AtmosphericColumn& column);

}  // namespace qfso::channel
