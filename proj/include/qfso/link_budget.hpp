// Free-space optical link budget for a ground-satellite channel:
// diffraction spreading, Hufnagel-Valley turbulence, Fried parameter and
// aperture-truncation attenuation, plus dB bookkeeping for stacking
// independent loss mechanisms.
#pragma once

#include <optional>

namespace qfso::link {

enum class Direction { uplink, downlink };

struct LinkGeometry {
  double wavelength = 1550e-9;
  double link_distance = 400e3;
  double transmitter_aperture = 0.1;
  double receiver_aperture = 1.0;
  double zenith_angle = 0.0;
  double start_height = 0.0;
  Direction direction = Direction::downlink;
};

struct TurbulenceProfile {
  double rms_wind_speed = 21.0;        // m/s
  double ground_turbulence = 1.7e-14;  // m^{-2/3}
};

// Attenuation terms in dB. A term only participates in a combination when it
// has been set; a present zero still counts as a 0 dB contribution.
struct LossLedger {
  std::optional<double> a_atm;
  std::optional<double> a_nuc;
  std::optional<double> a_cloud;
  std::optional<double> a_smoke;
  std::optional<double> a_dir;
  std::optional<double> a_aperture;
};

// Diffraction half-angle lambda/(pi w0) with w0 = D_T/2.
double beam_divergence(const LinkGeometry& geometry);

// Beam radius after propagating a distance z.
double beam_waist_at(double z, double w0, double theta_d);

// Hufnagel-Valley refractive-index structure constant at height h.
double hv_structure_constant(double h, const TurbulenceProfile& profile);

// Fried coherence length over the slant path, integrating the HV profile
// from start_height up to min(link_distance, 100 km) with adaptive Simpson
// quadrature (relative tolerance 1e-6).
double fried_parameter(const LinkGeometry& geometry, const TurbulenceProfile& profile);

// Turbulence-induced divergence lambda/r0.
double atmospheric_divergence(double r0, double wavelength);

// Attenuation in dB for a Gaussian beam collected by a circular aperture:
// a_air - 10 log10(1 - exp(-2 D_R^2 / (D_T^2 + 4 L^2 (theta_d^2 + theta_atm^2)))).
// theta_atm enters only on uplink; a small beam launched through ground
// turbulence spreads, while a downlink beam arrives wide already.
double channel_attenuation(const LinkGeometry& geometry, double theta_atm, double a_air);

// Total loss as 10 log10 of the sum of the per-term power ratios
// 10^(A_i/10). Two 0 dB terms combine to 3.01 dB under this rule.
double combine_losses_power(const LossLedger& ledger);

// Plain dB sum, the conventional stacking for serial attenuators.
double combine_losses_serial(const LossLedger& ledger);

}  // namespace qfso::link
