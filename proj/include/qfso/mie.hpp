#pragma once

#include <complex>
#include <stdexcept>

namespace qfso::mie {

/// Complex refractive index m = n + i k of the particle material relative
/// to the surrounding medium. k >= 0 means an absorbing material.
struct RefractiveIndex {
  double real_part = 1.0;
  double imag_part = 0.0;

  std::complex<double> value() const { return {real_part, imag_part}; }
};

/// Extinction, scattering and absorption efficiencies of a single sphere.
/// q_ext == q_sca + q_abs by construction.
struct MieEfficiencies {
  double q_ext = 0.0;
  double q_sca = 0.0;
  double q_abs = 0.0;
};

/// Thrown when the Riccati-Bessel recurrences leave the range representable
/// in double precision, i.e. the requested size parameter cannot be resolved.
class SeriesOverflowError : public std::runtime_error {
 public:
  explicit SeriesOverflowError(double size_parameter);

  double size_parameter() const { return size_parameter_; }

 private:
  double size_parameter_;
};

/// Dimensionless size parameter x = pi * d / lambda for a sphere of
/// diameter d illuminated at wavelength lambda (both in meters).
double size_parameter(double diameter, double wavelength);

/// Efficiencies of a homogeneous sphere with relative refractive index m and
/// size parameter x. Series truncated at the Wiscombe order
/// n_max = ceil(x + 4 x^{1/3} + 2); the logarithmic derivative is obtained by
/// downward recurrence seeded at n_max + 15.
MieEfficiencies mie_efficiencies(const RefractiveIndex& m, double size_param);

}  // namespace qfso::mie
