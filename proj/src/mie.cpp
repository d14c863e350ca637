#include "qfso/mie.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <string>
#include <vector>

namespace qfso::mie {

namespace {

int wiscombe_order(double x) {
  return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
}

}  // namespace

SeriesOverflowError::SeriesOverflowError(double size_parameter)
    : std::runtime_error("Mie series not resolvable in double precision at x = " +
                         std::to_string(size_parameter)),
      size_parameter_(size_parameter) {}

double size_parameter(double diameter, double wavelength) {
  if (!(diameter > 0.0) || !(wavelength > 0.0)) {
    throw std::invalid_argument("size_parameter: diameter and wavelength must be positive");
  }
  return std::numbers::pi * diameter / wavelength;
}

MieEfficiencies mie_efficiencies(const RefractiveIndex& m, double size_param) {
  if (!(m.real_part > 0.0) || m.imag_part < 0.0) {
    throw std::invalid_argument("mie_efficiencies: refractive index needs Re > 0 and Im >= 0");
  }
  if (!(size_param > 0.0) || !std::isfinite(size_param)) {
    throw std::invalid_argument("mie_efficiencies: size parameter must be positive and finite");
  }

  const double x = size_param;
  const std::complex<double> mc = m.value();
  const std::complex<double> mx = mc * x;
  const int n_max = wiscombe_order(x);
  // The downward recurrence must begin above both the truncation order and
  // |m|x, or D_n has not converged by the time the sum needs it.
  const int n_start = std::max(n_max, static_cast<int>(std::ceil(std::abs(mx)))) + 15;

  // Logarithmic derivative D_n(mx) = psi_n'(mx)/psi_n(mx) by downward
  // recurrence, seeded with D = 0 at n_start.
  std::vector<std::complex<double>> log_deriv(static_cast<std::size_t>(n_max) + 1);
  std::complex<double> d{0.0, 0.0};
  for (int n = n_start; n >= 1; --n) {
    if (n <= n_max) log_deriv[static_cast<std::size_t>(n)] = d;
    const std::complex<double> rn = static_cast<double>(n) / mx;
    d = rn - 1.0 / (d + rn);
  }

  // Riccati-Bessel psi_n(x), chi_n(x) by upward recurrence.
  double psi_prev = std::cos(x);   // psi_{-1}
  double psi = std::sin(x);        // psi_0
  double chi_prev = -std::sin(x);  // chi_{-1}
  double chi = std::cos(x);        // chi_0

  double sum_ext = 0.0;
  double sum_sca = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double psi_n = (2.0 * n - 1.0) / x * psi - psi_prev;
    const double chi_n = (2.0 * n - 1.0) / x * chi - chi_prev;
    if (!std::isfinite(psi_n) || !std::isfinite(chi_n)) {
      throw SeriesOverflowError(x);
    }
    const std::complex<double> xi_n{psi_n, -chi_n};
    const std::complex<double> xi_prev{psi, -chi};

    const std::complex<double> dn = log_deriv[static_cast<std::size_t>(n)];
    const double n_over_x = static_cast<double>(n) / x;
    const std::complex<double> fa = dn / mc + n_over_x;
    const std::complex<double> fb = dn * mc + n_over_x;
    const std::complex<double> a_n = (fa * psi_n - psi) / (fa * xi_n - xi_prev);
    const std::complex<double> b_n = (fb * psi_n - psi) / (fb * xi_n - xi_prev);

    const double weight = 2.0 * n + 1.0;
    sum_ext += weight * (a_n.real() + b_n.real());
    sum_sca += weight * (std::norm(a_n) + std::norm(b_n));

    psi_prev = psi;
    psi = psi_n;
    chi_prev = chi;
    chi = chi_n;
  }

  MieEfficiencies q;
  q.q_ext = 2.0 / (x * x) * sum_ext;
  q.q_sca = 2.0 / (x * x) * sum_sca;
  q.q_abs = q.q_ext - q.q_sca;
  if (!std::isfinite(q.q_ext) || !std::isfinite(q.q_sca)) {
    throw SeriesOverflowError(x);
  }
  return q;
}

}  // namespace qfso::mie
