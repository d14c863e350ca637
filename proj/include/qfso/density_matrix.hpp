// Two-qubit density matrices built from a 15-angle Cholesky parameterization:
// rho = L L^dagger with L lower triangular, so unit trace, Hermiticity and
// positive semidefiniteness hold by construction for any in-range parameters.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qfso::quantum {

template <typename Scalar>
using DensityMatrix = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

inline constexpr int kParamCount = 15;

// Angles u_k set the row magnitudes of L, theta/phi polar-decompose each row.
// theta and phi are stored in the row-major order (21, 31, 32, 41, 42, 43).
template <typename Scalar>
struct StateParams {
  std::array<Scalar, 3> u{};
  std::array<Scalar, 6> theta{};
  std::array<Scalar, 6> phi{};
};

// Flat layout: u1,u2,u3, theta21,theta31,theta32,theta41,theta42,theta43,
// phi21,phi31,phi32,phi41,phi42,phi43.
template <typename Scalar>
Scalar param_lower_bound(int) {
  return Scalar(0);
}

template <typename Scalar>
Scalar param_upper_bound(int index) {
  return index < 9 ? Scalar(std::numbers::pi / 2) : Scalar(2 * std::numbers::pi);
}

template <typename Scalar>
Eigen::Vector<Scalar, kParamCount> to_vector(const StateParams<Scalar>& params) {
  Eigen::Vector<Scalar, kParamCount> v;
  for (int i = 0; i < 3; ++i) v[i] = params.u[static_cast<std::size_t>(i)];
  for (int i = 0; i < 6; ++i) v[3 + i] = params.theta[static_cast<std::size_t>(i)];
  for (int i = 0; i < 6; ++i) v[9 + i] = params.phi[static_cast<std::size_t>(i)];
  return v;
}

template <typename Scalar>
StateParams<Scalar> from_vector(const Eigen::Vector<Scalar, kParamCount>& v) {
  StateParams<Scalar> params;
  for (int i = 0; i < 3; ++i) params.u[static_cast<std::size_t>(i)] = v[i];
  for (int i = 0; i < 6; ++i) params.theta[static_cast<std::size_t>(i)] = v[3 + i];
  for (int i = 0; i < 6; ++i) params.phi[static_cast<std::size_t>(i)] = v[9 + i];
  return params;
}

template <typename Scalar>
bool in_range(const StateParams<Scalar>& params) {
  const auto v = to_vector(params);
  for (int i = 0; i < kParamCount; ++i) {
    if (!(v[i] >= param_lower_bound<Scalar>(i)) || !(v[i] <= param_upper_bound<Scalar>(i))) {
      return false;
    }
  }
  return true;
}

// Lower-triangular factor L with positive real diagonal; each row i carries a
// shared magnitude U_i (from the u angles) split across columns by the theta
// angles, with phases phi on the off-diagonal entries.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 4, 4> cholesky_factor(const StateParams<Scalar>& params) {
  if (!in_range(params)) {
    throw std::invalid_argument("cholesky_factor: parameters outside their ranges");
  }
  using C = std::complex<Scalar>;
  const Scalar cu1 = std::cos(params.u[0]), su1 = std::sin(params.u[0]);
  const Scalar cu2 = std::cos(params.u[1]), su2 = std::sin(params.u[1]);
  const Scalar cu3 = std::cos(params.u[2]), su3 = std::sin(params.u[2]);
  const Scalar ct21 = std::cos(params.theta[0]), st21 = std::sin(params.theta[0]);
  const Scalar ct31 = std::cos(params.theta[1]), st31 = std::sin(params.theta[1]);
  const Scalar ct32 = std::cos(params.theta[2]), st32 = std::sin(params.theta[2]);
  const Scalar ct41 = std::cos(params.theta[3]), st41 = std::sin(params.theta[3]);
  const Scalar ct42 = std::cos(params.theta[4]), st42 = std::sin(params.theta[4]);
  const Scalar ct43 = std::cos(params.theta[5]), st43 = std::sin(params.theta[5]);
  auto phase = [](Scalar phi) { return C(std::cos(phi), std::sin(phi)); };

  const Scalar u2row = su1 * cu2;
  const Scalar u3row = su1 * su2 * cu3;
  const Scalar u4row = su1 * su2 * su3;

  Eigen::Matrix<C, 4, 4> l = Eigen::Matrix<C, 4, 4>::Zero();
  l(0, 0) = C(cu1, 0);
  l(1, 0) = u2row * ct21 * phase(params.phi[0]);
  l(1, 1) = C(u2row * st21, 0);
  l(2, 0) = u3row * ct31 * phase(params.phi[1]);
  l(2, 1) = u3row * st31 * ct32 * phase(params.phi[2]);
  l(2, 2) = C(u3row * st31 * st32, 0);
  l(3, 0) = u4row * ct41 * phase(params.phi[3]);
  l(3, 1) = u4row * st41 * ct42 * phase(params.phi[4]);
  l(3, 2) = u4row * st41 * st42 * ct43 * phase(params.phi[5]);
  l(3, 3) = C(u4row * st41 * st42 * st43, 0);
  return l;
}

template <typename Scalar>
DensityMatrix<Scalar> density_matrix(const StateParams<Scalar>& params) {
  const auto l = cholesky_factor(params);
  return l * l.adjoint();
}

// Parameters reproducing the polarization singlet (|01> - |10>)/sqrt(2).
template <typename Scalar>
StateParams<Scalar> singlet_params() {
  StateParams<Scalar> params;
  params.u = {Scalar(std::numbers::pi / 2), Scalar(std::numbers::pi / 4), Scalar(0)};
  params.phi[1] = Scalar(std::numbers::pi);  // sign of the |10> amplitude
  return params;
}

template <typename Scalar>
Eigen::Vector<std::complex<Scalar>, 4> singlet_vector() {
  Eigen::Vector<std::complex<Scalar>, 4> psi;
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  psi << std::complex<Scalar>(0), std::complex<Scalar>(inv_sqrt2),
      std::complex<Scalar>(-inv_sqrt2), std::complex<Scalar>(0);
  return psi;
}

template <typename Scalar>
DensityMatrix<Scalar> singlet_state() {
  const auto psi = singlet_vector<Scalar>();
  return psi * psi.adjoint();
}

// p * singlet + (1 - p) * I/4.
template <typename Scalar>
DensityMatrix<Scalar> werner_state(Scalar p) {
  if (p < Scalar(0) || p > Scalar(1)) {
    throw std::invalid_argument("werner_state: mixing weight must lie in [0, 1]");
  }
  return p * singlet_state<Scalar>() +
         (Scalar(1) - p) * Scalar(0.25) * DensityMatrix<Scalar>::Identity();
}

}  // namespace qfso::quantum
