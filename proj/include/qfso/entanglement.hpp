// Two-qubit entanglement monotones: Wootters concurrence and the
// entanglement of formation derived from it.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfso/density_matrix.hpp"

namespace qfso::quantum {

// Spin-flipped state (sigma_y x sigma_y) rho^* (sigma_y x sigma_y).
template <typename Scalar>
DensityMatrix<Scalar> spin_flip(const DensityMatrix<Scalar>& rho) {
  DensityMatrix<Scalar> yy = DensityMatrix<Scalar>::Zero();
  yy(0, 3) = std::complex<Scalar>(-1);
  yy(1, 2) = std::complex<Scalar>(1);
  yy(2, 1) = std::complex<Scalar>(1);
  yy(3, 0) = std::complex<Scalar>(-1);
  return yy * rho.conjugate() * yy;
}

// C = max(0, l1 - l2 - l3 - l4) where l_i are the square roots of the
// eigenvalues of rho * spin_flip(rho) in decreasing order. Taking square
// roots is what makes C(singlet) = 1; the product's eigenvalues themselves
// would give 1/4 there.
template <typename Scalar>
Scalar concurrence(const DensityMatrix<Scalar>& rho) {
  const DensityMatrix<Scalar> product = rho * spin_flip(rho);
  Eigen::ComplexEigenSolver<DensityMatrix<Scalar>> solver(product, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("concurrence: eigensolver failed");
  }
  Eigen::Vector<Scalar, 4> roots;
  for (int i = 0; i < 4; ++i) {
    roots[i] = std::sqrt(std::max(Scalar(0), solver.eigenvalues()[i].real()));
  }
  std::sort(roots.begin(), roots.end(), std::greater<Scalar>());
  const Scalar c = roots[0] - roots[1] - roots[2] - roots[3];
  return std::clamp(c, Scalar(0), Scalar(1));
}

// -x log2 x - (1-x) log2(1-x) with the 0 log 0 = 0 convention.
template <typename Scalar>
Scalar binary_entropy(Scalar x) {
  if (x < Scalar(0) || x > Scalar(1)) {
    throw std::invalid_argument("binary_entropy: argument must lie in [0, 1]");
  }
  auto xlog2x = [](Scalar v) { return v == Scalar(0) ? Scalar(0) : v * std::log2(v); };
  return -xlog2x(x) - xlog2x(Scalar(1) - x);
}

template <typename Scalar>
Scalar eof_from_concurrence(Scalar c) {
  if (c < Scalar(0) || c > Scalar(1)) {
    throw std::invalid_argument("eof_from_concurrence: concurrence must lie in [0, 1]");
  }
  const Scalar arg = (Scalar(1) + std::sqrt(Scalar(1) - c * c)) / Scalar(2);
  return binary_entropy(arg);
}

template <typename Scalar>
Scalar entanglement_of_formation(const DensityMatrix<Scalar>& rho) {
  return eof_from_concurrence(concurrence(rho));
}

// <psi| rho |psi> for a pure reference state.
template <typename Scalar>
Scalar pure_state_fidelity(const DensityMatrix<Scalar>& rho,
                           const Eigen::Vector<std::complex<Scalar>, 4>& psi) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

}  // namespace qfso::quantum
