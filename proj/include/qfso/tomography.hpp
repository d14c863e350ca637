// Heralded two-qubit tomography: Born probabilities in the nine two-basis
// combinations and the per-basis likelihood of coincidence/loss count data.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "qfso/density_matrix.hpp"

namespace qfso::quantum {

// Rectilinear, diagonal, circular measurement bases. Datasets label the
// rectilinear basis "I"; it is a Pauli Z measurement.
enum class Basis { z = 0, x = 1, y = 2 };

inline constexpr std::array<Basis, 3> kBases{Basis::z, Basis::x, Basis::y};

inline int basis_pair_index(Basis sender, Basis receiver) {
  return 3 * static_cast<int>(sender) + static_cast<int>(receiver);
}

// Counts for one (sender, receiver) basis pair: heralds A_i split by sender
// outcome, and coincidences c_ij by (sender, receiver) outcome.
struct BasisCounts {
  std::uint64_t herald0 = 0;
  std::uint64_t herald1 = 0;
  std::uint64_t c00 = 0;
  std::uint64_t c01 = 0;
  std::uint64_t c10 = 0;
  std::uint64_t c11 = 0;

  std::uint64_t coincidences() const { return c00 + c01 + c10 + c11; }
  std::uint64_t heralds() const { return herald0 + herald1; }
};

struct MeasurementDataset {
  std::array<BasisCounts, 9> bases{};  // indexed by basis_pair_index
};

inline void validate(const MeasurementDataset& data) {
  for (const BasisCounts& b : data.bases) {
    if (b.c00 + b.c01 > b.herald0 || b.c10 + b.c11 > b.herald1) {
      throw std::invalid_argument("dataset: coincidences exceed their heralds");
    }
  }
}

// Projector onto the outcome-o eigenstate of the given Pauli basis.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> pauli_projector(Basis basis, int outcome) {
  using C = std::complex<Scalar>;
  const Scalar half = Scalar(0.5);
  const Scalar sign = outcome == 0 ? Scalar(1) : Scalar(-1);
  Eigen::Matrix<C, 2, 2> p;
  switch (basis) {
    case Basis::z:
      p << C(half + sign * half), C(0), C(0), C(half - sign * half);
      break;
    case Basis::x:
      p << C(half), C(sign * half), C(sign * half), C(half);
      break;
    case Basis::y:
      p << C(half), C(0, -sign * half), C(0, sign * half), C(half);
      break;
  }
  return p;
}

// Joint outcome probabilities p_ij = Tr(rho (P_i x P_j)), clamped against
// roundoff just below zero.
template <typename Scalar>
std::array<Scalar, 4> born_probabilities(const DensityMatrix<Scalar>& rho, Basis sender,
                                         Basis receiver) {
  std::array<Scalar, 4> p{};
  for (int i = 0; i < 2; ++i) {
    const auto pi = pauli_projector<Scalar>(sender, i);
    for (int j = 0; j < 2; ++j) {
      const auto pj = pauli_projector<Scalar>(receiver, j);
      Eigen::Matrix<std::complex<Scalar>, 4, 4> joint;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          joint.template block<2, 2>(2 * a, 2 * b) = pi(a, b) * pj;
        }
      }
      p[static_cast<std::size_t>(2 * i + j)] =
          std::max(Scalar(0), (rho * joint).trace().real());
    }
  }
  return p;
}

namespace detail {

// count * log(p) with 0 log 0 = 0; a zero-probability outcome that was
// nevertheless counted sends the log-likelihood to -infinity.
template <typename Scalar>
Scalar count_log(std::uint64_t count, Scalar p) {
  if (count == 0) return Scalar(0);
  if (p <= Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
  return Scalar(count) * std::log(p);
}

}  // namespace detail

// Log-likelihood of one basis pair's counts: coincidences pick up a factor
// alpha p_ij, lost photons a factor (1 - alpha) times the sender marginal.
template <typename Scalar>
Scalar single_basis_log_likelihood(const BasisCounts& counts, const std::array<Scalar, 4>& p,
                                   Scalar alpha) {
  if (alpha < Scalar(0) || alpha > Scalar(1)) {
    throw std::invalid_argument("single_basis_log_likelihood: alpha must lie in [0, 1]");
  }
  if (counts.c00 + counts.c01 > counts.herald0 || counts.c10 + counts.c11 > counts.herald1) {
    throw std::invalid_argument("single_basis_log_likelihood: coincidences exceed heralds");
  }
  const std::uint64_t coincidences = counts.coincidences();
  const std::uint64_t lost = counts.heralds() - coincidences;
  Scalar log_l = detail::count_log(coincidences, alpha) +
                 detail::count_log(lost, Scalar(1) - alpha);
  log_l += detail::count_log(counts.c00, p[0]);
  log_l += detail::count_log(counts.c01, p[1]);
  log_l += detail::count_log(counts.c10, p[2]);
  log_l += detail::count_log(counts.c11, p[3]);
  log_l += detail::count_log(counts.herald0 - counts.c00 - counts.c01, p[0] + p[1]);
  log_l += detail::count_log(counts.herald1 - counts.c10 - counts.c11, p[2] + p[3]);
  return log_l;
}

template <typename Scalar>
using BasisProbabilities = std::array<std::array<Scalar, 4>, 9>;

template <typename Scalar>
BasisProbabilities<Scalar> all_basis_probabilities(const DensityMatrix<Scalar>& rho) {
  BasisProbabilities<Scalar> all{};
  for (Basis k : kBases) {
    for (Basis l : kBases) {
      all[static_cast<std::size_t>(basis_pair_index(k, l))] = born_probabilities(rho, k, l);
    }
  }
  return all;
}

template <typename Scalar>
Scalar full_log_likelihood(const MeasurementDataset& data,
                           const BasisProbabilities<Scalar>& probabilities, Scalar alpha) {
  Scalar total(0);
  for (std::size_t i = 0; i < data.bases.size(); ++i) {
    total += single_basis_log_likelihood(data.bases[i], probabilities[i], alpha);
  }
  return total;
}

template <typename Scalar>
Scalar full_log_likelihood(const MeasurementDataset& data, const StateParams<Scalar>& params,
                           Scalar alpha) {
  return full_log_likelihood(data, all_basis_probabilities(density_matrix(params)), alpha);
}

}  // namespace qfso::quantum
