// Posterior sampling for (tau, alpha) given coincidence data: univariate
// slice moves cycled over the 16 coordinates, run as parallel independent
// chains whose agreement on EOF and alpha decides convergence.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qfso/density_matrix.hpp"
#include "qfso/tomography.hpp"

namespace qfso::quantum {

struct SamplerConfig {
  int chains = 4;
  int burn_in = 500;             // discarded scans per chain
  int samples_per_chain = 1500;  // kept samples per chain before stopping
  int thin = 1;                  // scans per kept sample
  std::uint64_t seed = 0;
  double convergence_tolerance = 1.0;  // pooled-standard-error multiples
  // Total scans per chain (burn-in included) before giving up on agreement;
  // 0 picks a cap proportional to the requested sample count.
  int max_scans_per_chain = 0;
};

struct PosteriorSample {
  StateParams<double> tau;
  double alpha = 0.0;
  double eof = 0.0;       // entanglement of formation of rho(tau)
  double fidelity = 0.0;  // overlap of rho(tau) with the singlet
};

struct ChainDiagnostics {
  int chain = 0;
  int n_samples = 0;
  double eof_mean = 0.0;
  double eof_std_error = 0.0;  // batch-means standard error
  double alpha_mean = 0.0;
  double alpha_std_error = 0.0;
};

struct PosteriorResult {
  bool converged = false;
  std::vector<std::vector<PosteriorSample>> chains;
  std::vector<ChainDiagnostics> diagnostics;

  std::vector<PosteriorSample> pooled() const;
};

PosteriorResult slice_sample_posterior(const MeasurementDataset& data,
                                       const SamplerConfig& config);

// Mean and population standard deviation of a scalar functional over samples.
template <typename F>
std::pair<double, double> bme_estimate(const std::vector<PosteriorSample>& samples, F&& f) {
  if (samples.empty()) {
    throw std::invalid_argument("bme_estimate: no samples");
  }
  double mean = 0.0;
  for (const PosteriorSample& s : samples) mean += f(s);
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (const PosteriorSample& s : samples) {
    const double d = f(s) - mean;
    var += d * d;
  }
  var /= static_cast<double>(samples.size());
  return {mean, std::sqrt(var)};
}

// Element-wise posterior mean density matrix.
DensityMatrix<double> bme_mean_state(const std::vector<PosteriorSample>& samples);

}  // namespace qfso::quantum
