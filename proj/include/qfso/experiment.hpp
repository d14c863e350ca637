// Simulated heralded entanglement distribution: photon-pair count data for a
// true state sent through a lossy channel, plus the attenuation sweep that
// chains simulation, posterior sampling and estimation.
#pragma once

#include <cstdint>
#include <vector>

#include "qfso/density_matrix.hpp"
#include "qfso/slice_sampler.hpp"
#include "qfso/tomography.hpp"

namespace qfso::experiment {

struct ExperimentConfig {
  quantum::DensityMatrix<double> true_state = quantum::singlet_state<double>();
  std::uint64_t pairs_per_basis = 1000000;
  double attenuation_db = 0.0;  // channel loss, valid range [0, 50]
  std::uint64_t seed = 0;
};

// One multinomial draw per basis pair over the six outcome categories
// (four coincidence cells, two sender-tagged losses), realized as sequential
// binomials. Streams are seeded per (seed, basis pair).
quantum::MeasurementDataset simulate_dataset(const ExperimentConfig& config);

struct SweepRow {
  double attenuation_db = 0.0;
  double alpha_mean = 0.0;
  double alpha_std = 0.0;
  double eof_mean = 0.0;
  double eof_std = 0.0;
  bool converged = false;
};

// One sweep point: simulate, sample the posterior, summarize. The sampler
// seed is taken from the experiment config so a row is a pure function of it.
struct EstimateBundle {
  SweepRow row;
  quantum::PosteriorResult posterior;
};

EstimateBundle estimate_attenuation(const ExperimentConfig& config,
                                    const quantum::SamplerConfig& sampler);

std::vector<SweepRow> sweep_attenuation(const std::vector<ExperimentConfig>& configs,
                                        const quantum::SamplerConfig& sampler);

}  // namespace qfso::experiment
