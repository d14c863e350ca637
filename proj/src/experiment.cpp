#include "qfso/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qfso::experiment {

namespace {

using quantum::Basis;
using quantum::BasisCounts;
using quantum::kBases;

void check_config(const ExperimentConfig& config) {
  if (config.pairs_per_basis < 1) {
    throw std::invalid_argument("experiment: need at least one pair per basis");
  }
  if (config.attenuation_db < 0.0 || config.attenuation_db > 50.0) {
    throw std::invalid_argument("experiment: attenuation must lie in [0, 50] dB");
  }
  const auto& rho = config.true_state;
  if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(rho.trace().imag()) > 1e-8 ||
      (rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("experiment: true state is not a density matrix");
  }
}

// Multinomial over category probabilities via sequential conditional
// binomials; the final category absorbs the remainder exactly.
std::array<std::uint64_t, 6> draw_multinomial(std::mt19937_64& rng, std::uint64_t trials,
                                              const std::array<double, 6>& prob) {
  std::array<std::uint64_t, 6> counts{};
  std::uint64_t remaining = trials;
  double remaining_prob = 1.0;
  for (std::size_t cat = 0; cat + 1 < prob.size(); ++cat) {
    if (remaining == 0) break;
    const double conditional =
        remaining_prob > 0.0 ? std::clamp(prob[cat] / remaining_prob, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> binomial(remaining, conditional);
    counts[cat] = binomial(rng);
    remaining -= counts[cat];
    remaining_prob -= prob[cat];
  }
  counts.back() += remaining;
  return counts;
}

}  // namespace

quantum::MeasurementDataset simulate_dataset(const ExperimentConfig& config) {
  check_config(config);
  const double alpha = std::pow(10.0, -config.attenuation_db / 10.0);

  quantum::MeasurementDataset data;
  for (Basis k : kBases) {
    for (Basis l : kBases) {
      const int pair_index = quantum::basis_pair_index(k, l);
      const auto p = quantum::born_probabilities(config.true_state, k, l);
      const std::array<double, 6> category_prob = {
          alpha * p[0],
          alpha * p[1],
          alpha * p[2],
          alpha * p[3],
          (1.0 - alpha) * (p[0] + p[1]),
          (1.0 - alpha) * (p[2] + p[3])};

      std::seed_seq sequence{config.seed, static_cast<std::uint64_t>(pair_index)};
      std::mt19937_64 rng(sequence);
      const auto counts = draw_multinomial(rng, config.pairs_per_basis, category_prob);

      BasisCounts& basis = data.bases[static_cast<std::size_t>(pair_index)];
      basis.c00 = counts[0];
      basis.c01 = counts[1];
      basis.c10 = counts[2];
      basis.c11 = counts[3];
      basis.herald0 = counts[0] + counts[1] + counts[4];
      basis.herald1 = counts[2] + counts[3] + counts[5];
    }
  }
  quantum::validate(data);
  return data;
}

EstimateBundle estimate_attenuation(const ExperimentConfig& config,
                                    const quantum::SamplerConfig& sampler) {
  const quantum::MeasurementDataset data = simulate_dataset(config);
  quantum::SamplerConfig row_sampler = sampler;
  row_sampler.seed = config.seed;

  EstimateBundle bundle;
  bundle.posterior = quantum::slice_sample_posterior(data, row_sampler);
  const auto samples = bundle.posterior.pooled();

  bundle.row.attenuation_db = config.attenuation_db;
  bundle.row.converged = bundle.posterior.converged;
  const auto alpha = quantum::bme_estimate(samples, [](const auto& s) { return s.alpha; });
  const auto eof = quantum::bme_estimate(samples, [](const auto& s) { return s.eof; });
  bundle.row.alpha_mean = alpha.first;
  bundle.row.alpha_std = alpha.second;
  bundle.row.eof_mean = eof.first;
  bundle.row.eof_std = eof.second;
  return bundle;
}

std::vector<SweepRow> sweep_attenuation(const std::vector<ExperimentConfig>& configs,
                                        const quantum::SamplerConfig& sampler) {
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const ExperimentConfig& config : configs) {
    rows.push_back(estimate_attenuation(config, sampler).row);
  }
  return rows;
}

}  // namespace qfso::experiment
