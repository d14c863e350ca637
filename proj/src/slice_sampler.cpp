#include "qfso/slice_sampler.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "qfso/entanglement.hpp"

namespace qfso::quantum {

namespace {

constexpr int kCoordCount = kParamCount + 1;  // tau plus alpha
constexpr int kAlphaIndex = kParamCount;

double coord_lower(int i) { return i == kAlphaIndex ? 0.0 : param_lower_bound<double>(i); }
double coord_upper(int i) { return i == kAlphaIndex ? 1.0 : param_upper_bound<double>(i); }

// Transposed joint projectors, laid out so Tr(rho P) becomes a coefficient-
// wise product. Built once; read-only afterwards, so safe to share across
// chain threads.
using Joint = Eigen::Matrix<std::complex<double>, 4, 4>;

const std::array<Joint, 36>& transposed_projectors() {
  static const std::array<Joint, 36> cache = [] {
    std::array<Joint, 36> arr;
    for (Basis k : kBases) {
      for (Basis l : kBases) {
        for (int i = 0; i < 2; ++i) {
          const auto pi = pauli_projector<double>(k, i);
          for (int j = 0; j < 2; ++j) {
            const auto pj = pauli_projector<double>(l, j);
            Joint joint;
            for (int a = 0; a < 2; ++a) {
              for (int b = 0; b < 2; ++b) {
                joint.block<2, 2>(2 * a, 2 * b) = pi(a, b) * pj;
              }
            }
            arr[static_cast<std::size_t>(4 * basis_pair_index(k, l) + 2 * i + j)] =
                joint.transpose();
          }
        }
      }
    }
    return arr;
  }();
  return cache;
}

BasisProbabilities<double> probabilities_for(const DensityMatrix<double>& rho) {
  const auto& projectors = transposed_projectors();
  BasisProbabilities<double> probs;
  for (std::size_t pair = 0; pair < 9; ++pair) {
    for (std::size_t cell = 0; cell < 4; ++cell) {
      const double p =
          rho.cwiseProduct(projectors[4 * pair + cell]).sum().real();
      probs[pair][cell] = std::max(0.0, p);
    }
  }
  return probs;
}

struct Chain {
  Eigen::Vector<double, kCoordCount> coords;
  BasisProbabilities<double> probs;
  double log_density = 0.0;
  std::mt19937_64 rng;
  std::vector<PosteriorSample> samples;
};

class Posterior {
 public:
  explicit Posterior(const MeasurementDataset& data) : data_(data) {}

  double evaluate(const Eigen::Vector<double, kCoordCount>& coords,
                  BasisProbabilities<double>& probs_out, bool tau_changed,
                  const BasisProbabilities<double>& cached_probs) const {
    for (int i = 0; i < kCoordCount; ++i) {
      if (coords[i] < coord_lower(i) || coords[i] > coord_upper(i)) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    if (tau_changed) {
      const StateParams<double> params = from_vector<double>(coords.head<kParamCount>());
      probs_out = probabilities_for(density_matrix(params));
    } else {
      probs_out = cached_probs;
    }
    return full_log_likelihood(data_, probs_out, coords[kAlphaIndex]);
  }

 private:
  const MeasurementDataset& data_;
};

// One slice update of coordinate i: draw the level, step the bracket out to
// the slice boundary (the prior box bounds it), then shrink until a point on
// the slice is hit.
void slice_move(Chain& chain, const Posterior& posterior, int i) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = coord_lower(i);
  const double hi = coord_upper(i);
  const double width = (hi - lo) / 10.0;
  const double x0 = chain.coords[i];
  const double level = chain.log_density + std::log(unit(chain.rng));

  double left = x0 - width * unit(chain.rng);
  double right = left + width;
  BasisProbabilities<double> scratch;
  auto density_at = [&](double x) {
    Eigen::Vector<double, kCoordCount> trial = chain.coords;
    trial[i] = x;
    return posterior.evaluate(trial, scratch, i != kAlphaIndex, chain.probs);
  };

  while (left > lo && density_at(left) > level) left -= width;
  left = std::max(left, lo);
  while (right < hi && density_at(right) > level) right += width;
  right = std::min(right, hi);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x1 = left + (right - left) * unit(chain.rng);
    BasisProbabilities<double> probs;
    Eigen::Vector<double, kCoordCount> trial = chain.coords;
    trial[i] = x1;
    const double density = posterior.evaluate(trial, probs, i != kAlphaIndex, chain.probs);
    if (density >= level) {
      chain.coords = trial;
      chain.probs = probs;
      chain.log_density = density;
      return;
    }
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  throw std::runtime_error("slice_move: shrinkage failed to find a point on the slice");
}

void scan(Chain& chain, const Posterior& posterior) {
  for (int i = 0; i < kCoordCount; ++i) slice_move(chain, posterior, i);
}

PosteriorSample record_sample(const Chain& chain) {
  PosteriorSample sample;
  sample.tau = from_vector<double>(chain.coords.head<kParamCount>());
  sample.alpha = chain.coords[kAlphaIndex];
  const DensityMatrix<double> rho = density_matrix(sample.tau);
  sample.eof = entanglement_of_formation(rho);
  sample.fidelity = pure_state_fidelity(rho, singlet_vector<double>());
  return sample;
}

// Standard error of the chain mean by batch means, which stays honest under
// the autocorrelation a coordinate-wise sampler produces. Batches grow with
// the chain (never more than ~20 of them) so that they eventually dwarf the
// mixing time; square-root-sized batches underestimate the error here.
double batch_means_std_error(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 4) return std::numeric_limits<double>::infinity();
  const std::size_t batch = std::max({std::size_t{2},
                                      static_cast<std::size_t>(std::sqrt(n)),
                                      n / 20});
  const std::size_t n_batches = n / batch;
  std::vector<double> batch_mean(n_batches, 0.0);
  for (std::size_t b = 0; b < n_batches; ++b) {
    for (std::size_t j = 0; j < batch; ++j) batch_mean[b] += values[b * batch + j];
    batch_mean[b] /= static_cast<double>(batch);
  }
  double grand = 0.0;
  for (double m : batch_mean) grand += m;
  grand /= static_cast<double>(n_batches);
  double var = 0.0;
  for (double m : batch_mean) var += (m - grand) * (m - grand);
  var /= static_cast<double>(n_batches > 1 ? n_batches - 1 : 1);
  return std::sqrt(var / static_cast<double>(n_batches));
}

ChainDiagnostics diagnose(int index, const std::vector<PosteriorSample>& samples) {
  ChainDiagnostics d;
  d.chain = index;
  d.n_samples = static_cast<int>(samples.size());
  if (samples.empty()) return d;
  std::vector<double> eof(samples.size());
  std::vector<double> alpha(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    eof[i] = samples[i].eof;
    alpha[i] = samples[i].alpha;
  }
  for (double v : eof) d.eof_mean += v;
  d.eof_mean /= static_cast<double>(eof.size());
  for (double v : alpha) d.alpha_mean += v;
  d.alpha_mean /= static_cast<double>(alpha.size());
  d.eof_std_error = batch_means_std_error(eof);
  d.alpha_std_error = batch_means_std_error(alpha);
  return d;
}

bool chains_agree(const std::vector<ChainDiagnostics>& diagnostics, double tolerance) {
  for (std::size_t a = 0; a < diagnostics.size(); ++a) {
    for (std::size_t b = a + 1; b < diagnostics.size(); ++b) {
      const ChainDiagnostics& i = diagnostics[a];
      const ChainDiagnostics& j = diagnostics[b];
      const double eof_se = std::hypot(i.eof_std_error, j.eof_std_error);
      const double alpha_se = std::hypot(i.alpha_std_error, j.alpha_std_error);
      if (std::abs(i.eof_mean - j.eof_mean) >= tolerance * eof_se) return false;
      if (std::abs(i.alpha_mean - j.alpha_mean) >= tolerance * alpha_se) return false;
    }
  }
  return true;
}

void initialize_chain(Chain& chain, const Posterior& posterior, std::uint64_t seed, int index) {
  std::seed_seq sequence{static_cast<std::uint64_t>(0x9e3779b97f4a7c15ull), seed,
                         static_cast<std::uint64_t>(index)};
  chain.rng.seed(sequence);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < kCoordCount; ++i) {
      chain.coords[i] = coord_lower(i) + unit(chain.rng) * (coord_upper(i) - coord_lower(i));
    }
    BasisProbabilities<double> probs;
    const double density = posterior.evaluate(chain.coords, probs, true, probs);
    if (std::isfinite(density)) {
      chain.probs = probs;
      chain.log_density = density;
      return;
    }
  }
  throw std::runtime_error("slice_sample_posterior: could not find a finite starting point");
}

void run_block(Chain& chain, const Posterior& posterior, int scans, int thin, bool keep) {
  for (int s = 0; s < scans; ++s) {
    scan(chain, posterior);
    if (keep && (s + 1) % thin == 0) {
      chain.samples.push_back(record_sample(chain));
    }
  }
}

void parallel_over_chains(std::vector<Chain>& chains, const std::function<void(Chain&)>& work) {
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(chains.size());
  workers.reserve(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    workers.emplace_back([&, c] {
      try {
        work(chains[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (std::thread& w : workers) w.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<PosteriorSample> PosteriorResult::pooled() const {
  std::vector<PosteriorSample> all;
  for (const auto& chain : chains) {
    all.insert(all.end(), chain.begin(), chain.end());
  }
  return all;
}

PosteriorResult slice_sample_posterior(const MeasurementDataset& data,
                                       const SamplerConfig& config) {
  if (config.chains < 1) throw std::invalid_argument("sampler: need at least one chain");
  if (config.samples_per_chain < 1) throw std::invalid_argument("sampler: need samples");
  if (config.thin < 1) throw std::invalid_argument("sampler: thin must be at least 1");
  if (config.burn_in < 0) throw std::invalid_argument("sampler: negative burn-in");
  validate(data);
  transposed_projectors();  // build the shared cache before threads start

  const Posterior posterior(data);
  std::vector<Chain> chains(static_cast<std::size_t>(config.chains));
  for (std::size_t c = 0; c < chains.size(); ++c) {
    initialize_chain(chains[c], posterior, config.seed, static_cast<int>(c));
  }

  parallel_over_chains(chains, [&](Chain& chain) {
    run_block(chain, posterior, config.burn_in, config.thin, false);
  });

  const int target_scans = config.samples_per_chain * config.thin;
  const int scan_cap = config.max_scans_per_chain > 0
                           ? config.max_scans_per_chain
                           : config.burn_in + std::max(10 * target_scans, 4000);
  int scans_done = config.burn_in;
  bool converged = false;
  std::vector<ChainDiagnostics> diagnostics;
  while (true) {
    const int kept = chains.empty() ? 0 : static_cast<int>(chains.front().samples.size());
    const int remaining_to_target = target_scans - kept * config.thin;
    const int block = remaining_to_target > 0
                          ? remaining_to_target
                          : std::max(1, config.samples_per_chain / 4) * config.thin;
    parallel_over_chains(chains, [&](Chain& chain) {
      run_block(chain, posterior, block, config.thin, true);
    });
    scans_done += block;

    diagnostics.clear();
    for (std::size_t c = 0; c < chains.size(); ++c) {
      diagnostics.push_back(diagnose(static_cast<int>(c), chains[c].samples));
    }
    converged = chains.size() < 2 || chains_agree(diagnostics, config.convergence_tolerance);
    if (converged && static_cast<int>(chains.front().samples.size()) >= config.samples_per_chain) {
      break;
    }
    if (scans_done >= scan_cap) break;
  }

  PosteriorResult result;
  result.converged = converged;
  result.diagnostics = std::move(diagnostics);
  result.chains.reserve(chains.size());
  for (Chain& chain : chains) {
    result.chains.push_back(std::move(chain.samples));
  }
  return result;
}

DensityMatrix<double> bme_mean_state(const std::vector<PosteriorSample>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("bme_mean_state: no samples");
  }
  DensityMatrix<double> mean = DensityMatrix<double>::Zero();
  for (const PosteriorSample& s : samples) {
    mean += density_matrix(s.tau);
  }
  return mean / static_cast<double>(samples.size());
}

}  // namespace qfso::quantum
