#pragma once

#include <cstdint>
#include <vector>

#include "spacs/fisher.hpp"

namespace spacs {

/// xoshiro256** with splitmix64 seeding; platform-independent streams.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed);
    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01();

  private:
    std::uint64_t s_[4];
};

struct LambdaSearch {
    double lo = 0.0;
    double hi = 0.0;
    int grid_points = 0;
};

struct McRunConfig {
    ExperimentConfig base;  // base.lambda is the true coupling being estimated
    int n_trials = 0;       // attempted measurements per run
    int n_runs = 0;
    std::uint64_t seed = 0;
    LambdaSearch lambda_search;
    int n_max = 0;  // 0 -> default truncation

    void validate() const;
};

struct McReport {
    double lambda_hat_mean = 0.0;
    double lambda_hat_var = 0.0;
    double crb = 0.0;  // 1 / (n_trials * p_f * F^(n)) at the true lambda
    double efficiency = 0.0;
    double accepted_fraction = 0.0;
};

/// One run of n_trials attempted measurements: each trial postselects with
/// probability p_f; accepted trials draw a photon count from P_f(n) by
/// inverse CDF (support cut at cumulative mass 1 - 1e-12). Deterministic for
/// a given rng state. Throws PostselectionFailed when p_f < 1e-6.
std::vector<int> sample_outcomes(const McRunConfig& cfg, Xoshiro256& rng);

/// Maximum-likelihood estimate of lambda from accepted photon counts:
/// grid argmax of sum log P_f(n; lambda) refined by three golden-section
/// iterations; ties break toward smaller lambda. Throws FlatLikelihood when
/// the log-likelihood range over the grid is below 1e-9.
double mle_lambda(const std::vector<int>& samples, const McRunConfig& cfg);

/// n_runs independent estimates (run k seeded with seed + k); reports the
/// estimator variance against the CRB with F_eff = p_f * F^(n) and N counted
/// as attempted trials.
McReport crb_experiment(const McRunConfig& cfg);

}  // namespace spacs
