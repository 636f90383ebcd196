#include "spacs/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace spacs {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix64(seed);
    // avoid the all-zero state
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Xoshiro256::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

void McRunConfig::validate() const {
    base.validate();
    if (n_trials < 1 || n_runs < 1) throw std::invalid_argument("McRunConfig: n_trials/n_runs < 1");
    if (lambda_search.grid_points < 200)
        throw std::invalid_argument("McRunConfig: lambda grid must have >= 200 points");
    if (!(lambda_search.lo < base.lambda && base.lambda < lambda_search.hi))
        throw std::invalid_argument("McRunConfig: true lambda outside the search window");
}

std::vector<int> sample_outcomes(const McRunConfig& cfg, Xoshiro256& rng) {
    const int n_max = cfg.n_max > 0 ? cfg.n_max : default_n_max(cfg.base.alpha_mag);
    const double p_f = postselection_probability(cfg.base);
    if (p_f < 1e-6) throw PostselectionFailed("sample_outcomes: p_f < 1e-6");
    const DiscreteDistribution dist = photon_distribution(cfg.base, n_max);

    // CDF with the support cut at cumulative mass 1 - 1e-12
    std::vector<double> cdf;
    cdf.reserve(dist.probs.size());
    double acc = 0.0;
    for (double p : dist.probs) {
        acc += p;
        cdf.push_back(acc);
        if (acc >= 1.0 - 1e-12) break;
    }
    cdf.back() = std::max(cdf.back(), 1.0);

    std::vector<int> out;
    for (int t = 0; t < cfg.n_trials; ++t) {
        if (rng.uniform01() >= p_f) continue;
        const double u = rng.uniform01();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        out.push_back(static_cast<int>(it - cdf.begin()));
    }
    return out;
}

namespace {

double log_likelihood(const std::vector<int>& hist, int hist_max, const McRunConfig& cfg,
                      double lambda, int n_max) {
    ExperimentConfig c = cfg.base;
    c.lambda = lambda;
    if (postselection_probability(c) < 1e-12) return -1e300;
    const DiscreteDistribution d = photon_distribution(c, n_max);
    double ll = 0.0;
    for (int n = 0; n <= hist_max; ++n) {
        if (hist[n] == 0) continue;
        const double p = d.probs[n];
        ll += p > 0.0 ? hist[n] * std::log(p) : -1e300;
    }
    return ll;
}

}  // namespace

double mle_lambda(const std::vector<int>& samples, const McRunConfig& cfg) {
    if (samples.empty()) throw std::invalid_argument("mle_lambda: empty sample list");
    const int n_max = cfg.n_max > 0 ? cfg.n_max : default_n_max(cfg.base.alpha_mag);
    std::vector<int> hist(static_cast<std::size_t>(n_max) + 1, 0);
    int hist_max = 0;
    for (int n : samples) {
        hist[static_cast<std::size_t>(std::min(n, n_max))]++;
        hist_max = std::max(hist_max, std::min(n, n_max));
    }
    const auto ll = [&](double l) { return log_likelihood(hist, hist_max, cfg, l, n_max); };

    const int G = cfg.lambda_search.grid_points;
    const double lo = cfg.lambda_search.lo, hi = cfg.lambda_search.hi;
    const double step = (hi - lo) / (G - 1);
    int best = 0;
    double best_ll = -1e301, min_ll = 1e301, max_ll = -1e301;
    for (int i = 0; i < G; ++i) {
        const double v = ll(lo + i * step);
        if (v > best_ll) {  // strict: ties keep the smaller lambda
            best_ll = v;
            best = i;
        }
        min_ll = std::min(min_ll, v);
        max_ll = std::max(max_ll, v);
    }
    if (max_ll - min_ll < 1e-9)
        throw FlatLikelihood("mle_lambda: log-likelihood range below 1e-9 over the grid");

    // three golden-section iterations inside the bracketing grid cells
    double a = lo + std::max(best - 1, 0) * step;
    double b = lo + std::min(best + 1, G - 1) * step;
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = ll(x1), f2 = ll(x2);
    for (int it = 0; it < 3; ++it) {
        if (f1 >= f2) {  // maximum in [a, x2]; ties move left
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = ll(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = ll(x2);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

McReport crb_experiment(const McRunConfig& cfg) {
    cfg.validate();
    const int n_max = cfg.n_max > 0 ? cfg.n_max : default_n_max(cfg.base.alpha_mag);
    const double p_f = postselection_probability(cfg.base);
    const double f_eff = p_f * fisher_photon(cfg.base, n_max);

    std::vector<double> estimates;
    estimates.reserve(cfg.n_runs);
    long long accepted = 0;
    for (int run = 0; run < cfg.n_runs; ++run) {
        Xoshiro256 rng(cfg.seed + static_cast<std::uint64_t>(run));
        const std::vector<int> samples = sample_outcomes(cfg, rng);
        accepted += static_cast<long long>(samples.size());
        estimates.push_back(mle_lambda(samples, cfg));
    }

    McReport r;
    for (double e : estimates) r.lambda_hat_mean += e;
    r.lambda_hat_mean /= cfg.n_runs;
    double ss = 0.0;
    for (double e : estimates) ss += (e - r.lambda_hat_mean) * (e - r.lambda_hat_mean);
    r.lambda_hat_var = cfg.n_runs > 1 ? ss / (cfg.n_runs - 1) : 0.0;
    r.crb = 1.0 / (static_cast<double>(cfg.n_trials) * f_eff);
    r.efficiency = r.lambda_hat_var > 0.0 ? r.crb / r.lambda_hat_var : 0.0;
    r.accepted_fraction =
        static_cast<double>(accepted) / (static_cast<double>(cfg.n_trials) * cfg.n_runs);
    return r;
}

}  // namespace spacs
