#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "spacs/estimation.hpp"

using namespace spacs;

namespace {

McRunConfig fig1c_mc(std::uint64_t seed, int n_trials = 20000, int n_runs = 50) {
    McRunConfig mc;
    mc.base = ExperimentConfig{2.0, 0.0, 0.1, M_PI / 2.0, M_PI, 3.0 * M_PI / 2.0, 0.0};
    mc.n_trials = n_trials;
    mc.n_runs = n_runs;
    mc.seed = seed;
    mc.lambda_search = LambdaSearch{0.05, 0.15, 501};
    return mc;
}

}  // namespace

TEST_SUITE_BEGIN("estimation");

TEST_CASE("xoshiro stream is deterministic and uniform-ish") {
    Xoshiro256 a(123), b(123), c(124);
    double mean = 0.0;
    bool same = true, differs = false;
    for (int i = 0; i < 10000; ++i) {
        const double ua = a.uniform01();
        same = same && ua == b.uniform01();
        differs = differs || ua != c.uniform01();
        mean += ua;
        CHECK(ua >= 0.0);
        CHECK(ua < 1.0);
    }
    CHECK(same);
    CHECK(differs);
    CHECK(mean / 10000.0 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("sampled outcomes follow the photon distribution") {
    // degenerate lambda=0 config with p_f = 1: bare spacs statistics
    McRunConfig mc = fig1c_mc(987);
    mc.base = ExperimentConfig{2.0, 0.0, 0.0, 1.1, 0.4, 1.1, 0.4};
    mc.n_trials = 100000;
    Xoshiro256 rng(mc.seed);
    const std::vector<int> samples = sample_outcomes(mc, rng);
    CHECK(samples.size() == 100000);  // p_f = 1 accepts every trial

    const int n_max = default_n_max(2.0);
    const DiscreteDistribution d = photon_distribution(mc.base, n_max);
    std::vector<double> counts(d.probs.size(), 0.0);
    for (int n : samples) counts[static_cast<std::size_t>(n)] += 1.0;

    // chi-square GOF over bins with expected count >= 5
    double chi2 = 0.0;
    int dof = -1;
    double slack_expected = 0.0, slack_observed = 0.0;
    for (std::size_t n = 0; n < d.probs.size(); ++n) {
        const double expected = d.probs[n] * samples.size();
        if (expected >= 5.0) {
            chi2 += (counts[n] - expected) * (counts[n] - expected) / expected;
            ++dof;
        } else {
            slack_expected += expected;
            slack_observed += counts[n];
        }
    }
    if (slack_expected >= 5.0) {
        chi2 += (slack_observed - slack_expected) * (slack_observed - slack_expected) /
                slack_expected;
        ++dof;
    }
    const double pvalue = oracle::gamma_q(dof / 2.0, chi2 / 2.0);
    CHECK(pvalue > 0.001);
}

TEST_CASE("accepted fraction sits in the binomial band") {
    McRunConfig mc = fig1c_mc(1001);
    mc.n_trials = 1000000;
    Xoshiro256 rng(mc.seed);
    const std::vector<int> samples = sample_outcomes(mc, rng);
    const double p = postselection_probability(mc.base);
    const double sigma = std::sqrt(p * (1.0 - p) / mc.n_trials);
    CHECK(std::abs(static_cast<double>(samples.size()) / mc.n_trials - p) <= 5.0 * sigma);
}

TEST_CASE("sampling is byte-identical for a fixed seed") {
    const McRunConfig mc = fig1c_mc(777);
    Xoshiro256 r1(mc.seed), r2(mc.seed);
    CHECK(sample_outcomes(mc, r1) == sample_outcomes(mc, r2));
}

TEST_CASE("mle behavior") {
    const McRunConfig mc = fig1c_mc(555);
    SUBCASE("consistent near the truth") {
        Xoshiro256 rng(mc.seed);
        const std::vector<int> samples = sample_outcomes(mc, rng);  // ~13700 accepted
        const double lhat = mle_lambda(samples, mc);
        const int n_max = default_n_max(2.0);
        const double crb =
            1.0 / (samples.size() * fisher_photon(mc.base, n_max));
        CHECK(std::abs(lhat - 0.1) <= 3.0 * std::sqrt(crb));
    }
    SUBCASE("single sample returns a grid point without crashing") {
        const double lhat = mle_lambda({7}, mc);
        CHECK(lhat >= mc.lambda_search.lo);
        CHECK(lhat <= mc.lambda_search.hi);
    }
    SUBCASE("flat likelihood when B = 0") {
        McRunConfig flat = mc;
        flat.base = ExperimentConfig{2.0, 0.0, 0.1, 0.0, 0.0, 1.3, 0.0};
        CHECK_THROWS_AS((void)mle_lambda({3, 4, 5}, flat), FlatLikelihood);
    }
    SUBCASE("empty sample list is rejected") {
        CHECK_THROWS_AS((void)mle_lambda({}, mc), std::invalid_argument);
    }
}

TEST_CASE("crb experiment") {
    const McRunConfig mc = fig1c_mc(2024, 20000, 60);
    const McReport r = crb_experiment(mc);
    SUBCASE("estimator variance respects the bound") {
        CHECK(r.lambda_hat_var >= r.crb * (1.0 - 3.0 * std::sqrt(2.0 / mc.n_runs)));
        CHECK(r.efficiency > 0.6);
        CHECK(r.efficiency < 1.2);
        CHECK(r.lambda_hat_mean == doctest::Approx(0.1).epsilon(0.01));
        const double p = postselection_probability(mc.base);
        CHECK(std::abs(r.accepted_fraction - p) <=
              5.0 * std::sqrt(p * (1.0 - p) / (static_cast<double>(mc.n_trials) * mc.n_runs)));
    }
    SUBCASE("identical report for an identical config") {
        const McReport r2 = crb_experiment(mc);
        CHECK(r.lambda_hat_mean == r2.lambda_hat_mean);
        CHECK(r.lambda_hat_var == r2.lambda_hat_var);
        CHECK(r.accepted_fraction == r2.accepted_fraction);
    }
    SUBCASE("doubling the trials halves the variance") {
        const McReport r2 = crb_experiment(fig1c_mc(2024, 40000, 60));
        CHECK(r2.lambda_hat_var == doctest::Approx(r.lambda_hat_var / 2.0).epsilon(0.5));
    }
    SUBCASE("off-optimum angle: larger variance, bound still respected") {
        McRunConfig off = fig1c_mc(2024, 20000, 40);
        off.base.theta_f = 2.2;
        const McReport ro = crb_experiment(off);
        CHECK(ro.lambda_hat_var > r.lambda_hat_var);
        CHECK(ro.lambda_hat_var >= ro.crb * (1.0 - 3.0 * std::sqrt(2.0 / off.n_runs)));
    }
}

TEST_CASE("config validation") {
    McRunConfig mc = fig1c_mc(1);
    mc.lambda_search.grid_points = 100;
    CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
    mc = fig1c_mc(1);
    mc.base.lambda = 0.3;  // outside the search window
    CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
    mc = fig1c_mc(1);
    mc.base.theta_i = 0.0;  // B=0: postselection fine, likelihood flat -> handled in mle
    CHECK_NOTHROW(mc.validate());
}

TEST_SUITE_END();
