#include "spacs/phase.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace spacs {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double PhaseGrid::mass() const {
    double s = 0.0;
    for (double d : densities) s += d;
    return s * spacing;
}

double PhaseGrid::mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < phis.size(); ++k) s += phis[k] * densities[k];
    return s * spacing;
}

double PhaseGrid::second_moment() const {
    double s = 0.0;
    for (std::size_t k = 0; k < phis.size(); ++k) s += phis[k] * phis[k] * densities[k];
    return s * spacing;
}

namespace {
// stderr warnings capped so sweeps do not flood the log
void warn_capped(const char* fmt, double v) {
    static std::atomic<int> count{0};
    const int k = count.fetch_add(1);
    if (k < 3) std::fprintf(stderr, fmt, v);
    if (k == 3) std::fprintf(stderr, "warning: further weak-regime warnings suppressed\n");
}
}  // namespace

WeakMeterState weak_meter_state(const ExperimentConfig& cfg) {
    cfg.validate();
    const WeakValue w = weak_value_sigma_z(QubitState{cfg.theta_i, cfg.phi_i},
                                           QubitState{cfg.theta_f, cfg.phi_f});
    if (cfg.lambda * std::abs(w.value) > 0.3)
        warn_capped("warning: lambda*|weak value| = %.3g exceeds 0.3; outside the weak regime\n",
                    cfg.lambda * std::abs(w.value));
    const Complex beta = cfg.alpha() * std::exp(Complex(0.0, -cfg.lambda) * w.value);
    return WeakMeterState{beta, 1.0 / std::sqrt(1.0 + std::norm(beta)), w.value};
}

PhotonShift photon_shift(const ExperimentConfig& cfg, int n_max) {
    const WeakMeterState wm = weak_meter_state(cfg);
    const double a2 = cfg.alpha_mag * cfg.alpha_mag;
    const double g2 = 1.0 / (1.0 + a2);
    const double im = wm.weak_value.imag();
    const double l = cfg.lambda;
    const double closed = 2.0 * l * a2 * g2 * im * (a2 * a2 + 2.0 * a2 + 2.0) /
                          (2.0 * l * a2 * im + a2 + 1.0);

    const FockVector before = spacs_state(cfg.alpha(), n_max);
    // |beta| can exceed |alpha|; give the shifted state its own truncation
    const int n_max_beta = std::max(n_max, default_n_max(std::abs(wm.beta)));
    const FockVector after = spacs_state(wm.beta, n_max_beta);
    const double numeric = expect(after, Observable::N) - expect(before, Observable::N);
    return PhotonShift{closed, numeric};
}

PhaseGrid phase_distribution_exact(const FockVector& state, int grid_size, double center) {
    if (grid_size < 512)
        throw std::invalid_argument("phase_distribution_exact: grid_size must be >= 512");
    PhaseGrid g;
    g.spacing = kTwoPi / grid_size;
    g.phis.resize(grid_size);
    g.densities.resize(grid_size);
    const int N = state.n_max();
    for (int k = 0; k < grid_size; ++k) {
        const double phi = center - M_PI + k * g.spacing;
        g.phis[k] = phi;
        // sum_n c_n e^{-i n phi} via one phase rotation per step
        const Complex step = std::polar(1.0, -phi);
        Complex rot = 1.0, amp = 0.0;
        for (int n = 0; n <= N; ++n) {
            amp += state[n] * rot;
            rot *= step;
        }
        g.densities[k] = std::norm(amp) / kTwoPi;
    }
    return g;
}

PhaseGrid phase_distribution_approx(const ExperimentConfig& cfg, MeterWhich which,
                                    int grid_size) {
    cfg.validate();
    if (cfg.alpha_mag * cfg.alpha_mag < 4.0)
        std::fprintf(stderr,
                     "warning: Gaussian phase approximation used at |alpha|^2 = %.3g < 4\n",
                     cfg.alpha_mag * cfg.alpha_mag);
    double mag, width_mag, peak;
    if (which == MeterWhich::Initial) {
        mag = cfg.alpha_mag;
        width_mag = mag;
        peak = cfg.alpha_phase;
    } else {
        const WeakMeterState wm = weak_meter_state(cfg);
        mag = std::abs(wm.beta);
        width_mag = mag;
        peak = cfg.alpha_phase - cfg.lambda * wm.weak_value.real();
    }
    const double g2 = 1.0 / (1.0 + mag * mag);
    const double pref = g2 * std::sqrt(2.0 / M_PI) * mag * mag * mag;

    PhaseGrid g;
    g.spacing = kTwoPi / grid_size;
    g.phis.resize(grid_size);
    g.densities.resize(grid_size);
    for (int k = 0; k < grid_size; ++k) {
        const double phi = cfg.alpha_phase - M_PI + k * g.spacing;
        const double u = peak - phi;
        g.phis[k] = phi;
        g.densities[k] =
            pref * (4.0 * u * u + 1.0) * std::exp(-2.0 * width_mag * width_mag * u * u);
    }
    const double raw_mass = g.mass();
    g.mass_deficit = 1.0 - raw_mass;
    if (raw_mass > 0.0)
        for (double& d : g.densities) d /= raw_mass;
    return g;
}

PhaseShift phase_shift(const ExperimentConfig& cfg, int grid_size) {
    const WeakMeterState wm = weak_meter_state(cfg);
    const int n_max = default_n_max(cfg.alpha_mag);
    const FockVector before = spacs_state(cfg.alpha(), n_max);

    // exact postselected meter state under the dispersive sign convention
    FockVector after = final_meter_unnormalized(cfg, n_max, -1.0);
    const double p = norm_squared(after);
    if (p < 1e-12) throw PostselectionFailed("phase_shift: p_f < 1e-12");
    scale(after, 1.0 / std::sqrt(p));

    const double center = cfg.alpha_phase;
    const double mean_before = phase_distribution_exact(before, grid_size, center).mean();
    const double mean_after = phase_distribution_exact(after, grid_size, center).mean();
    return PhaseShift{-cfg.lambda * wm.weak_value.real(), mean_after - mean_before};
}

NumberPhaseVariances number_phase_variances(const ExperimentConfig& cfg) {
    const WeakMeterState wm = weak_meter_state(cfg);
    const double y = std::norm(wm.beta);
    if (y < 1e-9)
        throw DivergentPhaseVariance("number_phase_variances: |beta|^2 < 1e-9");
    const double k2 = wm.kappa * wm.kappa;
    const double m1 = k2 * (y * y + 3.0 * y + 1.0);
    const double var_n = k2 * (y * y * y + 6.0 * y * y + 7.0 * y + 1.0) - m1 * m1;
    const double var_phi = 0.25 * k2 * (1.0 + 3.0 / y);
    return NumberPhaseVariances{var_n, var_phi, std::sqrt(var_n * var_phi)};
}

Complex weak_value_readout(double delta_n, double delta_phi, double alpha_mag, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("weak_value_readout: lambda must be > 0");
    const double a2 = alpha_mag * alpha_mag;
    const double g2 = 1.0 / (1.0 + a2);
    const double denom = 2.0 * lambda * a2 * g2 * (1.0 - g2 * (a2 * a2 + 2.0 * a2 + 2.0));
    if (std::abs(denom) < 1e-12)
        throw DegenerateInversion("weak_value_readout: Im denominator below 1e-12");
    return Complex(-delta_phi / lambda, -delta_n / denom);
}

}  // namespace spacs
