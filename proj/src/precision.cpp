#include "spacs/precision.hpp"

#include <cmath>

namespace spacs {

double fidelity(const ExperimentConfig& cfg) {
    cfg.validate();
    const double p_f = postselection_probability(cfg);
    if (p_f < 1e-12) throw PostselectionFailed("fidelity: p_f < 1e-12");
    const double a = std::cos(cfg.theta_f / 2.0) * std::cos(cfg.theta_i / 2.0);
    const double b = std::sin(cfg.theta_f / 2.0) * std::sin(cfg.theta_i / 2.0);
    const double a2 = cfg.alpha_mag * cfg.alpha_mag;
    const double g4 = 1.0 / ((1.0 + a2) * (1.0 + a2));
    const Complex ep = std::polar(1.0, cfg.lambda);
    const Complex em = std::conj(ep);
    const Complex t1 =
        a * (1.0 + a2 * ep) * std::exp(Complex(-a2, cfg.lambda) + a2 * ep);
    const Complex t2 =
        b * (1.0 + a2 * em) * std::exp(Complex(-a2, -(cfg.phi0() + cfg.lambda)) + a2 * em);
    double f = g4 * std::norm(t1 + t2) / p_f;
    return f;
}

SnrBundle snr_ratio(const ExperimentConfig& cfg, int n_max) {
    cfg.validate();
    const FockVector initial = spacs_state(cfg.alpha(), n_max);
    const MeterState post = final_meter_state(cfg, n_max);
    const MeterState cond = no_postselection_state(cfg, n_max);

    const double xi = expect(initial, Observable::X);
    const double x2i = expect(initial, Observable::X2);
    const double xc = expect(cond.state, Observable::X);
    const double xf = expect(post.state, Observable::X);
    const double x2f = expect(post.state, Observable::X2);

    const double var_i = x2i - xi * xi;
    const double var_f = x2f - xf * xf;
    if (var_i <= 1e-15 || var_f <= 1e-15)
        throw DegenerateSignal("snr_ratio: degenerate quadrature variance");

    SnrBundle out;
    out.s_conv = std::abs(xi - xc) / std::sqrt(var_i);
    out.s_post = std::sqrt(post.weight) * std::abs(xf - xc) / std::sqrt(var_f);
    // the conventional signal vanishes identically at lambda = 0; typed
    // undefined rather than 0/0
    if (std::abs(xi - xc) >= 1e-15 && out.s_conv >= 1e-12) {
        out.eta = out.s_post / out.s_conv;
        out.eta_defined = true;
    }
    return out;
}

}  // namespace spacs
