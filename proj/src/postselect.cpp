#include "spacs/postselect.hpp"

#include <cmath>

namespace spacs {

namespace {
constexpr double kOverlapTol = 1e-12;

bool finite(double x) { return std::isfinite(x); }
}  // namespace

Complex ExperimentConfig::alpha() const { return std::polar(alpha_mag, alpha_phase); }

void ExperimentConfig::validate() const {
    if (!(finite(alpha_mag) && finite(alpha_phase) && finite(lambda) && finite(theta_i) &&
          finite(phi_i) && finite(theta_f) && finite(phi_f)))
        throw std::invalid_argument("ExperimentConfig: non-finite field");
    if (alpha_mag < 0.0) throw std::invalid_argument("ExperimentConfig: alpha_mag < 0");
}

Complex QubitState::amp_g() const { return std::cos(theta / 2.0); }
Complex QubitState::amp_e() const { return std::polar(std::sin(theta / 2.0), phi); }

ABCConstants abc_constants(const ExperimentConfig& cfg) {
    const double ci = std::cos(cfg.theta_i), cf = std::cos(cfg.theta_f);
    const double si = std::sin(cfg.theta_i), sf = std::sin(cfg.theta_f);
    const double c2 = std::cos(cfg.theta_i / 2.0), s2 = std::sin(cfg.theta_i / 2.0);
    return ABCConstants{
        0.5 * (1.0 + ci * cf),
        0.5 * si * sf,
        0.5 * (ci + cf),
        c2 * c2 * c2 * c2 + s2 * s2 * s2 * s2,
        c2 * c2 * s2 * s2,
    };
}

WeakValue weak_value_sigma_z(const QubitState& psi_i, const QubitState& psi_f) {
    const Complex overlap =
        std::conj(psi_f.amp_g()) * psi_i.amp_g() + std::conj(psi_f.amp_e()) * psi_i.amp_e();
    if (std::abs(overlap) < kOverlapTol)
        throw OrthogonalPostselection("weak_value_sigma_z: <psi_f|psi_i> below 1e-12");
    const Complex num =
        -std::conj(psi_f.amp_g()) * psi_i.amp_g() + std::conj(psi_f.amp_e()) * psi_i.amp_e();
    return WeakValue{num / overlap};
}

QubitPair qubit_pair_for_weak_value(Complex w) {
    QubitPair out;
    out.psi_i = QubitState{M_PI / 2.0, 0.0};
    if (std::abs(1.0 - w) < 1e-14) {
        out.psi_f = QubitState{M_PI, 0.0};  // postselect |e>
        return out;
    }
    const Complex r = (1.0 + w) / (1.0 - w);
    out.psi_f = QubitState{2.0 * std::atan(std::abs(r)), -std::arg(r)};
    return out;
}

double postselection_probability(const ExperimentConfig& cfg) {
    cfg.validate();
    const ABCConstants k = abc_constants(cfg);
    const double a2 = cfg.alpha_mag * cfg.alpha_mag;
    const double g2 = 1.0 / (1.0 + a2);
    const double l = cfg.lambda, phi0 = cfg.phi0();
    const double env = std::exp(-2.0 * a2 * std::sin(l) * std::sin(l));
    const double drift = a2 * std::sin(2.0 * l);
    double p = k.A + g2 * k.B * env *
                         (std::cos(2.0 * l + phi0 + drift) + a2 * std::cos(4.0 * l + phi0 + drift));
    if (p < 0.0) p = 0.0;
    if (p > 1.0 + 1e-12) p = 1.0 + 1e-12;
    return p;
}

JointBranches evolve_joint(const ExperimentConfig& cfg, int n_max) {
    cfg.validate();
    return evolve_branches(cfg.alpha(), cfg.lambda, cfg.theta_i, cfg.phi_i, n_max);
}

FockVector final_meter_unnormalized(const ExperimentConfig& cfg, int n_max, double lambda_sign) {
    const JointBranches jb =
        evolve_branches(cfg.alpha(), lambda_sign * cfg.lambda, cfg.theta_i, cfg.phi_i, n_max);
    FockVector out(n_max);
    const Complex wg = std::cos(cfg.theta_f / 2.0);
    const Complex we = std::polar(std::sin(cfg.theta_f / 2.0), -cfg.phi_f);
    for (int n = 0; n <= n_max; ++n) out[n] = wg * jb.branch_g[n] + we * jb.branch_e[n];
    return out;
}

MeterState final_meter_state(const ExperimentConfig& cfg, int n_max) {
    FockVector v = final_meter_unnormalized(cfg, n_max);
    const double p_f = norm_squared(v);
    if (p_f < 1e-12) throw PostselectionFailed("final_meter_state: p_f < 1e-12");
    scale(v, 1.0 / std::sqrt(p_f));
    return MeterState{std::move(v), p_f};
}

MeterState no_postselection_state(const ExperimentConfig& cfg, int n_max) {
    const JointBranches jb = evolve_joint(cfg, n_max);
    FockVector v(n_max);
    const Complex wg = std::cos(cfg.theta_i / 2.0);
    const Complex we = std::polar(std::sin(cfg.theta_i / 2.0), -cfg.phi_i);
    for (int n = 0; n <= n_max; ++n) v[n] = wg * jb.branch_g[n] + we * jb.branch_e[n];

    const ABCConstants k = abc_constants(cfg);
    const double a2 = cfg.alpha_mag * cfg.alpha_mag;
    const double g2 = 1.0 / (1.0 + a2);
    const Complex rot = std::polar(1.0, 2.0 * cfg.lambda);
    const Complex h_cross = rot * (1.0 + a2 * rot) * std::exp(Complex(-a2, 0.0) + a2 * rot);
    const double h = k.D + 2.0 * k.E * g2 * h_cross.real();
    if (!(h > 0.0)) throw std::runtime_error("no_postselection_state: nonpositive weight");

    scale(v, 1.0 / std::sqrt(norm_squared(v)));
    return MeterState{std::move(v), h};
}

}  // namespace spacs
