#pragma once

#include "spacs/fock.hpp"

namespace spacs {

/// All free parameters of the scheme. alpha = alpha_mag * e^{i alpha_phase},
/// lambda is the dimensionless coupling, the four angles parametrize the
/// pre/postselection qubit states. Only phi_i - phi_f enters any result.
struct ExperimentConfig {
    double alpha_mag = 0.0;
    double alpha_phase = 0.0;
    double lambda = 0.0;
    double theta_i = 0.0;
    double phi_i = 0.0;
    double theta_f = 0.0;
    double phi_f = 0.0;

    Complex alpha() const;
    double phi0() const { return phi_i - phi_f; }
    /// Throws std::invalid_argument on non-finite fields or alpha_mag < 0.
    void validate() const;
};

/// cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>.
struct QubitState {
    double theta = 0.0;
    double phi = 0.0;

    Complex amp_g() const;
    Complex amp_e() const;
};

struct WeakValue {
    Complex value;
};

/// A = (1 + cos ti cos tf)/2, B = sin ti sin tf / 2, C = (cos ti + cos tf)/2,
/// D = cos^4(ti/2) + sin^4(ti/2), E = cos^2(ti/2) sin^2(ti/2).
struct ABCConstants {
    double A, B, C, D, E;
};
ABCConstants abc_constants(const ExperimentConfig& cfg);

/// <psi_f|sigma_z|psi_i> / <psi_f|psi_i> with sigma_z|e> = +|e>, sigma_z|g> = -|g>.
/// Throws OrthogonalPostselection when |<psi_f|psi_i>| < 1e-12.
WeakValue weak_value_sigma_z(const QubitState& psi_i, const QubitState& psi_f);

/// Pre/postselection pair (theta_i = pi/2, phi_i = 0 convention) whose
/// sigma_z weak value equals w. Solves tan(tf/2) e^{-i phi_f} = (1+w)/(1-w).
struct QubitPair {
    QubitState psi_i;
    QubitState psi_f;
};
QubitPair qubit_pair_for_weak_value(Complex w);

/// Success probability of postselection, closed form:
///   A + gamma^2 B e^{-2|a|^2 sin^2 l} [cos(2l + phi0 + |a|^2 sin 2l)
///                                      + |a|^2 cos(4l + phi0 + |a|^2 sin 2l)].
/// Clamped into [0, 1 + 1e-12].
double postselection_probability(const ExperimentConfig& cfg);

struct MeterState {
    FockVector state;  // normalized
    double weight;     // squared norm of the unnormalized superposition
};

/// Normalized postselected meter state and p_f. Throws PostselectionFailed
/// when p_f < 1e-12.
MeterState final_meter_state(const ExperimentConfig& cfg, int n_max);

/// Meter state conditioned on the preselected system only (no postselection),
/// normalized, together with its weight h:
///   h = D + 2 E gamma^2 Re[e^{2il}(1 + |a|^2 e^{2il}) e^{-|a|^2 + |a|^2 e^{2il}}].
MeterState no_postselection_state(const ExperimentConfig& cfg, int n_max);

/// Joint evolution under U = e^{+i lambda sigma_z n} for this config.
JointBranches evolve_joint(const ExperimentConfig& cfg, int n_max);

/// Unnormalized postselected meter vector; exposed for oracle-style checks.
FockVector final_meter_unnormalized(const ExperimentConfig& cfg, int n_max,
                                    double lambda_sign = +1.0);

}  // namespace spacs
