#pragma once

#include <vector>

#include "spacs/postselect.hpp"

namespace spacs {

/// All Fisher-type figures of merit for one configuration, units 1/lambda^2.
struct FisherReport {
    double p_f = 0.0;
    double q_f = 0.0;            // QFI of the postselected meter state
    double f_tot = 0.0;          // p_f * q_f
    double eff_fi_photon = 0.0;  // p_f * F^(n)
    double eff_fi_quad = 0.0;    // p_f * F^(x)
    double q_cm = 0.0;           // conventional-measurement QFI, 4 Var(n)
};

struct DiscreteDistribution {
    std::vector<double> probs;  // index = photon number n
};

struct GridDistribution {
    std::vector<double> points;
    std::vector<double> densities;
    double spacing = 0.0;
};

/// QFI of the normalized postselected meter state by central differences in
/// lambda: 4(<dPhi|dPhi> - |<Phi|dPhi>|^2). The three states are phase-aligned
/// on the largest-magnitude amplitude of the center state before differencing
/// (the combination is gauge invariant; alignment keeps the finite difference
/// well conditioned). A dlambda vs dlambda/2 check must agree to 1e-4
/// relative, else StepTooLarge. Throws PostselectionFailed when p_f < 1e-9 at
/// any evaluation point.
double qfi_numeric(const ExperimentConfig& cfg, int n_max, double dlambda = 1e-5);

/// Closed-form WVA-QFI series:
///   4 [ g^2 A (1 + 3<n> + 3<n^2> + <n^3>) - g^4 C^2 (1 + 2<n> + <n^2>)^2 / p_f
///       - g^2 B S_cos - g^4 B^2 S_sin^2 / p_f ]
/// with Poisson-weighted series S_cos = e^{-|a|^2} sum (|a|^2)^n/n!
/// (1+3n+3n^2+n^3) cos(2l+2nl+phi0) and S_sin likewise with (1+2n+n^2) sin.
/// Terms are summed until the next one falls below tol*(1+|partial|) past the
/// Poisson mean.
double wva_qfi_series(const ExperimentConfig& cfg, double tol = 1e-14);

/// P_f(n) = (g^2/p_f) n |a|^{2n-2} e^{-|a|^2} / (n-1)! * [A + B cos(2nl+phi0)],
/// P_f(0) = 0. Throws PostselectionFailed when p_f < 1e-9.
DiscreteDistribution photon_distribution(const ExperimentConfig& cfg, int n_max);

/// Analytic d/dlambda of P_f(n) (the derivative acts on the cosine and on p_f).
std::vector<double> photon_distribution_dlambda(const ExperimentConfig& cfg, int n_max);

/// F^(n) = sum_n (dP_f(n)/dl)^2 / P_f(n), skipping P_f(n) < 1e-15. Uses the
/// analytic derivative; a central-difference check at step dlambda must agree
/// to 1e-4 relative, else StepTooLarge.
double fisher_photon(const ExperimentConfig& cfg, int n_max, double dlambda = 1e-5);

/// x-quadrature density of the postselected meter state, closed form
/// (requires real alpha: throws UnsupportedPhase when alpha_phase != 0).
double quadrature_density(const ExperimentConfig& cfg, double x);

/// |<x|state>|^2 by summing Fock amplitudes against harmonic-oscillator
/// eigenfunctions; the oracle path for quadrature_density.
double quadrature_density_fock(const FockVector& state, double x);

/// psi_n(x) for n = 0..n_max by the stable upward recurrence.
std::vector<double> hermite_functions(double x, int n_max);

/// Density sampled on a uniform grid (closed-form path).
GridDistribution quadrature_distribution(const ExperimentConfig& cfg, double lo,
                                         double hi, int points);

/// F^(x) as the fixed Riemann sum over x = -3.00, -2.99, ..., 7.00:
/// sum (dP/dl)^2 / (100 P), with d/dl by central differences (step 1e-5).
double fisher_quadrature_grid(const ExperimentConfig& cfg);

/// QFI of the conventional arm (no postselection, basis-state preselection).
/// numeric = 4 Var(n) over the SPACS meter (phase encoding on a fixed pure
/// state, lambda independent); closed_form retains the uncorrected closed
/// expression (|xi| = |alpha|) so the cross-check can report its deviation.
struct ConventionalQfi {
    double numeric;
    double closed_form;
};
ConventionalQfi conventional_qfi(double alpha_mag, int n_max);

/// Full bundle for one configuration (real alpha).
FisherReport fisher_report(const ExperimentConfig& cfg, int n_max);

}  // namespace spacs
