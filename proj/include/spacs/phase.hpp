#pragma once

#include "spacs/postselect.hpp"

namespace spacs {

/// First-order meter state of the photon-statistics readout, kappa a^dag |beta>
/// with beta = alpha e^{-i lambda w} (dispersive-readout sign convention
/// U = e^{-i lambda sigma_z n}; the postselection sector uses the opposite
/// sign, so exact comparator states are built with lambda negated).
struct WeakMeterState {
    Complex beta;
    double kappa;
    Complex weak_value;
};

/// Phase distribution sampled on a uniform 2*pi window centered at `center`;
/// densities[k] at phis[k], spacing = 2*pi/size. mass_deficit records how much
/// probability an approximate form lost to renormalization (0 for exact).
struct PhaseGrid {
    std::vector<double> phis;
    std::vector<double> densities;
    double spacing = 0.0;
    double mass_deficit = 0.0;

    double mass() const;
    double mean() const;
    double second_moment() const;
};

/// Throws OrthogonalPostselection via the weak value; emits a warning on
/// stderr when lambda*|w| > 0.3 (outside the weak regime).
WeakMeterState weak_meter_state(const ExperimentConfig& cfg);

/// Shift of the mean photon number produced by the measurement.
/// closed_form: 2 l |a|^2 g^2 Im[w] (|a|^4+2|a|^2+2) / (2 l |a|^2 Im[w] + |a|^2 + 1).
/// numeric: <n> over kappa a^dag|beta> minus <n> over the initial SPACS, via
/// the Fock oracle. Both returned; their deviation is a reported quantity.
struct PhotonShift {
    double closed_form;
    double numeric;
};
PhotonShift photon_shift(const ExperimentConfig& cfg, int n_max);

/// P(phi) = |sum_n c_n e^{-i n phi}|^2 / (2 pi) on a uniform grid over
/// [center - pi, center + pi). grid_size >= 512 required.
PhaseGrid phase_distribution_exact(const FockVector& state, int grid_size, double center);

enum class MeterWhich { Initial, Final };

/// Gaussian-limit closed forms
///   P_i(phi) ~ g^2 sqrt(2/pi) |a|^3 [4(th-phi)^2+1] e^{-2|a|^2 (th-phi)^2}
///   P_w(phi) ~ same with |beta|, kappa and center th - l Re[w],
/// evaluated on the theta-centered window and renormalized; the lost mass is
/// recorded in mass_deficit. Warns when |a|^2 < 4.
PhaseGrid phase_distribution_approx(const ExperimentConfig& cfg, MeterWhich which,
                                    int grid_size = 4096);

/// Mean phase shift of the measurement.
/// first_order: -lambda Re[w]. numeric: difference of exact phase-distribution
/// means between the postselected meter state (dispersive sign convention) and
/// the initial SPACS, on the theta-centered window.
struct PhaseShift {
    double first_order;
    double numeric;
};
PhaseShift phase_shift(const ExperimentConfig& cfg, int grid_size = 4096);

/// Var(n), Var(phi) and their uncertainty product for the first-order meter
/// state, in closed form as functions of |beta|^2. Throws
/// DivergentPhaseVariance when |beta|^2 < 1e-9.
struct NumberPhaseVariances {
    double var_n;
    double var_phi;
    double product;
};
NumberPhaseVariances number_phase_variances(const ExperimentConfig& cfg);

/// Invert the measured shifts back to the weak value:
///   Re = -dphi / lambda,
///   Im = -dn / (2 l |a|^2 g^2 (1 - g^2 [|a|^4 + 2|a|^2 + 2])).
/// Throws DegenerateInversion when the Im denominator is below 1e-12.
Complex weak_value_readout(double delta_n, double delta_phi, double alpha_mag,
                           double lambda);

}  // namespace spacs
