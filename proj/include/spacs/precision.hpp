#pragma once

#include "spacs/postselect.hpp"

namespace spacs {

/// SNR of the postselected and conventional x-readouts, per unit sqrt(N).
/// eta = s_post/s_conv is N-free. When the conventional signal degenerates
/// (lambda = 0 makes |<x>_i - <x>_c| vanish identically) eta is undefined and
/// eta_defined is false rather than 0/0.
struct SnrBundle {
    double s_post = 0.0;
    double s_conv = 0.0;
    double eta = 0.0;
    bool eta_defined = false;
};

/// Fidelity |<Phi_i|Phi_f>|^2 between the initial and postselected meter
/// states, closed form. Throws PostselectionFailed when p_f < 1e-12.
double fidelity(const ExperimentConfig& cfg);

/// S_conv = |<x>_i - <x>_c| / sqrt(Var_i(x)),
/// S_post = sqrt(p_f) |<x>_f - <x>_c| / sqrt(Var_f(x)),
/// expectations taken over |Phi_i>, |Phi_c> (preselected-only evolution) and
/// |Phi_f> in the Fock oracle.
SnrBundle snr_ratio(const ExperimentConfig& cfg, int n_max);

}  // namespace spacs
