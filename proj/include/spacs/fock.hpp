#pragma once

#include <complex>
#include <vector>

#include "spacs/errors.hpp"

namespace spacs {

using Complex = std::complex<double>;

/// State vector in the photon-number basis, truncated at index n_max.
/// amps[n] is the amplitude of |n>.
struct FockVector {
    std::vector<Complex> amps;

    FockVector() = default;
    explicit FockVector(int n_max) : amps(static_cast<std::size_t>(n_max) + 1) {}

    int n_max() const { return static_cast<int>(amps.size()) - 1; }
    Complex& operator[](int n) { return amps[static_cast<std::size_t>(n)]; }
    const Complex& operator[](int n) const { return amps[static_cast<std::size_t>(n)]; }
};

/// Sum of |c_n|^2.
double norm_squared(const FockVector& v);

/// Mass in the last five components; used to accept a truncation as converged.
double tail_mass(const FockVector& v);

/// Default truncation: 10-sigma Poisson tail above |alpha|^2 plus headroom
/// for the single added photon.
int default_n_max(double alpha_mag);

/// Coherent-state amplitudes c_n = e^{-|a|^2/2} a^n / sqrt(n!), evaluated in
/// log space so large |alpha| does not overflow n!.
/// Throws TruncationError when the tail mass at n_max exceeds 1e-10.
FockVector coherent_state(Complex alpha, int n_max);

/// (a^dag v)_n = sqrt(n) v_{n-1}; the result is not normalized.
/// Throws TruncationError if the top component of v carries mass above 1e-10.
FockVector apply_creation(const FockVector& v);

/// Single-photon-added coherent state (1+|a|^2)^{-1/2} a^dag |alpha>.
FockVector spacs_state(Complex alpha, int n_max);

/// <u|v>. Throws DimensionMismatch on unequal truncation.
Complex inner(const FockVector& u, const FockVector& v);

enum class Observable { N, N2, N3, X, X2 };

/// <v|O|v> for O in {n, n^2, n^3, x, x^2}, with x = (a + a^dag)/sqrt(2)
/// (local-oscillator phase fixed to zero). Asserts the imaginary residue of
/// the quadratic form is below 1e-12 and discards it.
double expect(const FockVector& v, Observable which);

void scale(FockVector& v, Complex factor);
FockVector add(const FockVector& u, const FockVector& v);
void normalize(FockVector& v);

/// Unnormalized meter branches of exp(i*lambda_signed*sigma_z*n) acting on
/// cos(ti/2)|g>|Phi_i> + e^{i phi_i} sin(ti/2)|e>|Phi_i> with the SPACS meter:
///   g-branch: cos(ti/2)            * gamma e^{-i l} a^dag |alpha e^{-i l}>
///   e-branch: e^{i phi_i} sin(ti/2) * gamma e^{+i l} a^dag |alpha e^{+i l}>
/// Built by applying the diagonal phase e^{-+ i l n} to the SPACS amplitudes.
struct JointBranches {
    FockVector branch_g;
    FockVector branch_e;
};
JointBranches evolve_branches(Complex alpha, double lambda_signed, double theta_i,
                              double phi_i, int n_max);

}  // namespace spacs
