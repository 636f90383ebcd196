#include "spacs/fock.hpp"

#include <cmath>
#include <cstdio>

namespace spacs {

namespace {
constexpr double kTailTol = 1e-10;
}

double norm_squared(const FockVector& v) {
    double s = 0.0;
    for (const auto& c : v.amps) s += std::norm(c);
    return s;
}

double tail_mass(const FockVector& v) {
    double s = 0.0;
    const int n = v.n_max();
    for (int k = std::max(0, n - 4); k <= n; ++k) s += std::norm(v[k]);
    return s;
}

int default_n_max(double alpha_mag) {
    const double a2 = alpha_mag * alpha_mag;
    return static_cast<int>(std::ceil(a2 + 10.0 * std::sqrt(a2 + 1.0) + 20.0));
}

FockVector coherent_state(Complex alpha, int n_max) {
    if (n_max < 1) throw TruncationError("coherent_state: n_max must be >= 1");
    FockVector v(n_max);
    const double amag = std::abs(alpha);
    if (amag == 0.0) {
        v[0] = 1.0;
        return v;
    }
    const double la = std::log(amag);
    const double ph = std::arg(alpha);
    for (int n = 0; n <= n_max; ++n) {
        const double logmag = -0.5 * amag * amag + n * la - 0.5 * std::lgamma(n + 1.0);
        v[n] = std::polar(std::exp(logmag), ph * n);
    }
    if (tail_mass(v) > kTailTol) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "coherent_state: truncation n_max=%d too small for |alpha|=%g", n_max, amag);
        throw TruncationError(msg);
    }
    return v;
}

FockVector apply_creation(const FockVector& v) {
    if (std::norm(v[v.n_max()]) > kTailTol)
        throw TruncationError("apply_creation: top component carries mass; raise n_max");
    FockVector out(v.n_max());
    for (int n = 1; n <= v.n_max(); ++n) out[n] = std::sqrt(static_cast<double>(n)) * v[n - 1];
    return out;
}

FockVector spacs_state(Complex alpha, int n_max) {
    FockVector v = apply_creation(coherent_state(alpha, n_max));
    const double gamma = 1.0 / std::sqrt(1.0 + std::norm(alpha));
    scale(v, gamma);
    return v;
}

Complex inner(const FockVector& u, const FockVector& v) {
    if (u.n_max() != v.n_max()) throw DimensionMismatch("inner: unequal truncation");
    Complex s = 0.0;
    for (int n = 0; n <= u.n_max(); ++n) s += std::conj(u[n]) * v[n];
    return s;
}

double expect(const FockVector& v, Observable which) {
    const int N = v.n_max();
    Complex s = 0.0;
    switch (which) {
        case Observable::N:
        case Observable::N2:
        case Observable::N3: {
            const int k = which == Observable::N ? 1 : which == Observable::N2 ? 2 : 3;
            for (int n = 0; n <= N; ++n) {
                double nk = n;
                for (int j = 1; j < k; ++j) nk *= n;
                s += nk * std::conj(v[n]) * v[n];
            }
            break;
        }
        case Observable::X: {
            // x = (a + a^dag)/sqrt(2); both off-diagonal sums taken separately
            // so the imaginary residue is a genuine hermiticity check
            Complex a = 0.0, ad = 0.0;
            for (int n = 0; n < N; ++n) {
                const double r = std::sqrt(n + 1.0);
                a += std::conj(v[n]) * r * v[n + 1];
                ad += std::conj(v[n + 1]) * r * v[n];
            }
            s = (a + ad) / std::sqrt(2.0);
            break;
        }
        case Observable::X2: {
            // x^2 = (a^2 + a^dag^2 + 2n + 1)/2
            Complex a2 = 0.0, ad2 = 0.0;
            double nn = 0.0;
            for (int n = 0; n + 2 <= N; ++n) {
                const double r = std::sqrt((n + 1.0) * (n + 2.0));
                a2 += std::conj(v[n]) * r * v[n + 2];
                ad2 += std::conj(v[n + 2]) * r * v[n];
            }
            for (int n = 0; n <= N; ++n) nn += n * std::norm(v[n]);
            s = 0.5 * (a2 + ad2) + Complex(nn + 0.5, 0.0);
            break;
        }
    }
    if (std::abs(s.imag()) > 1e-12 * (1.0 + std::abs(s.real())))
        throw std::logic_error("expect: non-real quadratic form");
    return s.real();
}

void scale(FockVector& v, Complex factor) {
    for (auto& c : v.amps) c *= factor;
}

FockVector add(const FockVector& u, const FockVector& v) {
    if (u.n_max() != v.n_max()) throw DimensionMismatch("add: unequal truncation");
    FockVector out(u.n_max());
    for (int n = 0; n <= u.n_max(); ++n) out[n] = u[n] + v[n];
    return out;
}

void normalize(FockVector& v) {
    const double n2 = norm_squared(v);
    if (n2 <= 0.0) throw std::runtime_error("normalize: zero vector");
    scale(v, 1.0 / std::sqrt(n2));
}

JointBranches evolve_branches(Complex alpha, double lambda_signed, double theta_i,
                              double phi_i, int n_max) {
    const FockVector meter = spacs_state(alpha, n_max);
    JointBranches out{FockVector(n_max), FockVector(n_max)};
    const Complex wg = std::cos(theta_i / 2.0);
    const Complex we = std::polar(std::sin(theta_i / 2.0), phi_i);
    for (int n = 0; n <= n_max; ++n) {
        // e^{-+ i l n} on the amplitudes is the same operator as the coherent
        // substitution alpha -> alpha e^{-+ i l} plus the e^{-+ i l} prefactor.
        out.branch_g[n] = wg * std::polar(1.0, -lambda_signed * n) * meter[n];
        out.branch_e[n] = we * std::polar(1.0, +lambda_signed * n) * meter[n];
    }
    return out;
}

}  // namespace spacs
