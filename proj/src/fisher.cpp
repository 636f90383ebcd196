#include "spacs/fisher.hpp"

#include <algorithm>
#include <cmath>

namespace spacs {

namespace {

// gamma^2 n |a|^{2n-2} e^{-|a|^2} / (n-1)! for n >= 1, in log space.
std::vector<double> photon_weights(double alpha_mag, int n_max) {
    std::vector<double> w(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double a2 = alpha_mag * alpha_mag;
    const double g2 = 1.0 / (1.0 + a2);
    if (alpha_mag == 0.0) {
        w[1] = g2;
        return w;
    }
    const double la = std::log(alpha_mag);
    for (int n = 1; n <= n_max; ++n)
        w[n] = g2 * std::exp(std::log(static_cast<double>(n)) + (2.0 * n - 2.0) * la - a2 -
                             std::lgamma(static_cast<double>(n)));
    return w;
}

// d p_f / d lambda from the same series that defines P_f(n).
double pf_dlambda(const ExperimentConfig& cfg, const std::vector<double>& w) {
    const ABCConstants k = abc_constants(cfg);
    const double phi0 = cfg.phi0();
    double d = 0.0;
    for (int n = 1; n < static_cast<int>(w.size()); ++n)
        d += w[n] * (-2.0 * n * k.B * std::sin(2.0 * n * cfg.lambda + phi0));
    return d;
}

FockVector aligned_final_state(const ExperimentConfig& cfg, double lambda, int n_max,
                               int align_index) {
    ExperimentConfig c = cfg;
    c.lambda = lambda;
    FockVector v = final_meter_unnormalized(c, n_max);
    const double p = norm_squared(v);
    if (p < 1e-9) throw PostselectionFailed("qfi_numeric: p_f < 1e-9 at a stencil point");
    scale(v, std::polar(1.0 / std::sqrt(p), -std::arg(v[align_index])));
    return v;
}

double qfi_once(const ExperimentConfig& cfg, int n_max, double dl) {
    ExperimentConfig c0 = cfg;
    FockVector center = final_meter_unnormalized(c0, n_max);
    const double p0 = norm_squared(center);
    if (p0 < 1e-9) throw PostselectionFailed("qfi_numeric: p_f < 1e-9");
    int m = 0;
    for (int n = 1; n <= n_max; ++n)
        if (std::norm(center[n]) > std::norm(center[m])) m = n;
    scale(center, std::polar(1.0 / std::sqrt(p0), -std::arg(center[m])));

    const FockVector vp = aligned_final_state(cfg, cfg.lambda + dl, n_max, m);
    const FockVector vm = aligned_final_state(cfg, cfg.lambda - dl, n_max, m);
    double d2 = 0.0;
    Complex vd = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const Complex d = (vp[n] - vm[n]) / (2.0 * dl);
        d2 += std::norm(d);
        vd += std::conj(center[n]) * d;
    }
    return 4.0 * (d2 - std::norm(vd));
}

struct QuadratureEvaluator {
    // P_f(x) = base * [ A poly_r(x) e^{er(x)} + B Re( polyc(x) e^{ec(x)} ) ]
    double A, B, base, a;
    double cosl, cos2l;
    Complex e1, e2, cross_phase;

    explicit QuadratureEvaluator(const ExperimentConfig& cfg) {
        if (cfg.alpha_phase != 0.0)
            throw UnsupportedPhase("quadrature_density: requires alpha_phase = 0");
        const ABCConstants k = abc_constants(cfg);
        A = k.A;
        B = k.B;
        a = cfg.alpha_mag;
        const double l = cfg.lambda;
        cosl = std::cos(l);
        cos2l = std::cos(2.0 * l);
        e1 = std::polar(1.0, l);
        e2 = e1 * e1;
        cross_phase = std::polar(1.0, 2.0 * l + cfg.phi0());
        const double g2 = 1.0 / (1.0 + a * a);
        base = g2 * std::exp(-a * a) / std::sqrt(M_PI) / postselection_probability(cfg);
    }

    double operator()(double x) const {
        const double sq2xa = 2.0 * std::sqrt(2.0) * x * a;
        const double termA = (2.0 * x * x - sq2xa * cosl + a * a) *
                             std::exp(-a * a * cos2l + sq2xa * cosl - x * x);
        const Complex polyc = 2.0 * x * x - sq2xa * e1 + a * a * e2;
        const Complex expc = std::exp(Complex(-x * x, 0.0) + sq2xa * e1 - a * a * e2);
        const double termB = (cross_phase * polyc * expc).real();
        return base * (A * termA + B * termB);
    }
};

}  // namespace

double qfi_numeric(const ExperimentConfig& cfg, int n_max, double dlambda) {
    const double q1 = qfi_once(cfg, n_max, dlambda);
    const double q2 = qfi_once(cfg, n_max, dlambda / 2.0);
    if (std::abs(q1 - q2) > 1e-4 * std::max(std::abs(q2), 1e-30))
        throw StepTooLarge("qfi_numeric: step-halving check disagrees beyond 1e-4 relative");
    return q2;
}

double wva_qfi_series(const ExperimentConfig& cfg, double tol) {
    cfg.validate();
    const double p_f = postselection_probability(cfg);
    if (p_f < 1e-9) throw PostselectionFailed("wva_qfi_series: p_f < 1e-9");
    const ABCConstants k = abc_constants(cfg);
    const double a2 = cfg.alpha_mag * cfg.alpha_mag;
    const double g2 = 1.0 / (1.0 + a2), g4 = g2 * g2;
    const double l = cfg.lambda, phi0 = cfg.phi0();

    const double n1 = a2;
    const double n2 = a2 + a2 * a2;
    const double n3 = a2 + 3.0 * a2 * a2 + a2 * a2 * a2;
    const double m3 = 1.0 + 3.0 * n1 + 3.0 * n2 + n3;
    const double m2 = 1.0 + 2.0 * n1 + n2;

    const double mean_cut = a2 + 10.0 * std::sqrt(a2 + 1.0);
    double s_cos = 0.0, s_sin = 0.0;
    const double loga2 = a2 > 0.0 ? std::log(a2) : 0.0;
    for (int n = 0;; ++n) {
        const double w = a2 > 0.0 ? std::exp(-a2 + n * loga2 - std::lgamma(n + 1.0))
                                  : (n == 0 ? 1.0 : 0.0);
        const double cubic = (n + 1.0) * (n + 1.0) * (n + 1.0);  // 1 + 3n + 3n^2 + n^3
        const double quad = (n + 1.0) * (n + 1.0);               // 1 + 2n + n^2
        s_cos += w * cubic * std::cos(2.0 * l + 2.0 * n * l + phi0);
        s_sin += w * quad * std::sin(2.0 * l + 2.0 * n * l + phi0);
        // |next term| <= w * a2/(n+1) * (n+2)^3 <= 8 w a2/(n+1) * cubic
        const double next = w * (a2 / (n + 1.0)) * 8.0 * cubic;
        if (n > mean_cut &&
            next < tol * (1.0 + std::max(std::abs(s_cos), std::abs(s_sin))))
            break;
        if (a2 == 0.0) break;
    }
    return 4.0 * (g2 * k.A * m3 - g4 * k.C * k.C * m2 * m2 / p_f - g2 * k.B * s_cos -
                  k.B * k.B * g4 * s_sin * s_sin / p_f);
}

DiscreteDistribution photon_distribution(const ExperimentConfig& cfg, int n_max) {
    cfg.validate();
    const double p_f = postselection_probability(cfg);
    if (p_f < 1e-9) throw PostselectionFailed("photon_distribution: p_f < 1e-9");
    const ABCConstants k = abc_constants(cfg);
    const std::vector<double> w = photon_weights(cfg.alpha_mag, n_max);
    DiscreteDistribution out;
    out.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        double p = w[n] * (k.A + k.B * std::cos(2.0 * n * cfg.lambda + cfg.phi0())) / p_f;
        out.probs[n] = std::max(p, 0.0);
    }
    return out;
}

std::vector<double> photon_distribution_dlambda(const ExperimentConfig& cfg, int n_max) {
    const double p_f = postselection_probability(cfg);
    if (p_f < 1e-9) throw PostselectionFailed("photon_distribution_dlambda: p_f < 1e-9");
    const ABCConstants k = abc_constants(cfg);
    const std::vector<double> w = photon_weights(cfg.alpha_mag, n_max);
    const double dpf = pf_dlambda(cfg, w);
    const double phi0 = cfg.phi0();
    std::vector<double> d(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        const double arg = 2.0 * n * cfg.lambda + phi0;
        const double p = w[n] * (k.A + k.B * std::cos(arg)) / p_f;
        d[n] = w[n] * (-2.0 * n * k.B * std::sin(arg)) / p_f - p * dpf / p_f;
    }
    return d;
}

double fisher_photon(const ExperimentConfig& cfg, int n_max, double dlambda) {
    const DiscreteDistribution p = photon_distribution(cfg, n_max);
    const std::vector<double> d = photon_distribution_dlambda(cfg, n_max);
    double f = 0.0;
    for (int n = 1; n <= n_max; ++n)
        if (p.probs[n] >= 1e-15) f += d[n] * d[n] / p.probs[n];

    // central-difference sanity check on the same grid
    ExperimentConfig cp = cfg, cm = cfg;
    cp.lambda += dlambda;
    cm.lambda -= dlambda;
    const DiscreteDistribution pp = photon_distribution(cp, n_max);
    const DiscreteDistribution pm = photon_distribution(cm, n_max);
    double f_fd = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        if (p.probs[n] < 1e-15) continue;
        const double dn = (pp.probs[n] - pm.probs[n]) / (2.0 * dlambda);
        f_fd += dn * dn / p.probs[n];
    }
    if (std::abs(f - f_fd) > 1e-4 * std::max(std::abs(f), 1e-12))
        throw StepTooLarge("fisher_photon: analytic and finite-difference derivatives disagree");
    return f;
}

double quadrature_density(const ExperimentConfig& cfg, double x) {
    cfg.validate();
    if (postselection_probability(cfg) < 1e-9)
        throw PostselectionFailed("quadrature_density: p_f < 1e-9");
    return QuadratureEvaluator(cfg)(x);
}

std::vector<double> hermite_functions(double x, int n_max) {
    std::vector<double> psi(static_cast<std::size_t>(n_max) + 1);
    psi[0] = std::pow(M_PI, -0.25) * std::exp(-x * x / 2.0);
    if (n_max >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int n = 1; n < n_max; ++n)
        psi[n + 1] =
            std::sqrt(2.0 / (n + 1.0)) * x * psi[n] - std::sqrt(n / (n + 1.0)) * psi[n - 1];
    return psi;
}

double quadrature_density_fock(const FockVector& state, double x) {
    const std::vector<double> psi = hermite_functions(x, state.n_max());
    Complex amp = 0.0;
    for (int n = 0; n <= state.n_max(); ++n) amp += psi[n] * state[n];
    return std::norm(amp);
}

GridDistribution quadrature_distribution(const ExperimentConfig& cfg, double lo, double hi,
                                         int points) {
    if (points < 2 || !(hi > lo))
        throw std::invalid_argument("quadrature_distribution: bad grid");
    const QuadratureEvaluator eval(cfg);
    GridDistribution g;
    g.spacing = (hi - lo) / (points - 1);
    g.points.resize(points);
    g.densities.resize(points);
    for (int i = 0; i < points; ++i) {
        g.points[i] = lo + i * g.spacing;
        g.densities[i] = std::max(eval(g.points[i]), 0.0);
    }
    return g;
}

double fisher_quadrature_grid(const ExperimentConfig& cfg) {
    constexpr double dl = 1e-5;
    const QuadratureEvaluator e0(cfg);
    ExperimentConfig cp = cfg, cm = cfg;
    cp.lambda += dl;
    cm.lambda -= dl;
    const QuadratureEvaluator ep(cp), em(cm);
    double f = 0.0;
    for (int y = -300; y <= 700; ++y) {
        const double x = y / 100.0;
        const double p0 = e0(x);
        if (p0 <= 1e-280) continue;
        const double dp = (ep(x) - em(x)) / (2.0 * dl);
        f += dp * dp / (100.0 * p0);
    }
    return f;
}

ConventionalQfi conventional_qfi(double alpha_mag, int n_max) {
    const FockVector meter = spacs_state(alpha_mag, n_max);
    const double n1 = expect(meter, Observable::N);
    const double n2 = expect(meter, Observable::N2);
    const double numeric = 4.0 * (n2 - n1 * n1);
    const double a2 = alpha_mag * alpha_mag;
    const double xi2 = a2;  // |xi| = |alpha|
    const double closed = 4.0 * xi2 *
                          (2.0 * a2 + 4.0 * a2 * a2 + a2 * a2 * a2 -
                           xi2 * (2.0 * a2 + a2 * a2) * (2.0 * a2 + a2 * a2));
    return ConventionalQfi{numeric, closed};
}

FisherReport fisher_report(const ExperimentConfig& cfg, int n_max) {
    FisherReport r;
    r.p_f = postselection_probability(cfg);
    r.q_f = qfi_numeric(cfg, n_max);
    r.f_tot = r.p_f * r.q_f;
    r.eff_fi_photon = r.p_f * fisher_photon(cfg, n_max);
    r.eff_fi_quad = r.p_f * fisher_quadrature_grid(cfg);
    r.q_cm = conventional_qfi(cfg.alpha_mag, n_max).numeric;
    for (double* v : {&r.p_f, &r.q_f, &r.f_tot, &r.eff_fi_photon, &r.eff_fi_quad, &r.q_cm})
        if (*v < 0.0 && *v > -1e-9) *v = 0.0;
    return r;
}

}  // namespace spacs
