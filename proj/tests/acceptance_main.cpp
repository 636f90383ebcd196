// Acceptance suite: one pass/fail line per criterion, exit code = #failures.
// Run all criteria by default or a single one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_helpers.hpp"
#include "spacs/cli_ops.hpp"
#include "spacs/phase.hpp"
#include "spacs/precision.hpp"

using namespace spacs;

namespace {

struct Criterion {
    int id;
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

ExperimentConfig fig1_cfg(double lambda, double theta_f, double alpha = 2.0) {
    return ExperimentConfig{alpha, 0.0, lambda, M_PI / 2.0, M_PI, theta_f, 0.0};
}

ExperimentConfig weak_cfg(Complex w, double alpha_mag, double lambda) {
    const QubitPair qp = qubit_pair_for_weak_value(w);
    return ExperimentConfig{alpha_mag, 0.0,          lambda,       qp.psi_i.theta,
                            qp.psi_i.phi, qp.psi_f.theta, qp.psi_f.phi};
}

bool within(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 1. Oracle equivalence (hard): p_f, h, fidelity, P(n), P(x) vs the
//    truncated-Fock oracle within 1e-8 relative (1e-10 absolute below 1e-8)
//    over 1000 seeded random configs, in under 60 s.
void criterion1(Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Xoshiro256 rng(424242);
    const double xs[] = {-2.0, -0.5, 0.5, 1.5, 2.5, 4.0, 6.0};
    double worst = 0.0;
    const auto gate = [&](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        const double dev = std::abs(a - b);
        worst = std::max(worst, scale > 1e-8 ? dev / scale : dev * 1e2);
        return dev <= std::max(1e-8 * scale, 1e-10);
    };
    for (int i = 0; i < 1000; ++i) {
        ExperimentConfig cfg;
        do {
            cfg = ExperimentConfig{4.0 * rng.uniform01(), 0.0,          rng.uniform01(),
                                   2.0 * M_PI * rng.uniform01(), 2.0 * M_PI * rng.uniform01(),
                                   2.0 * M_PI * rng.uniform01(), 2.0 * M_PI * rng.uniform01()};
        } while (postselection_probability(cfg) < 1e-6);
        const int n_max = default_n_max(cfg.alpha_mag);

        const FockVector unnorm = final_meter_unnormalized(cfg, n_max);
        const double p_num = norm_squared(unnorm);
        c.require(gate(postselection_probability(cfg), p_num), "p_f vs oracle");

        const JointBranches jb = evolve_joint(cfg, n_max);
        FockVector cond(n_max);
        const Complex wg = std::cos(cfg.theta_i / 2.0);
        const Complex we = std::polar(std::sin(cfg.theta_i / 2.0), -cfg.phi_i);
        for (int n = 0; n <= n_max; ++n) cond[n] = wg * jb.branch_g[n] + we * jb.branch_e[n];
        c.require(gate(no_postselection_state(cfg, n_max).weight, norm_squared(cond)),
                  "h vs oracle");

        FockVector fstate = unnorm;
        scale(fstate, 1.0 / std::sqrt(p_num));
        c.require(gate(fidelity(cfg), std::norm(inner(spacs_state(cfg.alpha(), n_max), fstate))),
                  "fidelity vs oracle");

        const DiscreteDistribution pn = photon_distribution(cfg, n_max);
        for (int n = 0; n <= n_max; ++n)
            if (!gate(pn.probs[n], std::norm(unnorm[n]) / p_num)) {
                c.require(false, "P(n) vs oracle at n=" + std::to_string(n));
                break;
            }
        for (double x : xs)
            if (!gate(quadrature_density(cfg, x), quadrature_density_fock(fstate, x))) {
                c.require(false, "P(x) vs oracle at x=" + fmt(x));
                break;
            }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 60.0, "runtime under 60 s");
    c.note("worst hard-set rel dev " + fmt(worst) + ", runtime " + fmt(secs) + " s");
}

// 2. Fig. 1 attainability: for each lambda in {0.05, 0.1, 1}, grid maxima of
//    p_f F^(n) and p_f Q_f agree within 1%, and the data-processing bound
//    holds pointwise.
void criterion2(Criterion& c) {
    const int n_max = default_n_max(2.0);
    for (double l : {0.05, 0.1, 1.0}) {
        double max_fn = 0.0, max_qf = 0.0, fn_at_argmax_qf = 0.0, qf_at_argmax_fn = 0.0;
        for (int i = 0; i < 721; ++i) {
            const ExperimentConfig cfg = fig1_cfg(l, 2.0 * M_PI * i / 720.0);
            const double pf = postselection_probability(cfg);
            if (pf < 1e-9) continue;
            const double fn = pf * fisher_photon(cfg, n_max);
            const double qf = pf * qfi_numeric(cfg, n_max);
            c.require(fn <= qf * (1.0 + 1e-6),
                      "pointwise p_f F^(n) <= p_f Q_f at lambda=" + fmt(l));
            if (fn > max_fn) {
                max_fn = fn;
                qf_at_argmax_fn = qf;
            }
            if (qf > max_qf) {
                max_qf = qf;
                fn_at_argmax_qf = fn;
            }
        }
        (void)fn_at_argmax_qf;
        const bool ok = within(max_fn, max_qf, 0.01);
        c.require(ok, "grid maxima of p_f F^(n) and p_f Q_f within 1% at lambda=" + fmt(l));
        c.note("lambda=" + fmt(l) + ": max p_f F^(n)=" + fmt(max_fn) + ", max p_f Q_f=" +
               fmt(max_qf) + ", p_f Q_f at the F^(n) optimum=" + fmt(qf_at_argmax_fn) +
               (ok ? "" : "  [the equality holds at the optimum; the global maxima differ]"));
    }
}

// 3. WVA advantage at lambda >= 0.1: max F_tot beats the conventional QFI.
void criterion3(Criterion& c) {
    const int n_max = default_n_max(2.0);
    const double q_cm = conventional_qfi(2.0, n_max).numeric;
    c.require(within(q_cm, 16.64, 1e-12), "Q_cm = 16.64 at alpha=2");
    for (double l : {0.1, 1.0}) {
        double max_ftot = 0.0;
        for (int i = 0; i < 721; ++i) {
            const ExperimentConfig cfg = fig1_cfg(l, 2.0 * M_PI * i / 720.0);
            if (postselection_probability(cfg) < 1e-9) continue;
            max_ftot = std::max(max_ftot,
                                postselection_probability(cfg) * qfi_numeric(cfg, n_max));
        }
        c.require(max_ftot > q_cm, "max F_tot > Q_cm at lambda=" + fmt(l));
        c.note("lambda=" + fmt(l) + ": max F_tot=" + fmt(max_ftot) + " vs Q_cm=" + fmt(q_cm));
    }
}

// 4. Fig. 2 fidelity: near-zero at (lambda=1, alpha=2) and (lambda=0.1,
//    alpha=25); exactly one as lambda -> 0.
void criterion4(Criterion& c) {
    const double f1 = fidelity(fig1_cfg(1.0, 3.0 * M_PI / 2.0, 2.0));
    const double f2 = fidelity(fig1_cfg(0.1, 3.0 * M_PI / 2.0, 25.0));
    const double f0 = fidelity(fig1_cfg(0.0, 3.0 * M_PI / 2.0, 2.0));
    c.require(f1 < 0.05, "fidelity(lambda=1, alpha=2) < 0.05");
    c.require(f2 < 0.05, "fidelity(lambda=0.1, alpha=25) < 0.05");
    c.require(std::abs(f0 - 1.0) <= 1e-9, "fidelity(lambda->0) = 1");
    c.note("values: " + fmt(f1) + ", " + fmt(f2) + ", " + fmt(f0));
}

// 5. Fig. 3 SNR peak: eta(theta_f=3pi/2; lambda=0.01) = 3.5 +- 0.5 and
//    eta > 1 in a neighborhood.
void criterion5(Criterion& c) {
    const int n_max = default_n_max(2.0);
    const SnrBundle s = snr_ratio(fig1_cfg(0.01, 3.0 * M_PI / 2.0), n_max);
    c.require(s.eta_defined && std::abs(s.eta - 3.5) <= 0.5,
              "eta(3pi/2; lambda=0.01) = 3.5 +- 0.5 (measured " + fmt(s.eta) + ")");
    bool neighborhood = true;
    for (double d : {-0.1, -0.05, 0.05, 0.1}) {
        const SnrBundle sn = snr_ratio(fig1_cfg(0.01, 3.0 * M_PI / 2.0 + d), n_max);
        neighborhood = neighborhood && sn.eta_defined && sn.eta > 1.0;
    }
    c.require(neighborhood, "eta > 1 in a neighborhood of 3pi/2");
    if (!c.pass) {
        c.note("the postselected and no-postselection meter states coincide at this angle");
        c.note("(weights -1/2,-1/2 vs 1/2,1/2), so the postselected signal is exactly zero");
        const SnrBundle mirror = snr_ratio(
            ExperimentConfig{2.0, 0.0, 0.05, M_PI / 2.0, 0.0, 3.0 * M_PI / 2.0, 0.0}, n_max);
        c.note("mirrored-angle reading (phi0=0): eta(3pi/2; lambda=0.05) = " + fmt(mirror.eta));
    }
}

// 6. Fig. 4 uncertainty product floor and coherent limit at w = 1+i.
void criterion6(Criterion& c) {
    for (double l : {0.01, 0.05, 0.1, 1.0}) {
        for (int i = 0; i < 50; ++i) {
            const double amag = 0.5 + (20.0 - 0.5) * i / 49.0;
            const NumberPhaseVariances v =
                number_phase_variances(weak_cfg(Complex(1.0, 1.0), amag, l));
            if (!(v.product >= 0.5 - 1e-6)) {
                c.require(false, "product >= 0.5 - 1e-6 at alpha=" + fmt(amag) +
                                     ", lambda=" + fmt(l));
                break;
            }
        }
    }
    const double p20 =
        number_phase_variances(weak_cfg(Complex(1.0, 1.0), 20.0, 0.01)).product;
    c.require(std::abs(p20 - 0.5) < 0.01 * 0.5, "product within 1% of 0.5 at alpha=20");
    c.note("product(alpha=20, lambda=0.01) = " + fmt(p20));
}

// 7. First-order weak-measurement law: residual of the phase shift scales as
//    lambda^2; photon shift reaches the coherent limit at alpha = 30.
void criterion7(Criterion& c) {
    std::vector<double> lx, ly;
    for (double l : {0.001, 0.002, 0.004, 0.008}) {
        const PhaseShift ps = phase_shift(weak_cfg(Complex(1.0, 1.0), 4.0, l), 4096);
        lx.push_back(std::log(l));
        ly.push_back(std::log(std::abs(ps.numeric - ps.first_order)));
    }
    const double slope = oracle::fit_slope(lx, ly);
    c.require(slope >= 1.7 && slope <= 2.3,
              "residual exponent in [1.7, 2.3] (measured " + fmt(slope) + ")");

    const double l = 1e-3;
    const PhotonShift dn = photon_shift(weak_cfg(Complex(1.0, 1.0), 30.0, l),
                                        default_n_max(30.0) + 40);
    const double target = 2.0 * l * 900.0;
    c.require(std::abs(dn.numeric - target) <= 0.02 * target,
              "coherent-limit photon shift within 2% at alpha=30");
    c.note("residual exponent " + fmt(slope) + "; dn=" + fmt(dn.numeric) + " vs 2 l a^2 Im w=" +
           fmt(target));
}

// 8. CRB harness at the fig-1c optimum: efficiency in [0.8, 1.05], variance
//    above the bound, in under 5 minutes.
void criterion8(Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n_max = default_n_max(2.0);
    // locate the FI-optimal angle on the figure grid
    double best_tf = 0.0, best = 0.0;
    for (int i = 0; i < 721; ++i) {
        const double tf = 2.0 * M_PI * i / 720.0;
        const ExperimentConfig cfg = fig1_cfg(0.1, tf);
        if (postselection_probability(cfg) < 1e-9) continue;
        const double fn = postselection_probability(cfg) * fisher_photon(cfg, n_max);
        if (fn > best) {
            best = fn;
            best_tf = tf;
        }
    }
    McRunConfig mc;
    mc.base = fig1_cfg(0.1, best_tf);
    mc.n_trials = 100000;
    mc.n_runs = 200;
    mc.seed = 20240915;
    mc.lambda_search = LambdaSearch{0.05, 0.15, 501};
    const McReport r = crb_experiment(mc);
    c.require(r.efficiency >= 0.8 && r.efficiency <= 1.05,
              "MLE efficiency in [0.8, 1.05] (measured " + fmt(r.efficiency) + ")");
    c.require(r.lambda_hat_var >= r.crb * (1.0 - 3.0 * std::sqrt(2.0 / 200.0)),
              "empirical variance respects the CRB band");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 300.0, "runtime under 5 min");
    c.note("theta_f*=" + fmt(best_tf) + ", p_f F^(n)=" + fmt(best) + ", var=" +
           fmt(r.lambda_hat_var) + ", crb=" + fmt(r.crb) + ", efficiency=" + fmt(r.efficiency) +
           ", accepted=" + fmt(r.accepted_fraction) + ", " + fmt(secs) + " s");
}

// 9. Soft-formula cross-check report: exists, deterministic, hard gate green
//    regardless of the soft deviations.
void criterion9(Criterion& c) {
    const std::string a = "/tmp/spacs_acc_cc_a.csv";
    const std::string b = "/tmp/spacs_acc_cc_b.csv";
    const int rc1 = cli::run_crosscheck(31337, 1000, a);
    const int rc2 = cli::run_crosscheck(31337, 1000, b);
    c.require(rc1 == 0, "crosscheck exit code 0 (hard set within 1e-8)");
    c.require(rc1 == rc2 && slurp(a) == slurp(b) &&
                  slurp(a + ".summary") == slurp(b + ".summary"),
              "byte-identical report for a repeated seed");
    const std::string summary = slurp(a + ".summary");
    for (const char* key :
         {"wva_qfi_series.worst_rel_dev=", "conventional_qfi_closed_form.worst_rel_dev=",
          "photon_shift_closed_form.worst_rel_dev=", "phase_shift_first_order.worst_rel_dev="})
        c.require(summary.find(key) != std::string::npos,
                  std::string("summary records ") + key);
    // surface the recorded soft deviations in the acceptance log
    std::istringstream ss(summary);
    std::string line;
    while (std::getline(ss, line))
        if (line.find("worst_rel_dev") != std::string::npos ||
            line.find("hard_pass") != std::string::npos)
            c.note(line);
}

// 10. Property suite: module invariants on seeded grids.
void criterion10(Criterion& c) {
    Xoshiro256 rng(777001);
    // unitarity + phase-application equivalence + truncation stability
    for (int t = 0; t < 200; ++t) {
        const double amag = 4.0 * rng.uniform01();
        const double l = rng.uniform01();
        const double ti = 2.0 * M_PI * rng.uniform01();
        const double phii = 2.0 * M_PI * rng.uniform01();
        const int n_max = default_n_max(amag);
        const JointBranches jb = evolve_branches(std::polar(amag, 0.0), l, ti, phii, n_max);
        if (std::abs(norm_squared(jb.branch_g) + norm_squared(jb.branch_e) - 1.0) > 1e-10) {
            c.require(false, "unitarity of the joint evolution");
            break;
        }
        const double gamma = 1.0 / std::sqrt(1.0 + amag * amag);
        FockVector rebuilt = apply_creation(coherent_state(std::polar(amag, -l), n_max));
        scale(rebuilt, std::polar(gamma * std::cos(ti / 2.0), -l));
        bool same = true;
        for (int n = 0; n <= n_max; ++n)
            same = same && std::abs(jb.branch_g[n] - rebuilt[n]) <= 1e-12;
        if (!same) {
            c.require(false, "diagonal-phase vs amplitude-substitution equivalence");
            break;
        }
    }
    for (double amag : {1.0, 2.5, 4.0}) {
        const int N = default_n_max(amag);
        const ExperimentConfig cfg{amag, 0.0, 0.3, 1.1, 0.5, 2.0, 0.2};
        const double p1 = norm_squared(final_meter_unnormalized(cfg, N));
        const double p2 = norm_squared(final_meter_unnormalized(cfg, 2 * N));
        c.require(std::abs(p1 - p2) < 1e-9, "truncation stability of p_f at alpha=" + fmt(amag));
    }
    // normalizations
    {
        const ExperimentConfig cfg = fig1_cfg(0.1, 3.0 * M_PI / 2.0);
        const int N = default_n_max(2.0);
        const DiscreteDistribution pn = photon_distribution(cfg, N);
        double mass = 0.0;
        for (double p : pn.probs) mass += p;
        c.require(std::abs(mass - 1.0) <= 1e-9, "sum P(n) = 1");
        const GridDistribution g = quadrature_distribution(cfg, -4.0, 8.0, 2401);
        double xm = 0.0;
        for (std::size_t i = 0; i + 1 < g.densities.size(); ++i)
            xm += 0.5 * (g.densities[i] + g.densities[i + 1]) * g.spacing;
        c.require(std::abs(xm - 1.0) <= 1e-6, "integral P(x) = 1");
        const PhaseGrid ph =
            phase_distribution_exact(spacs_state(2.0, N), 4096, 0.0);
        c.require(std::abs(ph.mass() - 1.0) <= 1e-6, "integral P(phi) = 1");
    }
    // FI nonnegativity + periodicity
    {
        const int N = default_n_max(2.0);
        for (int i = 0; i < 24; ++i) {
            const double tf = 2.0 * M_PI * i / 24.0;
            const ExperimentConfig cfg = fig1_cfg(0.05, tf);
            if (postselection_probability(cfg) < 1e-6) continue;
            const double fn = fisher_photon(cfg, N);
            const double fx = fisher_quadrature_grid(cfg);
            if (fn < 0.0 || fx < 0.0) {
                c.require(false, "FI nonnegativity");
                break;
            }
            ExperimentConfig shifted = cfg;
            shifted.theta_f += 2.0 * M_PI;
            if (std::abs(postselection_probability(shifted) -
                         postselection_probability(cfg)) > 1e-14) {
                c.require(false, "2pi periodicity of p_f");
                break;
            }
        }
    }
    // seeded determinism of the harness
    {
        McRunConfig mc;
        mc.base = fig1_cfg(0.1, 3.0 * M_PI / 2.0);
        mc.n_trials = 5000;
        mc.n_runs = 10;
        mc.seed = 5150;
        mc.lambda_search = LambdaSearch{0.05, 0.15, 301};
        const McReport r1 = crb_experiment(mc);
        const McReport r2 = crb_experiment(mc);
        c.require(r1.lambda_hat_mean == r2.lambda_hat_mean &&
                      r1.lambda_hat_var == r2.lambda_hat_var &&
                      r1.accepted_fraction == r2.accepted_fraction,
                  "seeded determinism of the MC report");
    }
    c.note("invariant sweep complete");
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    void (*fns[])(Criterion&) = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                 criterion6, criterion7, criterion8, criterion9, criterion10};
    int failures = 0;
    for (int k = 1; k <= 10; ++k) {
        if (only != 0 && only != k) continue;
        Criterion c{k};
        try {
            fns[k - 1](c);
        } catch (const std::exception& e) {
            c.require(false, std::string("unexpected exception: ") + e.what());
        }
        std::printf("[%s] criterion %d\n", c.pass ? "PASS" : "FAIL", k);
        for (const std::string& n : c.notes) std::printf("        %s\n", n.c_str());
        if (!c.pass) ++failures;
    }
    return failures;
}
