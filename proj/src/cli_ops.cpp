#include "spacs/cli_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "spacs/phase.hpp"
#include "spacs/precision.hpp"

namespace spacs::cli {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

constexpr double kFigureLambdas[4] = {0.01, 0.05, 0.1, 1.0};

struct MetaWriter {
    std::vector<std::pair<std::string, std::string>> kv;
    void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void add(const std::string& k, double v) { kv.emplace_back(k, fmt17(v)); }
    bool write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) return false;
        for (const auto& [k, v] : kv) f << k << "=" << v << "\n";
        return static_cast<bool>(f);
    }
};

ExperimentConfig fig1_config(double lambda, double theta_f) {
    // theta_i = pi/2, phi0 = pi, alpha = 2
    return ExperimentConfig{2.0, 0.0, lambda, M_PI / 2.0, M_PI, theta_f, 0.0};
}

int write_fig1(const std::string& id, double lambda, const std::string& out, int points) {
    const SweepSpec sweep{SweepSpec::Variable::ThetaF, 0.0, 2.0 * M_PI,
                          points > 0 ? points : 721};
    const int n = sweep.points;
    const int n_max = default_n_max(2.0);
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", out.c_str());
        return kExitComputeError;
    }
    f << "theta_f,pf_fn,pf_fx,f_tot,q_cm,status\n";
    for (int i = 0; i < n; ++i) {
        const double tf = sweep.at(i);
        const ExperimentConfig cfg = fig1_config(lambda, tf);
        try {
            const FisherReport r = fisher_report(cfg, n_max);
            f << fmt17(tf) << ',' << fmt17(r.eff_fi_photon) << ',' << fmt17(r.eff_fi_quad) << ','
              << fmt17(r.f_tot) << ',' << fmt17(r.q_cm) << ",ok\n";
        } catch (const PostselectionFailed&) {
            f << fmt17(tf) << ",,,,,postselection_failed\n";
        }
    }
    MetaWriter m;
    m.add("figure", id);
    m.add("columns", "theta_f,pf_fn,pf_fx,f_tot,q_cm,status");
    m.add("points", static_cast<double>(n));
    m.add("lambda", lambda);
    m.add("alpha_mag", 2.0);
    m.add("alpha_phase", 0.0);
    m.add("theta_i", M_PI / 2.0);
    m.add("phi_i", M_PI);
    m.add("phi_f", 0.0);
    m.add("theta_f_sweep", "0..2pi");
    m.add("n_max", static_cast<double>(n_max));
    m.add("tool", kToolVersion);
    m.write(out + ".meta");
    return f ? kExitOk : kExitComputeError;
}

int write_fig2(const std::string& out, int points) {
    const SweepSpec sweep{SweepSpec::Variable::AlphaMag, 0.0, 30.0, points > 0 ? points : 601};
    const int n = sweep.points;
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", out.c_str());
        return kExitComputeError;
    }
    f << "alpha,fidelity_l0.01,fidelity_l0.05,fidelity_l0.1,fidelity_l1,status\n";
    for (int i = 0; i < n; ++i) {
        const double amag = sweep.at(i);
        std::string row = fmt17(amag);
        bool ok = true;
        for (double l : kFigureLambdas) {
            ExperimentConfig cfg{amag, 0.0, l, M_PI / 2.0, M_PI, 3.0 * M_PI / 2.0, 0.0};
            try {
                row += ',' + fmt17(fidelity(cfg));
            } catch (const PostselectionFailed&) {
                row += ',';
                ok = false;
            }
        }
        f << row << (ok ? ",ok\n" : ",postselection_failed\n");
    }
    MetaWriter m;
    m.add("figure", "fig2");
    m.add("columns", "alpha,fidelity_l0.01,fidelity_l0.05,fidelity_l0.1,fidelity_l1,status");
    m.add("points", static_cast<double>(n));
    m.add("lambdas", "0.01,0.05,0.1,1");
    m.add("alpha_sweep", "0..30");
    m.add("theta_i", M_PI / 2.0);
    m.add("phi_i", M_PI);
    m.add("theta_f", 3.0 * M_PI / 2.0);
    m.add("phi_f", 0.0);
    m.add("tool", kToolVersion);
    m.write(out + ".meta");
    return f ? kExitOk : kExitComputeError;
}

int write_fig3(const std::string& out, int points) {
    const SweepSpec sweep{SweepSpec::Variable::ThetaF, 0.0, 2.0 * M_PI,
                          points > 0 ? points : 721};
    const int n = sweep.points;
    const int n_max = default_n_max(2.0);
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", out.c_str());
        return kExitComputeError;
    }
    f << "theta_f,eta_l0.01,eta_l0.05,eta_l0.1,eta_l1,status\n";
    for (int i = 0; i < n; ++i) {
        const double tf = sweep.at(i);
        std::string row = fmt17(tf);
        std::string status = "ok";
        for (double l : kFigureLambdas) {
            try {
                const SnrBundle s = snr_ratio(fig1_config(l, tf), n_max);
                if (s.eta_defined) {
                    row += ',' + fmt17(s.eta);
                } else {
                    row += ',';
                    status = "degenerate_signal";
                }
            } catch (const PostselectionFailed&) {
                row += ',';
                status = "postselection_failed";
            }
        }
        f << row << ',' << status << '\n';
    }
    MetaWriter m;
    m.add("figure", "fig3");
    m.add("columns", "theta_f,eta_l0.01,eta_l0.05,eta_l0.1,eta_l1,status");
    m.add("points", static_cast<double>(n));
    m.add("lambdas", "0.01,0.05,0.1,1");
    m.add("alpha_mag", 2.0);
    m.add("theta_i", M_PI / 2.0);
    m.add("phi_i", M_PI);
    m.add("phi_f", 0.0);
    m.add("n_max", static_cast<double>(n_max));
    m.add("tool", kToolVersion);
    m.write(out + ".meta");
    return f ? kExitOk : kExitComputeError;
}

int write_fig4(const std::string& out, int points) {
    const SweepSpec sweep{SweepSpec::Variable::AlphaMag, 0.5, 20.0, points > 0 ? points : 391};
    const int n = sweep.points;
    const Complex w{1.0, 1.0};
    const QubitPair qp = qubit_pair_for_weak_value(w);
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", out.c_str());
        return kExitComputeError;
    }
    f << "alpha,product_l0.01,product_l0.05,product_l0.1,product_l1,product_coherent\n";
    for (int i = 0; i < n; ++i) {
        const double amag = sweep.at(i);
        std::string row = fmt17(amag);
        for (double l : kFigureLambdas) {
            ExperimentConfig cfg{amag, 0.0, l,
                                 qp.psi_i.theta, qp.psi_i.phi,
                                 qp.psi_f.theta, qp.psi_f.phi};
            row += ',' + fmt17(number_phase_variances(cfg).product);
        }
        // coherent meter: Var(n) = |b|^2, Var(phi) = 1/(4|b|^2)
        ExperimentConfig c0{amag, 0.0, 0.01, qp.psi_i.theta, qp.psi_i.phi, qp.psi_f.theta,
                            qp.psi_f.phi};
        const double y = std::norm(weak_meter_state(c0).beta);
        row += ',' + fmt17(std::sqrt(y * (1.0 / (4.0 * y))));
        f << row << '\n';
    }
    MetaWriter m;
    m.add("figure", "fig4");
    m.add("columns", "alpha,product_l0.01,product_l0.05,product_l0.1,product_l1,product_coherent");
    m.add("points", static_cast<double>(n));
    m.add("lambdas", "0.01,0.05,0.1,1");
    m.add("weak_value", "1+1i");
    m.add("theta_i", qp.psi_i.theta);
    m.add("phi_i", qp.psi_i.phi);
    m.add("theta_f", qp.psi_f.theta);
    m.add("phi_f", qp.psi_f.phi);
    m.add("alpha_sweep", "0.5..20");
    m.add("tool", kToolVersion);
    m.write(out + ".meta");
    return f ? kExitOk : kExitComputeError;
}

}  // namespace

int run_figure(const std::string& id, const std::string& out_path, int points) {
    if (points != 0 && points < 2) {
        std::fprintf(stderr, "error: --points must be at least 2\n");
        return kExitUsageError;
    }
    if (id == "fig1a") return write_fig1(id, 0.01, out_path, points);
    if (id == "fig1b") return write_fig1(id, 0.05, out_path, points);
    if (id == "fig1c") return write_fig1(id, 0.1, out_path, points);
    if (id == "fig1d") return write_fig1(id, 1.0, out_path, points);
    if (id == "fig2") return write_fig2(out_path, points);
    if (id == "fig3") return write_fig3(out_path, points);
    if (id == "fig4") return write_fig4(out_path, points);
    std::fprintf(stderr, "error: unknown figure id '%s'\n", id.c_str());
    return kExitUsageError;
}

namespace {

struct QuantityTracker {
    std::string name;
    bool hard = false;
    double worst_margin = 0.0;  // deviation / allowance; > 1 fails the hard gate
    double worst_rel = 0.0;
    double at_closed = 0.0, at_numeric = 0.0;
    int count = 0;

    void record(double closed, double numeric) {
        const double dev = std::abs(closed - numeric);
        const double scale = std::max(std::abs(closed), std::abs(numeric));
        const double allowance = std::max(1e-8 * scale, 1e-10);
        const double margin = dev / allowance;
        const double rel = scale > 0.0 ? dev / scale : 0.0;
        if (margin > worst_margin) {
            worst_margin = margin;
            worst_rel = rel;
            at_closed = closed;
            at_numeric = numeric;
        }
        ++count;
    }
};

}  // namespace

int run_crosscheck(std::uint64_t seed, int n_points, const std::string& out_path) {
    if (n_points < 100) {
        std::fprintf(stderr, "error: crosscheck needs at least 100 points (got %d)\n", n_points);
        return kExitUsageError;
    }
    Xoshiro256 rng(seed);
    QuantityTracker q_pf{"p_f", true}, q_h{"h", true}, q_fid{"fidelity", true},
        q_pn{"photon_distribution", true}, q_px{"quadrature_density", true},
        q_wva{"wva_qfi_series", false}, q_qcm{"conventional_qfi_closed_form", false},
        q_dn{"photon_shift_closed_form", false}, q_dphi{"phase_shift_first_order", false};

    const double xs[] = {-2.0, -1.0, -0.3, 0.0, 0.5, 1.0, 1.7, 2.5, 3.5, 4.5, 6.0};
    for (int i = 0; i < n_points; ++i) {
        ExperimentConfig cfg;
        double p_closed = 0.0;
        do {
            cfg = ExperimentConfig{4.0 * rng.uniform01(), 0.0,          rng.uniform01(),
                                   2.0 * M_PI * rng.uniform01(), 2.0 * M_PI * rng.uniform01(),
                                   2.0 * M_PI * rng.uniform01(), 2.0 * M_PI * rng.uniform01()};
            p_closed = postselection_probability(cfg);
        } while (p_closed < 1e-6);
        const int n_max = default_n_max(cfg.alpha_mag);

        const FockVector unnorm = final_meter_unnormalized(cfg, n_max);
        const double p_numeric = norm_squared(unnorm);
        q_pf.record(p_closed, p_numeric);

        // conditional-state weight h against the raw superposition norm
        {
            const JointBranches jb = evolve_joint(cfg, n_max);
            FockVector cond(n_max);
            const Complex wg = std::cos(cfg.theta_i / 2.0);
            const Complex we = std::polar(std::sin(cfg.theta_i / 2.0), -cfg.phi_i);
            for (int n = 0; n <= n_max; ++n)
                cond[n] = wg * jb.branch_g[n] + we * jb.branch_e[n];
            q_h.record(no_postselection_state(cfg, n_max).weight, norm_squared(cond));
        }

        FockVector fstate = unnorm;
        scale(fstate, 1.0 / std::sqrt(p_numeric));
        q_fid.record(fidelity(cfg), std::norm(inner(spacs_state(cfg.alpha(), n_max), fstate)));

        const DiscreteDistribution pn = photon_distribution(cfg, n_max);
        for (int n = 0; n <= n_max; ++n)
            q_pn.record(pn.probs[n], std::norm(unnorm[n]) / p_numeric);

        for (double x : xs)
            q_px.record(quadrature_density(cfg, x), quadrature_density_fock(fstate, x));

        // soft set: reported, never gating
        try {
            q_wva.record(wva_qfi_series(cfg), p_closed * qfi_numeric(cfg, n_max));
        } catch (const std::runtime_error&) {
        }
        const ConventionalQfi qcm = conventional_qfi(cfg.alpha_mag, n_max);
        q_qcm.record(qcm.closed_form, qcm.numeric);
        const Complex overlap =
            std::conj(QubitState{cfg.theta_f, cfg.phi_f}.amp_g()) *
                QubitState{cfg.theta_i, cfg.phi_i}.amp_g() +
            std::conj(QubitState{cfg.theta_f, cfg.phi_f}.amp_e()) *
                QubitState{cfg.theta_i, cfg.phi_i}.amp_e();
        if (std::abs(overlap) > 1e-3 && cfg.alpha_mag > 1e-3) {
            const Complex w =
                weak_value_sigma_z(QubitState{cfg.theta_i, cfg.phi_i},
                                   QubitState{cfg.theta_f, cfg.phi_f})
                    .value;
            // the shift formulas only claim the weak regime
            if (cfg.lambda * std::abs(w) <= 0.3) {
                const PhotonShift ps = photon_shift(cfg, n_max);
                q_dn.record(ps.closed_form, ps.numeric);
                try {
                    const PhaseShift ph = phase_shift(cfg, 2048);
                    q_dphi.record(ph.first_order, ph.numeric);
                } catch (const PostselectionFailed&) {
                }
            }
        }
    }

    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", out_path.c_str());
        return kExitComputeError;
    }
    f << "quantity,set,closed_form_value,numeric_value,abs_dev,rel_dev\n";
    bool hard_pass = true;
    double hard_worst_rel = 0.0;
    const QuantityTracker* all[] = {&q_pf, &q_h,   &q_fid, &q_pn, &q_px,
                                    &q_wva, &q_qcm, &q_dn,  &q_dphi};
    for (const QuantityTracker* t : all) {
        f << t->name << ',' << (t->hard ? "hard" : "soft") << ',' << fmt17(t->at_closed) << ','
          << fmt17(t->at_numeric) << ',' << fmt17(std::abs(t->at_closed - t->at_numeric)) << ','
          << fmt17(t->worst_rel) << '\n';
        if (t->hard) {
            hard_pass = hard_pass && t->worst_margin <= 1.0;
            hard_worst_rel = std::max(hard_worst_rel, t->worst_rel);
        }
    }

    MetaWriter s;
    s.add("seed", static_cast<double>(seed));
    s.add("n_points", static_cast<double>(n_points));
    s.add("hard_set", "p_f,h,fidelity,photon_distribution,quadrature_density");
    s.add("hard_pass", hard_pass ? "1" : "0");
    s.add("hard_worst_rel_dev", hard_worst_rel);
    for (const QuantityTracker* t : all) {
        s.add(t->name + ".worst_rel_dev", t->worst_rel);
        s.add(t->name + ".gate_margin", t->worst_margin);
        s.add(t->name + ".comparisons", static_cast<double>(t->count));
    }
    s.add("tool", kToolVersion);
    if (!s.write(out_path + ".summary")) {
        std::fprintf(stderr, "error: cannot write %s.summary\n", out_path.c_str());
        return kExitComputeError;
    }
    return hard_pass ? kExitOk : kExitComputeError;
}

McRunConfig parse_mc_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }

    static const char* known[] = {"alpha_mag", "alpha_phase", "lambda",     "theta_i",
                                  "phi_i",     "theta_f",     "phi_f",      "n_max",
                                  "seed",      "n_trials",    "n_runs",     "lambda_lo",
                                  "lambda_hi", "lambda_points"};
    for (const auto& [k, v] : kv)
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* s) { return k == s; }) == std::end(known))
            throw std::runtime_error(path + ": unknown key '" + k + "'");

    const auto need = [&](const std::string& k) -> const std::string& {
        const auto it = kv.find(k);
        if (it == kv.end()) throw std::runtime_error(path + ": missing key '" + k + "'");
        return it->second;
    };
    const auto to_d = [&](const std::string& k, const std::string& v) {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::runtime_error(path + ": bad number for '" + k + "'");
        return x;
    };

    McRunConfig mc;
    mc.base.alpha_mag = to_d("alpha_mag", need("alpha_mag"));
    mc.base.alpha_phase = kv.count("alpha_phase") ? to_d("alpha_phase", kv["alpha_phase"]) : 0.0;
    mc.base.lambda = to_d("lambda", need("lambda"));
    mc.base.theta_i = to_d("theta_i", need("theta_i"));
    mc.base.phi_i = to_d("phi_i", need("phi_i"));
    mc.base.theta_f = to_d("theta_f", need("theta_f"));
    mc.base.phi_f = to_d("phi_f", need("phi_f"));
    mc.n_max = kv.count("n_max") ? static_cast<int>(to_d("n_max", kv["n_max"])) : 0;
    mc.seed = static_cast<std::uint64_t>(to_d("seed", need("seed")));
    mc.n_trials = static_cast<int>(to_d("n_trials", need("n_trials")));
    mc.n_runs = static_cast<int>(to_d("n_runs", need("n_runs")));
    mc.lambda_search.lo = to_d("lambda_lo", need("lambda_lo"));
    mc.lambda_search.hi = to_d("lambda_hi", need("lambda_hi"));
    mc.lambda_search.grid_points = static_cast<int>(to_d("lambda_points", need("lambda_points")));
    return mc;
}

int run_mc(const std::string& config_path, const std::string& out_path) {
    McRunConfig mc;
    try {
        mc = parse_mc_config(config_path);
        mc.validate();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsageError;
    }
    try {
        const McReport r = crb_experiment(mc);
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::fprintf(stderr, "error: cannot open %s for writing\n", out_path.c_str());
            return kExitComputeError;
        }
        f << "lambda_hat_mean,lambda_hat_var,crb,efficiency,accepted_fraction\n";
        f << fmt17(r.lambda_hat_mean) << ',' << fmt17(r.lambda_hat_var) << ',' << fmt17(r.crb)
          << ',' << fmt17(r.efficiency) << ',' << fmt17(r.accepted_fraction) << '\n';
        MetaWriter m;
        m.add("config", config_path);
        m.add("alpha_mag", mc.base.alpha_mag);
        m.add("alpha_phase", mc.base.alpha_phase);
        m.add("lambda", mc.base.lambda);
        m.add("theta_i", mc.base.theta_i);
        m.add("phi_i", mc.base.phi_i);
        m.add("theta_f", mc.base.theta_f);
        m.add("phi_f", mc.base.phi_f);
        m.add("seed", static_cast<double>(mc.seed));
        m.add("n_trials", static_cast<double>(mc.n_trials));
        m.add("n_runs", static_cast<double>(mc.n_runs));
        m.add("lambda_lo", mc.lambda_search.lo);
        m.add("lambda_hi", mc.lambda_search.hi);
        m.add("lambda_points", static_cast<double>(mc.lambda_search.grid_points));
        m.add("tool", kToolVersion);
        m.write(out_path + ".meta");
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitComputeError;
    }
}

}  // namespace spacs::cli
