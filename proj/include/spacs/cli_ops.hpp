#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "spacs/estimation.hpp"

namespace spacs::cli {

inline constexpr const char* kToolVersion = "spacs 1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputeError = 1;
inline constexpr int kExitUsageError = 2;

/// One swept variable of a figure command.
struct SweepSpec {
    enum class Variable { ThetaF, AlphaMag, Lambda };
    Variable variable;
    double lo;
    double hi;
    int points;  // >= 2

    double at(int i) const { return lo + (hi - lo) * i / (points - 1); }
};

/// figure <id> --out <path>: writes the sweep CSV plus a <path>.meta sidecar
/// (key=value, full parameter set, no timestamps; repeated runs are
/// byte-identical). Known ids: fig1a fig1b fig1c fig1d fig2 fig3 fig4.
/// points = 0 keeps the default density per figure.
int run_figure(const std::string& id, const std::string& out_path, int points = 0);

/// crosscheck --seed S --points N --out <path>: closed forms vs numeric
/// oracles over N seeded random configs (|alpha| <= 4, lambda <= 1, angles
/// uniform; configs with p_f < 1e-6 are resampled). Writes per-quantity rows
/// (name, closed_form_value, numeric_value, abs_dev, rel_dev at the worst
/// config) and a <path>.summary. Exit 0 iff the hard set (p_f, h, fidelity,
/// P(n), P(x)) stays within 1e-8 relative (1e-10 absolute below 1e-8);
/// soft-set deviations are reported but never gate.
int run_crosscheck(std::uint64_t seed, int n_points, const std::string& out_path);

/// mc --config <path> --out <path>: runs the CRB experiment described by a
/// flat key=value config file and writes the report CSV. Exit 2 on
/// missing/invalid config, 1 on runtime failure.
int run_mc(const std::string& config_path, const std::string& out_path);

/// Parse the flat key=value MC config format. Throws std::runtime_error with
/// a message naming the path/key on any problem.
McRunConfig parse_mc_config(const std::string& path);

/// 17-significant-digit formatting; round-trip exact for doubles.
std::string fmt17(double v);

}  // namespace spacs::cli
