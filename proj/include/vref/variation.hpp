#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vref/analysis.hpp"
#include "vref/circuit.hpp"

namespace vref {

struct CornerSpec {
    std::string name = "TT";
    double dvth_thin = 0.0;        // V
    double dvth_thick = 0.0;       // V
    double mu_scale_thin = 1.0;
    double mu_scale_thick = 1.0;
};

/// Shift every device's vth0 by its class delta and scale mu_cox. Pure.
CircuitConfig apply_corner(const CircuitConfig& cfg, const CornerSpec& corner);

struct McConfig {
    std::uint64_t seed = 1;
    int runs = 1000;
    double sigma_vth_global = 0.0;  // V, per-class global shift
    double a_vt = 0.0;              // V*m, Pelgrom: sigma = a_vt/sqrt(W*L*mult)
    double sigma_mu_rel = 0.0;      // relative per-class mu_cox spread
    double temp_step_c = 5.0;       // TC sweep resolution inside each run
    double vdd_step_v = 0.1;        // LS sweep resolution inside each run
    int threads = 1;
};

struct McStat {
    double mean = 0.0;
    double stddev = 0.0;
};

struct Histogram {
    std::vector<double> edges;  // bins+1 entries
    std::vector<int> counts;
};

struct McSample {
    int run = 0;
    bool ok = false;
    double vref = 0.0;   // V at (vdd, 25 degC)
    double tc = 0.0;     // ppm/degC
    double ls = 0.0;     // ppm/V
    double power = 0.0;  // W at (vdd, 25 degC)
};

struct McReport {
    std::uint64_t seed = 0;
    std::string rng_name;
    int runs = 0;
    int failed = 0;
    McStat vref, tc, ls, power;
    Histogram hist_vref, hist_tc, hist_ls, hist_power;
    std::vector<McSample> samples;
};

/// Per-run parameter draws, in a fixed documented order:
/// global thin/thick vth shifts, thin/thick mu scales, then per-device
/// mismatch for m1, m2, m3, m4, m11, m12, m13, m14, m15. Runs are keyed by
/// (seed, run index), so any execution order or thread count reproduces the
/// same report bit for bit.
CircuitConfig draw_variation(const CircuitConfig& cfg, const McConfig& mc, int run);

McReport monte_carlo(const CircuitConfig& cfg, const McConfig& mc, double vdd, double t_lo_c,
                     double t_hi_c);
/// Restricted run range [run_begin, run_end); stats cover only that slice.
McReport monte_carlo_range(const CircuitConfig& cfg, const McConfig& mc, double vdd,
                           double t_lo_c, double t_hi_c, int run_begin, int run_end);

struct TrimResult {
    int best_code = 0;
    int nominal_code = 0;
    std::vector<double> tc_by_code;  // ppm/degC, indexed by code
};

/// Exhaustive 3-bit trim evaluation. Ties break toward the nominal code.
/// Throws ConfigError when the configuration carries no trim network.
TrimResult trim_search(const CircuitConfig& cfg, int nominal_code, double vdd, double t_lo_c,
                       double t_hi_c, double step_c);

}  // namespace vref
