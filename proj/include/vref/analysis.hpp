#pragma once

#include <string>
#include <vector>

#include "vref/circuit.hpp"

namespace vref {

enum class SweepAxis { temperature, vdd, k_ratio };

struct SweepResult {
    SweepAxis axis = SweepAxis::temperature;
    std::vector<double> grid;  // degC, V, or dimensionless K
    std::vector<double> vref, v_o, v_ptat, power;
    std::vector<std::string> warnings;
    std::string config_digest;
};

struct Metrics {
    double tc = 0.0;         // ppm/degC
    double ls = 0.0;         // ppm/V
    double p_min = 0.0;      // W
    double p_max = 0.0;      // W
    double vref_mean = 0.0;  // V
};

struct BoxValue {
    double value = 0.0;
    bool degenerate = false;  // fewer than 2 points or zero range
};

/// Box estimator (max-min)/(mean*range) scaled to ppm per grid unit.
BoxValue tc_box(const std::vector<double>& series, const std::vector<double>& grid);
BoxValue ls_box(const std::vector<double>& series, const std::vector<double>& grid);

/// Signed endpoint slope (series.back - series.front)/range, for regime studies.
double endpoint_slope(const std::vector<double>& series, const std::vector<double>& grid);

std::vector<double> make_grid(double lo, double hi, double step);

/// One solve_full per grid point. Non-convergence aborts with the failing
/// point identified in the error text.
SweepResult sweep_temperature(const CircuitConfig& cfg, double vdd, double t_lo_c,
                              double t_hi_c, double step_c);
SweepResult sweep_supply(const CircuitConfig& cfg, double t_c, double vdd_lo, double vdd_hi,
                         double step_v);
/// Same sweeps with the LS stage bypassed (stage 2 fed by VDD directly).
SweepResult sweep_temperature_stage2_only(const CircuitConfig& cfg, double vdd, double t_lo_c,
                                          double t_hi_c, double step_c);
SweepResult sweep_supply_stage2_only(const CircuitConfig& cfg, double t_c, double vdd_lo,
                                     double vdd_hi, double step_v);

Metrics metrics_from_temperature_sweep(const SweepResult& s);
Metrics metrics_from_supply_sweep(const SweepResult& s);

/// Rescale the M4 width so the aspect product takes the value k.
CircuitConfig with_k(const CircuitConfig& cfg, double k);
double aspect_product(const CircuitConfig& cfg);

struct KSearchSettings {
    double k_min = 2.0;
    double k_max = 6.0;
    int points = 41;
    double golden_tol_rel = 1e-4;
};

struct KSearchResult {
    SweepResult scan;     // axis = k_ratio, vref column holds TC(k) in ppm/degC
    double k_num = 0.0;   // numeric argmin (golden-section refined)
    double k_theory = 0.0;
    double gap = 0.0;     // |k_num - k_theory| / k_theory
    bool unimodal = true;
    bool boundary = false;  // argmin landed on the scan edge
};

SweepResult tc_vs_k(const CircuitConfig& cfg, const std::vector<double>& k_grid, double vdd,
                    double t_lo_c, double t_hi_c, double step_c);
KSearchResult find_optimal_k(const CircuitConfig& cfg, const KSearchSettings& ks, double vdd,
                             double t_lo_c, double t_hi_c, double step_c);

/// TC per supply point; with_stage1 = false feeds stage 2 from VDD directly.
std::vector<double> tc_vs_vdd(const CircuitConfig& cfg, const std::vector<double>& vdd_grid,
                              bool with_stage1, double t_lo_c, double t_hi_c, double step_c);

struct M15Point {
    double l = 0.0;         // m
    double lambda_d = 0.0;  // V/V, larger for shorter channels
};

struct M15Curve {
    M15Point point;
    std::vector<double> vdd;
    std::vector<double> v_o;
    bool interior_extremum = false;
    double extremum_vdd = 0.0;
};

/// V_O(vdd) family over M15 lengths. with_dibl_comp re-derives the M12 DIBL
/// factor from each length's lambda; otherwise M12 keeps lambda_long.
std::vector<M15Curve> m15_length_study(const CircuitConfig& cfg,
                                       const std::vector<M15Point>& lengths,
                                       bool with_dibl_comp, double fit_c1,
                                       double lambda_long, double vdd_lo, double vdd_hi,
                                       double step_v, double t_c);

struct Stage1TcLeakage {
    double ratio = 0.0;          // leak / TC(vref)
    double leak_per_k = 0.0;     // LS2_frac * TC(v_o)_frac * mean(v_o), 1/K
    double ls2_per_v = 0.0;      // stage-2 fractional sensitivity, 1/V
    double tc_vo_frac = 0.0;     // box TC of the v_o series, 1/K
    double tc_vref_frac = 0.0;   // box TC of the v_ref series, 1/K
    double vo_mean = 0.0;
};

/// How much of the reference TC is inherited from the LS stage's own drift.
Stage1TcLeakage stage1_tc_leakage(const CircuitConfig& cfg, double vdd, double t_lo_c,
                                  double t_hi_c, double step_c);

struct RegimeSlopes {
    std::vector<double> ratios;
    std::vector<double> slope_v_per_k;  // signed endpoint slope of v_ptat
};

/// PTAT/CTAT/IT study: the M1/M2 generator solved standalone at a fixed
/// supply while the aspect ratio (W/L)2/(W/L)1 is swept via the M2 width.
RegimeSlopes ptat_regime_study(const CircuitConfig& cfg, const std::vector<double>& ratios,
                               double supply, double t_lo_c, double t_hi_c, double step_c);

/// Central finite difference of v_ref against vdd with tightened tolerances.
double dc_sensitivity_vref(const CircuitConfig& cfg, double vdd, double t_c, double delta_v);
/// Same for the stage-1 output.
double dc_sensitivity_vo(const CircuitConfig& cfg, double vdd, double t_c, double delta_v);

}  // namespace vref
