#pragma once

#include "vref/topology.hpp"

namespace vref {

/// Least-squares linearization ln(1-X) ~ c1*X + c2 over an X sub-range.
struct LinFit {
    double c1 = 0.0;
    double c2 = 0.0;
    double r2 = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

/// Constants derived from the two stage configurations and a LinFit.
/// delta_vth1/delta_alpha are evaluated at T0; the remaining deltas at the
/// requested temperature. Threshold values exclude the DIBL shift.
struct DesignConstants {
    double k = 0.0;     // aspect product (W/L)4(W/L)2 / ((W/L)3(W/L)1)
    double k_r1 = 0.0;  // CoxL(W/L)12 / (CoxH(W/L)11), Cox ratio via mu_cox
    double k_r2 = 0.0;  // CoxL(W/L)15 / (CoxH(W/L)14)
    double k_r3 = 0.0;  // CoxH(W/L)13 / (CoxL(W/L)15)
    double n_r = 0.0;   // n_H/n_L
    double c3 = 0.0;    // c1/(n_L(n_L+n_H))
    double c4 = 0.0;    // (c1-1)/c1
    double delta_vth1 = 0.0;   // V_TH1 - V_TH2 - V_TH4 at T0
    double delta_vth2 = 0.0;   // n_L V_TH11 - n_H V_TH12 - (n_H+n_L) V_TH13
    double delta_vth3 = 0.0;   // n_L^2 V_TH11 - n_H n_L V_TH12 - n_L(n_H+n_L) V_TH13 + n_H(n_H+n_L) V_TH15
    double delta_vth4 = 0.0;   // V_TH14 - N_R V_TH15 + c3 * delta_vth3
    double delta_alpha = 0.0;  // alpha2 + alpha4 - alpha1
};

/// PTAT output of the M1/M2 pair: V_TH1 - V_TH2 + n_L*VT*ln(aspect2/aspect1).
double ptat_voltage(const TransistorParams& m1, const TransistorParams& m2,
                    double temperature, double t0 = default_t0);

/// Stage-2 output for a given M4 gate voltage, without assuming matched
/// sizes or equal slope factors. Used as the numeric solver's seed.
double vref_stage2_given_vg4(const Stage2Config& s2, double vg4, double temperature,
                             double t0 = default_t0);

/// Simplified stage-2 output assuming (W/L)3 = (W/L)4 and n_H = n_L:
/// (V_TH3 - V_TH4 + vg4 + n*VT*ln(CoxL/CoxH)) / 2.
/// Throws AssumptionError when the preconditions do not hold.
double vref_matched_pair(const Stage2Config& s2, double vg4, double temperature,
                         double t0 = default_t0);

/// Full stage-2 closed form with the PTAT pair folded in.
double vref_closed_form(const Stage2Config& s2, double temperature, double t0 = default_t0);

/// Analytic temperature derivative of vref_closed_form, V/K.
double vref_closed_form_dt(const Stage2Config& s2);

/// Aspect product that nulls the temperature derivative:
/// (CoxH/CoxL) * exp((q/kB) * (n_H(-a1+a2+a4) - n_L*a3) / (n_H n_L)).
double optimal_k(const Stage2Config& s2);

/// Temperature-free compensated output, valid when k equals optimal_k:
/// (n_L(V_TH3(T0) - a3*T0) + n_H(dVTH1 + dAlpha*T0)) / (n_H + n_L).
double vref_compensated(const DesignConstants& c, const TransistorParams& m3,
                        double n_h, double n_l, double t0 = default_t0);
double vref_compensated(const Stage2Config& s2, double t0 = default_t0);

/// Stage-1 V_X for a given V_O, ideal model.
double vx_closed_form(const Stage1Config& s1, double v_o, double temperature,
                      double t0 = default_t0);

/// Stage-1 M13 current with V_X eliminated, ideal model.
double id13_closed_form(const Stage1Config& s1, double v_o, double temperature,
                        double t0 = default_t0);

/// Stage-1 M15 current (vgs = 0), ideal model.
double id15_closed_form(const Stage1Config& s1, double temperature, double t0 = default_t0);

/// OLS fit of ln(1-X) against X over a uniform grid of `samples` points.
/// Requires 0 < x_lo < x_hi < 1 and samples >= 2.
LinFit fit_log_complement(double x_lo, double x_hi, int samples);

/// Published linearization coefficients, reported next to the refit.
inline constexpr double reported_fit_c1 = -3.64;
inline constexpr double reported_fit_c2 = 0.98;
inline constexpr double reported_fit_r2 = 0.98;

/// Linearized stage-1 output voltage,
/// (dVTH4 + n_H VT (c3 n_L^2 ln k_r1 + c2)) / (1 - c3 n_H n_L).
/// Reported as a design diagnostic; the numeric solver is authoritative.
double vo_linearized(const Stage1Config& s1, const LinFit& fit, double temperature,
                     double t0 = default_t0);

/// M12 DIBL factor that cancels the M15 DIBL path: c4*(1 + n_r)*lambda_d15
/// with c4 = (c1-1)/c1. Throws NumericalError when c1 == 0.
double compensated_lambda_m12(double lambda_d15, double n_r, double c1);

/// Stage-2 sensitivity d v_ref / d v_o = n_H (lambda2 + lambda4) / (n_H + n_L).
double stage2_supply_sensitivity(double n_h, double n_l, double lambda2, double lambda4);

/// Stage-2 line sensitivity in percent per volt (fractional form times 100).
/// Throws NumericalError when vref == 0.
double stage2_ls_percent(const Stage2Config& s2, double vref);

/// Two-stage line sensitivity in ppm/V: the stage-1 fractional sensitivity
/// dV_O/dV_DD (V/V) times the stage-2 fractional sensitivity (percent/V
/// divided by 100), scaled to ppm.
double total_ls_ppm(double dvo_dvdd, double ls2_percent_per_v);

DesignConstants derive_constants(const Stage1Config& s1, const Stage2Config& s2,
                                 const LinFit& fit, double temperature,
                                 double t0 = default_t0);

}  // namespace vref
