#include "vref/analytic.hpp"

#include <cmath>

#include "vref/errors.hpp"

namespace vref {

// C_ox ratios are computed as mu_cox ratios throughout this module: the
// electron mobility is shared between oxide classes and cancels, and C_ox is
// never stored on its own.

namespace {

double vth_at(const TransistorParams& d, double temperature, double t0) {
    // Closed forms exclude the DIBL shift (vds = 0).
    return d.vth0 + d.alpha * (temperature - t0);
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b)); }

}  // namespace

double ptat_voltage(const TransistorParams& m1, const TransistorParams& m2,
                    double temperature, double t0) {
    const double vt = thermal_voltage(temperature);
    const double n_l = m1.cls.n;
    return vth_at(m1, temperature, t0) - vth_at(m2, temperature, t0) +
           n_l * vt * std::log(aspect(m2) / aspect(m1));
}

double vref_stage2_given_vg4(const Stage2Config& s2, double vg4, double temperature,
                             double t0) {
    const double vt = thermal_voltage(temperature);
    const double n_h = s2.m3.cls.n;
    const double n_l = s2.m4.cls.n;
    const double vth3 = vth_at(s2.m3, temperature, t0);
    const double vth4 = vth_at(s2.m4, temperature, t0);
    const double ratio = (s2.m4.cls.mu_cox * aspect(s2.m4)) / (s2.m3.cls.mu_cox * aspect(s2.m3));
    return (n_l * vth3 + n_h * (vg4 - vth4) + n_h * n_l * vt * std::log(ratio)) / (n_h + n_l);
}

double vref_matched_pair(const Stage2Config& s2, double vg4, double temperature, double t0) {
    if (!near(aspect(s2.m3), aspect(s2.m4)))
        throw AssumptionError("vref_matched_pair: requires (W/L)3 = (W/L)4");
    if (!near(s2.m3.cls.n, s2.m4.cls.n))
        throw AssumptionError("vref_matched_pair: requires n_H = n_L");
    const double vt = thermal_voltage(temperature);
    const double n = s2.m4.cls.n;
    const double vth3 = vth_at(s2.m3, temperature, t0);
    const double vth4 = vth_at(s2.m4, temperature, t0);
    return (vth3 - vth4 + vg4 + n * vt * std::log(s2.m4.cls.mu_cox / s2.m3.cls.mu_cox)) / 2.0;
}

double vref_closed_form(const Stage2Config& s2, double temperature, double t0) {
    return vref_stage2_given_vg4(s2, ptat_voltage(s2.m1, s2.m2, temperature, t0),
                                 temperature, t0);
}

double vref_closed_form_dt(const Stage2Config& s2) {
    const double n_h = s2.m3.cls.n;
    const double n_l = s2.m4.cls.n;
    const double k = aspect(s2.m4) * aspect(s2.m2) / (aspect(s2.m3) * aspect(s2.m1));
    const double mu_ratio = s2.m4.cls.mu_cox / s2.m3.cls.mu_cox;
    const double a1 = s2.m1.alpha, a2 = s2.m2.alpha, a3 = s2.m3.alpha, a4 = s2.m4.alpha;
    return (n_l * a3 + n_h * (a1 - a2 - a4) +
            n_h * n_l * (k_boltzmann / q_electron) * std::log(k * mu_ratio)) /
           (n_h + n_l);
}

double optimal_k(const Stage2Config& s2) {
    const double n_h = s2.m3.cls.n;
    const double n_l = s2.m4.cls.n;
    const double a1 = s2.m1.alpha, a2 = s2.m2.alpha, a3 = s2.m3.alpha, a4 = s2.m4.alpha;
    return (s2.m3.cls.mu_cox / s2.m4.cls.mu_cox) *
           std::exp((q_electron / k_boltzmann) * (n_h * (-a1 + a2 + a4) - n_l * a3) /
                    (n_h * n_l));
}

double vref_compensated(const DesignConstants& c, const TransistorParams& m3,
                        double n_h, double n_l, double t0) {
    const double vth3_t0 = m3.vth0;
    return (n_l * (vth3_t0 - m3.alpha * t0) + n_h * (c.delta_vth1 + c.delta_alpha * t0)) /
           (n_h + n_l);
}

double vref_compensated(const Stage2Config& s2, double t0) {
    DesignConstants c;
    c.delta_vth1 = s2.m1.vth0 - s2.m2.vth0 - s2.m4.vth0;
    c.delta_alpha = s2.m2.alpha + s2.m4.alpha - s2.m1.alpha;
    return vref_compensated(c, s2.m3, s2.m3.cls.n, s2.m4.cls.n, t0);
}

namespace {

double kr1_of(const Stage1Config& s1) {
    return (s1.m12.cls.mu_cox * aspect(s1.m12)) / (s1.m11.cls.mu_cox * aspect(s1.m11));
}

}  // namespace

double vx_closed_form(const Stage1Config& s1, double v_o, double temperature, double t0) {
    const double vt = thermal_voltage(temperature);
    const double n_h = s1.m11.cls.n;
    const double n_l = s1.m12.cls.n;
    return (n_l * vth_at(s1.m11, temperature, t0) - n_h * vth_at(s1.m12, temperature, t0) +
            n_h * n_l * vt * std::log(kr1_of(s1)) + n_h * v_o) /
           (n_h + n_l);
}

double id13_closed_form(const Stage1Config& s1, double v_o, double temperature, double t0) {
    const double vt = thermal_voltage(temperature);
    const double n_h = s1.m11.cls.n;
    const double n_l = s1.m12.cls.n;
    const double dvth2 = n_l * vth_at(s1.m11, temperature, t0) -
                         n_h * vth_at(s1.m12, temperature, t0) -
                         (n_h + n_l) * vth_at(s1.m13, temperature, t0);
    return s1.m13.cls.mu_cox * aspect(s1.m13) * vt * vt *
           std::exp((dvth2 + n_h * n_l * vt * std::log(kr1_of(s1)) + n_h * v_o) /
                    (n_h * (n_h + n_l) * vt));
}

double id15_closed_form(const Stage1Config& s1, double temperature, double t0) {
    const double vt = thermal_voltage(temperature);
    const double n_l = s1.m15.cls.n;
    return s1.m15.cls.mu_cox * aspect(s1.m15) * vt * vt *
           std::exp(-vth_at(s1.m15, temperature, t0) / (n_l * vt));
}

LinFit fit_log_complement(double x_lo, double x_hi, int samples) {
    if (!(x_lo > 0.0 && x_hi > x_lo))
        throw DomainError("fit_log_complement: requires 0 < x_lo < x_hi");
    if (!(x_hi < 1.0))
        throw DomainError("fit_log_complement: x_hi must be < 1 (log singularity)");
    if (samples < 2) throw DomainError("fit_log_complement: needs at least 2 samples");

    const double step = (x_hi - x_lo) / (samples - 1);
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = x_lo + i * step;
        sx += x;
        sy += std::log1p(-x);
    }
    const double mx = sx / samples, my = sy / samples;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = x_lo + i * step;
        const double dx = x - mx;
        const double dy = std::log1p(-x) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LinFit fit;
    fit.c1 = sxy / sxx;
    fit.c2 = my - fit.c1 * mx;
    double ss_res = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = x_lo + i * step;
        const double r = std::log1p(-x) - (fit.c1 * x + fit.c2);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.x_lo = x_lo;
    fit.x_hi = x_hi;
    return fit;
}

double vo_linearized(const Stage1Config& s1, const LinFit& fit, double temperature, double t0) {
    const DesignConstants c = derive_constants(s1, Stage2Config{}, fit, temperature, t0);
    const double vt = thermal_voltage(temperature);
    const double n_h = s1.m11.cls.n;
    const double n_l = s1.m12.cls.n;
    const double den = 1.0 - c.c3 * n_h * n_l;
    if (std::fabs(den) <= 1e-9)
        throw NumericalError("vo_linearized: singular denominator 1 - c3*n_H*n_L");
    return (c.delta_vth4 + n_h * vt * (c.c3 * n_l * n_l * std::log(c.k_r1) + fit.c2)) / den;
}

double compensated_lambda_m12(double lambda_d15, double n_r, double c1) {
    if (c1 == 0.0) throw NumericalError("compensated_lambda_m12: c1 must be nonzero");
    return (c1 - 1.0) / c1 * (1.0 + n_r) * lambda_d15;
}

double stage2_supply_sensitivity(double n_h, double n_l, double lambda2, double lambda4) {
    return n_h / (n_h + n_l) * (lambda2 + lambda4);
}

double stage2_ls_percent(const Stage2Config& s2, double vref) {
    if (vref == 0.0) throw NumericalError("stage2_ls_percent: vref must be nonzero");
    return stage2_supply_sensitivity(s2.m3.cls.n, s2.m4.cls.n, s2.m2.lambda_d,
                                     s2.m4.lambda_d) /
           vref * 100.0;
}

double total_ls_ppm(double dvo_dvdd, double ls2_percent_per_v) {
    return dvo_dvdd * (ls2_percent_per_v / 100.0) * 1e6;
}

DesignConstants derive_constants(const Stage1Config& s1, const Stage2Config& s2,
                                 const LinFit& fit, double temperature, double t0) {
    DesignConstants c;
    const double n_h = s1.m11.cls.n > 1.0 ? s1.m11.cls.n : s2.m3.cls.n;
    const double n_l = s1.m12.cls.n > 1.0 ? s1.m12.cls.n : s2.m4.cls.n;

    if (aspect(s2.m1) > 0.0 && aspect(s2.m3) > 0.0) {
        c.k = aspect(s2.m4) * aspect(s2.m2) / (aspect(s2.m3) * aspect(s2.m1));
        c.delta_vth1 = s2.m1.vth0 - s2.m2.vth0 - s2.m4.vth0;
        c.delta_alpha = s2.m2.alpha + s2.m4.alpha - s2.m1.alpha;
    }

    c.n_r = n_h / n_l;
    c.c3 = fit.c1 / (n_l * (n_l + n_h));
    c.c4 = fit.c1 != 0.0 ? (fit.c1 - 1.0) / fit.c1 : 0.0;

    if (aspect(s1.m11) > 0.0) {
        c.k_r1 = kr1_of(s1);
        c.k_r2 = (s1.m15.cls.mu_cox * aspect(s1.m15)) / (s1.m14.cls.mu_cox * aspect(s1.m14));
        c.k_r3 = (s1.m13.cls.mu_cox * aspect(s1.m13)) / (s1.m15.cls.mu_cox * aspect(s1.m15));
        const double vth11 = vth_at(s1.m11, temperature, t0);
        const double vth12 = vth_at(s1.m12, temperature, t0);
        const double vth13 = vth_at(s1.m13, temperature, t0);
        const double vth14 = vth_at(s1.m14, temperature, t0);
        const double vth15 = vth_at(s1.m15, temperature, t0);
        c.delta_vth2 = n_l * vth11 - n_h * vth12 - (n_h + n_l) * vth13;
        c.delta_vth3 = n_l * n_l * vth11 - n_h * n_l * vth12 - n_l * (n_h + n_l) * vth13 +
                       n_h * (n_h + n_l) * vth15;
        c.delta_vth4 = vth14 - c.n_r * vth15 + c.c3 * c.delta_vth3;
    }
    return c;
}

}  // namespace vref
