#include "vref/smallsignal.hpp"

#include <cmath>
#include <numbers>

#include "vref/errors.hpp"

namespace vref {

namespace {

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

double gate_cap(const TransistorParams& t, const CapSpec& spec) {
    const double per_area =
        t.cls.oxide_class == OxideClass::thin ? spec.c_gate_thin : spec.c_gate_thick;
    return per_area * t.w * t.l * t.mult;
}

// Conductances of the reduced two-node network.
struct NetworkG {
    double g_ref;    // total conductance at v_ref
    double g_fwd;    // v_o -> v_ref coupling (M4 channel + PTAT re-bias path)
    double g_o;      // total conductance at v_o
    double g_vdd_o;  // conductive vdd -> v_o coupling (M15 DIBL vs the v_x path)
};

NetworkG reduce_network(const AcParams& ac) {
    NetworkG n{};
    // V_PTAT node is resistive only; eliminate it exactly.
    const double den_p = ac.m1.gm + ac.m1.gds + ac.m2.gds;
    const double k_ptat = den_p > 0.0 ? ac.m2.gds / den_p : 0.0;
    n.g_ref = ac.m3.gm + ac.m3.gds + ac.m4.gm + ac.m4.gds;
    n.g_fwd = ac.m4.gds + ac.m4.gm * k_ptat;
    // V_X node likewise.
    const double den_x = ac.m11.gm + ac.m11.gds + ac.m12.gm + ac.m12.gds;
    const double t_x = den_x > 0.0 ? ac.m12.gm / den_x : 0.0;
    const double u_x = den_x > 0.0 ? ac.m12.gds / den_x : 0.0;
    n.g_o = ac.m14.gm + ac.m14.gds + ac.m13.gds + ac.m13.gm * t_x + ac.m15.gds;
    n.g_vdd_o = ac.m15.gds - ac.m13.gm * u_x;
    return n;
}

std::vector<std::complex<double>> quadratic_roots(double a0, double a1, double a2) {
    // roots of a2 s^2 + a1 s + a0
    using cd = std::complex<double>;
    std::vector<cd> out;
    if (a2 == 0.0) {
        if (a1 != 0.0) out.push_back(cd(-a0 / a1, 0.0));
        return out;
    }
    const cd disc = std::sqrt(cd(a1 * a1 - 4.0 * a2 * a0, 0.0));
    // Citardauq form keeps the small root accurate.
    const cd q = -0.5 * (a1 >= 0.0 ? (a1 + disc) : (a1 - disc));
    out.push_back(q / a2);
    out.push_back(std::abs(q) > 0.0 ? a0 / q : cd(0.0, 0.0));
    return out;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::complex<double> poly_eval(const std::vector<double>& c, std::complex<double> s) {
    std::complex<double> acc(0.0, 0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

bool all_zero(const std::vector<double>& c) {
    for (double v : c)
        if (v != 0.0) return false;
    return true;
}

void finish_tf(RationalTf& tf) {
    tf.trivial_zero = all_zero(tf.num);
    tf.zeros = tf.trivial_zero ? std::vector<std::complex<double>>{}
                               : quadratic_roots(tf.num.size() > 0 ? tf.num[0] : 0.0,
                                                 tf.num.size() > 1 ? tf.num[1] : 0.0,
                                                 tf.num.size() > 2 ? tf.num[2] : 0.0);
    tf.poles = quadratic_roots(tf.den.size() > 0 ? tf.den[0] : 0.0,
                               tf.den.size() > 1 ? tf.den[1] : 0.0,
                               tf.den.size() > 2 ? tf.den[2] : 0.0);
    tf.dc_gain = tf.den[0] != 0.0 ? tf.num[0] / tf.den[0] : 0.0;
}

}  // namespace

double AcParams::r_o2() const { return m2.gds > 0.0 ? 1.0 / m2.gds : 0.0; }
double AcParams::r_o4() const { return m4.gds > 0.0 ? 1.0 / m4.gds : 0.0; }

AcParams extract_ac(const CircuitConfig& cfg, const OperatingPoint& op, const CapSpec& caps) {
    const bool estimable = caps.c_gate_thin > 0.0 && caps.c_gate_thick > 0.0;
    const bool all_overridden = caps.c1 && caps.c2 && caps.c3 && caps.c4;
    if (!estimable && !all_overridden)
        throw ConfigError("extract_ac: no gate capacitance densities and no full c1..c4 override");

    const ModelOptions opts = cfg.model_options();
    const Stage2Config s2 = cfg.effective_stage2();
    const Stage1Config& s1 = cfg.stage1;
    const double t = op.temperature;
    const double supply2 = op.v_o;  // stage-2 rail

    AcParams ac;
    ac.m1 = small_signal(s2.m1, {op.v_ptat, clamp0(op.v_ptat), t}, opts);
    ac.m2 = small_signal(s2.m2, {0.0, clamp0(supply2 - op.v_ptat), t}, opts);
    ac.m3 = small_signal(s2.m3, {op.v_ref, clamp0(op.v_ref), t}, opts);
    ac.m4 = small_signal(s2.m4, {op.v_ptat - op.v_ref, clamp0(supply2 - op.v_ref), t}, opts);
    if (!op.stage1_bypassed) {
        ac.m11 = small_signal(s1.m11, {op.v_x, clamp0(op.v_x), t}, opts);
        ac.m12 = small_signal(s1.m12, {op.v_o - op.v_x, clamp0(op.vdd - op.v_x), t}, opts);
        ac.m13 = small_signal(s1.m13, {op.v_x, clamp0(op.v_o), t}, opts);
        ac.m14 = small_signal(s1.m14, {op.v_o, clamp0(op.v_o), t}, opts);
        ac.m15 = small_signal(s1.m15, {0.0, clamp0(op.vdd - op.v_o), t}, opts);
    }

    if (estimable) {
        // Node assignment: each gate cap splits half to source, half to
        // drain; halves landing on eliminated or constant nodes count as
        // ground. M3 diode: gate-source half on v_ref. M4: gate at v_ptat,
        // source v_ref, drain v_o. M14 diode and M13/M12 halves on v_o;
        // M15 and M12 drain halves couple v_o to vdd.
        ac.c1 = 0.5 * gate_cap(s2.m3, caps) + 0.5 * gate_cap(s2.m4, caps);
        ac.c3 = 0.5 * gate_cap(s2.m4, caps) + 0.5 * gate_cap(s1.m14, caps) +
                0.5 * gate_cap(s1.m13, caps) + 0.5 * gate_cap(s1.m12, caps);
        ac.c4 = 0.5 * gate_cap(s1.m15, caps) + 0.5 * gate_cap(s1.m12, caps);
        ac.c2 = caps.c2_fraction * ac.c1;
    }
    if (caps.c1) ac.c1 = *caps.c1;
    if (caps.c2) ac.c2 = *caps.c2;
    if (caps.c3) ac.c3 = *caps.c3;
    if (caps.c4) ac.c4 = *caps.c4;
    if (ac.c1 < 0.0 || ac.c2 < 0.0 || ac.c3 < 0.0 || ac.c4 < 0.0)
        throw ConfigError("extract_ac: capacitances must be >= 0");
    return ac;
}

RationalTf psrr_reported_form(const AcParams& ac) {
    const double ro4 = ac.r_o4();
    const double gm14 = ac.m14.gm;
    RationalTf tf;
    // (2 ro4 c2 s + 1) c4 s  /  [(2 ro4 c2 s + 2 ro4 + 1)(gm14 + (c3+c4) s)]
    tf.num = {0.0, ac.c4, 2.0 * ro4 * ac.c2 * ac.c4};
    tf.den = poly_mul({2.0 * ro4 + 1.0, 2.0 * ro4 * ac.c2}, {gm14, ac.c3 + ac.c4});
    finish_tf(tf);
    tf.dimensional_warning = true;  // "2 ro4 + 1" adds ohms to a pure number
    return tf;
}

RationalTf psrr_network_tf(const AcParams& ac, bool include_stage1) {
    const NetworkG n = reduce_network(ac);
    RationalTf tf;
    if (include_stage1) {
        // v_o   = (g_vdd_o + c4 s) / (g_o + (c3+c4) s)   * v_dd
        // v_ref = (c2 s + g_fwd v_o) / (g_ref + (c1+c2) s)
        const std::vector<double> vo_num = {n.g_vdd_o, ac.c4};
        const std::vector<double> vo_den = {n.g_o, ac.c3 + ac.c4};
        std::vector<double> num = poly_mul({0.0, ac.c2}, vo_den);
        const std::vector<double> fwd = {n.g_fwd * vo_num[0], n.g_fwd * vo_num[1]};
        num[0] += fwd[0];
        num[1] += fwd[1];
        tf.num = num;
        tf.den = poly_mul({n.g_ref, ac.c1 + ac.c2}, vo_den);
    } else {
        tf.num = {n.g_fwd, ac.c2};
        tf.den = {n.g_ref, ac.c1 + ac.c2};
    }
    finish_tf(tf);
    return tf;
}

std::vector<double> psrr_numeric(const AcParams& ac, const std::vector<double>& freq_hz,
                                 bool include_stage1) {
    const NetworkG n = reduce_network(ac);
    std::vector<double> out;
    out.reserve(freq_hz.size());
    using cd = std::complex<double>;
    for (double f : freq_hz) {
        const cd s(0.0, 2.0 * std::numbers::pi * f);
        cd v_ref;
        if (include_stage1) {
            const cd a22 = n.g_o + (ac.c3 + ac.c4) * s;
            const cd a11 = n.g_ref + (ac.c1 + ac.c2) * s;
            if (std::abs(a22) == 0.0 || std::abs(a11) == 0.0)
                throw NumericalError("psrr_numeric: singular nodal matrix at " +
                                     std::to_string(f) + " Hz");
            const cd v_o = (n.g_vdd_o + ac.c4 * s) / a22;
            v_ref = (ac.c2 * s + n.g_fwd * v_o) / a11;
        } else {
            const cd a11 = n.g_ref + (ac.c1 + ac.c2) * s;
            if (std::abs(a11) == 0.0)
                throw NumericalError("psrr_numeric: singular nodal matrix at " +
                                     std::to_string(f) + " Hz");
            v_ref = (ac.c2 * s + n.g_fwd) / a11;
        }
        out.push_back(20.0 * std::log10(std::abs(v_ref)));
    }
    return out;
}

std::vector<double> psrr_frequency_grid(double f_min, double f_max, int points_per_decade) {
    if (!(f_min > 0.0 && f_max > f_min && points_per_decade >= 1))
        throw DomainError("psrr_frequency_grid: invalid grid specification");
    std::vector<double> grid;
    const double lg_min = std::log10(f_min);
    const double lg_max = std::log10(f_max);
    const int total = static_cast<int>(std::ceil((lg_max - lg_min) * points_per_decade));
    for (int i = 0; i <= total; ++i)
        grid.push_back(std::pow(10.0, lg_min + static_cast<double>(i) / points_per_decade));
    if (grid.back() > f_max) grid.back() = f_max;
    return grid;
}

std::complex<double> RationalTf::eval(std::complex<double> s) const {
    const std::complex<double> d = poly_eval(den, s);
    if (std::abs(d) == 0.0) throw NumericalError("RationalTf: denominator zero");
    return poly_eval(num, s) / d;
}

double RationalTf::magnitude_db(double freq_hz) const {
    return 20.0 * std::log10(std::abs(eval({0.0, 2.0 * std::numbers::pi * freq_hz})));
}

double RationalTf::root_check_residual() const {
    double worst = 0.0;
    const double num_scale = std::fabs(num.empty() ? 0.0 : num.back());
    const double den_scale = std::fabs(den.empty() ? 0.0 : den.back());
    for (const auto& z : zeros) {
        const double mag = std::abs(poly_eval(num, z));
        const double scale = num_scale * std::max(1.0, std::norm(z));
        if (scale > 0.0) worst = std::max(worst, mag / scale);
    }
    for (const auto& p : poles) {
        const double mag = std::abs(poly_eval(den, p));
        const double scale = den_scale * std::max(1.0, std::norm(p));
        if (scale > 0.0) worst = std::max(worst, mag / scale);
    }
    return worst;
}

TfDeviation compare_tf(const RationalTf& tf, const std::vector<double>& freq_hz,
                       const std::vector<double>& mag_db) {
    if (freq_hz.empty() || freq_hz.size() != mag_db.size())
        throw DomainError("compare_tf: empty or mismatched frequency grid");
    TfDeviation dev;
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        const double d = std::fabs(tf.magnitude_db(freq_hz[i]) - mag_db[i]);
        if (d >= dev.max_db) {
            dev.max_db = d;
            dev.freq_hz = freq_hz[i];
        }
    }
    return dev;
}

}  // namespace vref
