#include "vref/circuit.hpp"

#include <algorithm>
#include <cmath>

#include "vref/analytic.hpp"
#include "vref/errors.hpp"

namespace vref {

namespace {

constexpr double current_floor = 1e-300;

// Residual for a node balancing a rising branch against a falling one.
// Newton steps are taken in log-current space where both branches conduct;
// the exponential residuals are nearly affine there.
ResidualEval node_residual(double i_up, double di_up, double i_down, double di_down) {
    ResidualEval e;
    e.f = i_up - i_down;
    e.rel = std::fabs(e.f) / std::max({std::fabs(i_up), std::fabs(i_down), current_floor});
    if (i_up > 0.0 && i_down > 0.0) {
        const double fl = std::log(i_up / i_down);
        const double dfl = di_up / i_up - di_down / i_down;
        e.step = dfl != 0.0 ? -fl / dfl : 0.0;
    } else {
        const double df = di_up - di_down;
        e.step = df != 0.0 ? -e.f / df : 0.0;
    }
    return e;
}

double clamp_vds(double v) { return v > 0.0 ? v : 0.0; }

bool at_boundary(double x, double lo, double hi) {
    return x <= lo + 1e-12 || x >= hi - 1e-12;
}

}  // namespace

Stage2Config CircuitConfig::effective_stage2() const {
    Stage2Config s2 = stage2;
    if (trim) s2.m3.w = trim->effective_width();
    return s2;
}

Stage2Solution solve_stage2(const Stage2Config& s2, double supply, double temperature,
                            const ModelOptions& opts, const SolverSettings& solver) {
    Stage2Solution sol;
    if (supply <= 1e-9) {
        sol.degenerate = true;
        sol.warnings.push_back("stage2: supply at or below zero, stage left unbiased");
        return sol;
    }

    const double vt = thermal_voltage(temperature);
    const double vptat_est = ptat_voltage(s2.m1, s2.m2, temperature, opts.t0);
    if (supply < 4.0 * vt + vptat_est)
        sol.warnings.push_back("stage2: headroom below 4*VT + V_PTAT at supply " +
                               std::to_string(supply));

    const double lo = opts.drain_factor ? 0.0 : -0.3;

    // V_PTAT node: diode M1 against the vgs = 0 source M2.
    auto ptat_residual = [&](double v) {
        const BiasPoint b1{v, clamp_vds(v), temperature};
        const BiasPoint b2{0.0, clamp_vds(supply - v), temperature};
        const double i1 = drain_current(s2.m1, b1, opts);
        const double i2 = drain_current(s2.m2, b2, opts);
        const SmallSignal g1 = small_signal(s2.m1, b1, opts);
        const SmallSignal g2 = small_signal(s2.m2, b2, opts);
        return node_residual(i1, g1.gm + g1.gds, i2, -g2.gds);
    };
    const ScalarRoot ptat = solve_bracketed(ptat_residual, lo, supply,
                                            std::clamp(vptat_est, lo, supply),
                                            solver, "stage2.v_ptat");
    sol.v_ptat = ptat.x;
    if (at_boundary(ptat.x, lo, supply) || sol.v_ptat <= 1e-9) {
        sol.degenerate = true;
        sol.warnings.push_back("stage2: v_ptat non-physical or at bracket boundary "
                               "(degenerate configuration)");
    }

    // V_REF node: diode M3 against M4 gated by V_PTAT.
    auto vref_residual = [&](double v) {
        const BiasPoint b3{v, clamp_vds(v), temperature};
        const BiasPoint b4{sol.v_ptat - v, clamp_vds(supply - v), temperature};
        const double i3 = drain_current(s2.m3, b3, opts);
        const double i4 = drain_current(s2.m4, b4, opts);
        const SmallSignal g3 = small_signal(s2.m3, b3, opts);
        const SmallSignal g4 = small_signal(s2.m4, b4, opts);
        return node_residual(i3, g3.gm + g3.gds, i4, -g4.gm - g4.gds);
    };
    const double vref_seed = vref_stage2_given_vg4(s2, sol.v_ptat, temperature, opts.t0);
    const ScalarRoot vr = solve_bracketed(vref_residual, lo, supply,
                                          std::clamp(vref_seed, lo, supply),
                                          solver, "stage2.v_ref");
    sol.v_ref = vr.x;
    if (at_boundary(vr.x, lo, supply) || sol.v_ref <= 1e-9) {
        sol.degenerate = true;
        sol.warnings.push_back("stage2: v_ref non-physical or at bracket boundary "
                               "(degenerate configuration)");
    }

    sol.i_d1 = drain_current(s2.m1, {sol.v_ptat, clamp_vds(sol.v_ptat), temperature}, opts);
    sol.i_d2 = drain_current(s2.m2, {0.0, clamp_vds(supply - sol.v_ptat), temperature}, opts);
    sol.i_d3 = drain_current(s2.m3, {sol.v_ref, clamp_vds(sol.v_ref), temperature}, opts);
    sol.i_d4 = drain_current(s2.m4, {sol.v_ptat - sol.v_ref, clamp_vds(supply - sol.v_ref),
                                     temperature}, opts);
    sol.residual = std::max(ptat.rel, vr.rel);
    return sol;
}

namespace {

struct InnerVx {
    double v_x;
    double dvx_dvo;  // implicit-function derivative at the solution
    double rel;
};

InnerVx solve_vx(const Stage1Config& s1, double vdd, double v_o, double temperature,
                 const ModelOptions& opts, const SolverSettings& solver) {
    const double lo = opts.drain_factor ? 0.0 : -0.3;
    const double hi = opts.drain_factor ? vdd : std::max(vdd, v_o) + 0.5;
    auto residual = [&](double vx) {
        const BiasPoint b11{vx, clamp_vds(vx), temperature};
        const BiasPoint b12{v_o - vx, clamp_vds(vdd - vx), temperature};
        const double i11 = drain_current(s1.m11, b11, opts);
        const double i12 = drain_current(s1.m12, b12, opts);
        const SmallSignal g11 = small_signal(s1.m11, b11, opts);
        const SmallSignal g12 = small_signal(s1.m12, b12, opts);
        return node_residual(i11, g11.gm + g11.gds, i12, -g12.gm - g12.gds);
    };
    const double seed = std::clamp(vx_closed_form(s1, v_o, temperature, opts.t0), lo, hi);
    const ScalarRoot root = solve_bracketed(residual, lo, hi, seed, solver, "stage1.v_x");

    const BiasPoint b11{root.x, clamp_vds(root.x), temperature};
    const BiasPoint b12{v_o - root.x, clamp_vds(vdd - root.x), temperature};
    const SmallSignal g11 = small_signal(s1.m11, b11, opts);
    const SmallSignal g12 = small_signal(s1.m12, b12, opts);
    const double denom = g11.gm + g11.gds + g12.gm + g12.gds;
    return {root.x, denom > 0.0 ? g12.gm / denom : 0.0, root.rel};
}

}  // namespace

double solve_vx_node(const Stage1Config& s1, double vdd, double v_o, double temperature,
                     const ModelOptions& opts, const SolverSettings& solver) {
    return solve_vx(s1, vdd, v_o, temperature, opts, solver).v_x;
}

Stage1Solution solve_stage1(const Stage1Config& s1, double vdd, double temperature,
                            const ModelOptions& opts, const SolverSettings& solver,
                            const LoadModel* load) {
    Stage1Solution sol;
    double vx_rel = 0.0;

    auto vo_residual = [&](double vo) {
        const InnerVx inner = solve_vx(s1, vdd, vo, temperature, opts, solver);
        vx_rel = std::max(vx_rel, inner.rel);
        const BiasPoint b13{inner.v_x, clamp_vds(vo), temperature};
        const BiasPoint b14{vo, clamp_vds(vo), temperature};
        const BiasPoint b15{0.0, clamp_vds(vdd - vo), temperature};
        const double i13 = drain_current(s1.m13, b13, opts);
        const double i14 = drain_current(s1.m14, b14, opts);
        const double i15 = drain_current(s1.m15, b15, opts);
        const double lcur = load ? load->current(vo) : 0.0;
        const SmallSignal g13 = small_signal(s1.m13, b13, opts);
        const SmallSignal g14 = small_signal(s1.m14, b14, opts);
        const SmallSignal g15 = small_signal(s1.m15, b15, opts);
        const double dsum = g13.gm * inner.dvx_dvo + g13.gds + g14.gm + g14.gds +
                            (load ? load->dcurrent(vo) : 0.0);
        return node_residual(i13 + i14 + lcur, dsum, i15, -g15.gds);
    };

    double hi = vdd;
    if (!opts.drain_factor) {
        // The ideal model has no supply-rail ceiling; widen until the
        // residual changes sign.
        while (hi < 4.0 && vo_residual(hi).f < 0.0) hi += 0.5;
    }
    static const LinFit fit = fit_log_complement(0.57, 0.85, 200);
    double seed = 0.5 * hi;
    try {
        seed = std::clamp(vo_linearized(s1, fit, temperature, opts.t0), 0.05 * hi, 0.95 * hi);
    } catch (const NumericalError&) {
    }
    const ScalarRoot vo = solve_bracketed(vo_residual, 0.0, hi, seed, solver, "stage1.v_o");
    sol.v_o = vo.x;

    const InnerVx inner = solve_vx(s1, vdd, sol.v_o, temperature, opts, solver);
    sol.v_x = inner.v_x;
    sol.i_d11 = drain_current(s1.m11, {sol.v_x, clamp_vds(sol.v_x), temperature}, opts);
    sol.i_d12 = drain_current(s1.m12, {sol.v_o - sol.v_x, clamp_vds(vdd - sol.v_x), temperature},
                              opts);
    sol.i_d13 = drain_current(s1.m13, {sol.v_x, clamp_vds(sol.v_o), temperature}, opts);
    sol.i_d14 = drain_current(s1.m14, {sol.v_o, clamp_vds(sol.v_o), temperature}, opts);
    sol.i_d15 = drain_current(s1.m15, {0.0, clamp_vds(vdd - sol.v_o), temperature}, opts);
    sol.load_current = load ? load->current(sol.v_o) : 0.0;
    sol.residual = std::max({vo.rel, inner.rel, vx_rel});
    return sol;
}

namespace {

struct LoadCache {
    double vo = -1.0;
    Stage2Solution sol;
};

Stage2Solution& cached_stage2(LoadCache& cache, const Stage2Config& s2, double vo,
                              double temperature, const ModelOptions& opts,
                              const SolverSettings& solver) {
    if (cache.vo != vo) {
        cache.sol = solve_stage2(s2, vo, temperature, opts, solver);
        cache.vo = vo;
    }
    return cache.sol;
}

double stage2_load_derivative(const Stage2Config& s2, const Stage2Solution& sol, double vo,
                              double temperature, const ModelOptions& opts) {
    if (sol.degenerate) return 0.0;
    const SmallSignal g1 = small_signal(s2.m1, {sol.v_ptat, clamp_vds(sol.v_ptat), temperature}, opts);
    const SmallSignal g2 = small_signal(s2.m2, {0.0, clamp_vds(vo - sol.v_ptat), temperature}, opts);
    const SmallSignal g3 = small_signal(s2.m3, {sol.v_ref, clamp_vds(sol.v_ref), temperature}, opts);
    const SmallSignal g4 = small_signal(s2.m4, {sol.v_ptat - sol.v_ref,
                                                clamp_vds(vo - sol.v_ref), temperature}, opts);
    const double den_p = g1.gm + g1.gds + g2.gds;
    const double dvptat = den_p > 0.0 ? g2.gds / den_p : 0.0;
    const double den_r = g3.gm + g3.gds + g4.gm + g4.gds;
    const double dvref = den_r > 0.0 ? (g4.gm * dvptat + g4.gds) / den_r : 0.0;
    const double di2 = g2.gds * (1.0 - dvptat);
    const double di4 = g4.gm * (dvptat - dvref) + g4.gds * (1.0 - dvref);
    return di2 + di4;
}

}  // namespace

OperatingPoint solve_full(const CircuitConfig& cfg, double vdd, double temperature) {
    OperatingPoint op;
    op.vdd = vdd;
    op.temperature = temperature;
    if (vdd < cfg.vdd_min)
        op.warnings.push_back("supply below configured minimum (" +
                              std::to_string(cfg.vdd_min) + " V)");

    const ModelOptions opts = cfg.model_options();
    const Stage2Config s2 = cfg.effective_stage2();

    LoadCache cache;
    LoadModel load;
    load.current = [&](double vo) {
        return cached_stage2(cache, s2, vo, temperature, opts, cfg.solver).supply_draw();
    };
    load.dcurrent = [&](double vo) {
        const Stage2Solution& sol = cached_stage2(cache, s2, vo, temperature, opts, cfg.solver);
        return stage2_load_derivative(s2, sol, vo, temperature, opts);
    };

    Stage1Solution st1;
    try {
        st1 = solve_stage1(cfg.stage1, vdd, temperature, opts, cfg.solver,
                           cfg.flags.stage2_loading ? &load : nullptr);
    } catch (ConvergenceError& e) {
        e.where = "stage1/" + e.where;
        throw;
    }

    Stage2Solution st2;
    try {
        st2 = solve_stage2(s2, st1.v_o, temperature, opts, cfg.solver);
    } catch (ConvergenceError& e) {
        e.where = "stage2/" + e.where;
        throw;
    }

    op.v_x = st1.v_x;
    op.v_o = st1.v_o;
    op.v_ptat = st2.v_ptat;
    op.v_ref = st2.v_ref;
    op.i_d11 = st1.i_d11;
    op.i_d12 = st1.i_d12;
    op.i_d13 = st1.i_d13;
    op.i_d14 = st1.i_d14;
    op.i_d15 = st1.i_d15;
    op.i_d1 = st2.i_d1;
    op.i_d2 = st2.i_d2;
    op.i_d3 = st2.i_d3;
    op.i_d4 = st2.i_d4;
    op.supply_current = st1.i_d12 + st1.i_d15;
    op.residual = std::max(st1.residual, st2.residual);
    op.degenerate = st2.degenerate;
    for (auto& w : st1.warnings) op.warnings.push_back(w);
    for (auto& w : st2.warnings) op.warnings.push_back(w);

    if (!(op.v_ref > 0.0 && op.v_ref < op.v_o && op.v_o < vdd && op.v_ptat > 0.0 &&
          op.v_ptat < op.v_o)) {
        op.degenerate = true;
        op.warnings.push_back("node ordering 0 < v_ref < v_o < vdd, 0 < v_ptat < v_o violated");
    }
    return op;
}

OperatingPoint solve_stage2_only(const CircuitConfig& cfg, double vdd, double temperature) {
    OperatingPoint op;
    op.vdd = vdd;
    op.temperature = temperature;
    op.stage1_bypassed = true;
    if (vdd < cfg.vdd_min)
        op.warnings.push_back("supply below configured minimum (" +
                              std::to_string(cfg.vdd_min) + " V)");

    const Stage2Solution st2 =
        solve_stage2(cfg.effective_stage2(), vdd, temperature, cfg.model_options(), cfg.solver);
    op.v_o = vdd;
    op.v_ptat = st2.v_ptat;
    op.v_ref = st2.v_ref;
    op.i_d1 = st2.i_d1;
    op.i_d2 = st2.i_d2;
    op.i_d3 = st2.i_d3;
    op.i_d4 = st2.i_d4;
    op.supply_current = st2.supply_draw();  // M2 and M4 hang from VDD here
    op.residual = st2.residual;
    op.degenerate = st2.degenerate;
    for (auto& w : st2.warnings) op.warnings.push_back(w);
    return op;
}

namespace {

void check_class(Diagnostics& d, const char* name, const TransistorParams& t,
                 OxideClass expected) {
    if (t.cls.oxide_class != expected)
        d.errors.push_back(std::string(name) + ": expected " +
                           (expected == OxideClass::thin ? "thin" : "thick") + " oxide");
    if (!(t.w > 0.0)) d.errors.push_back(std::string(name) + ": width must be > 0");
    if (!(t.l > 0.0)) d.errors.push_back(std::string(name) + ": length must be > 0");
    if (t.mult < 1) d.errors.push_back(std::string(name) + ": mult must be >= 1");
    if (!(t.alpha < 0.0)) d.errors.push_back(std::string(name) + ": alpha must be negative");
    if (t.lambda_d < 0.0) d.errors.push_back(std::string(name) + ": lambda_d must be >= 0");
    if (!(t.cls.n > 1.0)) d.errors.push_back(std::string(name) + ": slope factor n must be > 1");
    if (!(t.cls.mu_cox > 0.0)) d.errors.push_back(std::string(name) + ": mu_cox must be > 0");
    if (t.delta_gidl != 0.0)
        d.warnings.push_back(std::string(name) + ": delta_gidl is carried but never applied");
}

}  // namespace

Diagnostics wire_check(const CircuitConfig& cfg) {
    Diagnostics d;
    check_class(d, "m1", cfg.stage2.m1, OxideClass::thin);
    check_class(d, "m2", cfg.stage2.m2, OxideClass::thin);
    check_class(d, "m3", cfg.stage2.m3, OxideClass::thick);
    check_class(d, "m4", cfg.stage2.m4, OxideClass::thin);
    check_class(d, "m11", cfg.stage1.m11, OxideClass::thick);
    check_class(d, "m12", cfg.stage1.m12, OxideClass::thin);
    check_class(d, "m13", cfg.stage1.m13, OxideClass::thick);
    check_class(d, "m14", cfg.stage1.m14, OxideClass::thick);
    check_class(d, "m15", cfg.stage1.m15, OxideClass::thin);

    if (cfg.trim) {
        const TrimNetwork& tr = *cfg.trim;
        if (tr.code < 0 || tr.code > 7)
            d.errors.push_back("trim: code must lie in [0, 7]");
        if (!(tr.w3_base > 0.0)) d.errors.push_back("trim: w3_base must be > 0");
        if (tr.w3_bits.size() != 3)
            d.errors.push_back("trim: expected exactly 3 binary-weighted bit widths");
        bool any_negative = false, all_zero = true;
        for (double b : tr.w3_bits) {
            if (b < 0.0) any_negative = true;
            if (b > 0.0) all_zero = false;
        }
        if (any_negative) d.errors.push_back("trim: bit widths must be >= 0");
        if (all_zero && tr.code > 0)
            d.warnings.push_back("trim ineffective: all bit widths are zero");
        if (!any_negative && tr.w3_bits.size() == 3) {
            for (int c = 0; c + 1 <= 7; ++c)
                if (!(tr.effective_width(c + 1) > tr.effective_width(c))) {
                    d.warnings.push_back("trim: effective width not strictly increasing in code");
                    break;
                }
        }
    }

    if (!(cfg.solver.tol_v > 0.0)) d.errors.push_back("solver: tol_v must be > 0");
    if (cfg.solver.max_iter < 1) d.errors.push_back("solver: max_iter must be >= 1");

    if (d.errors.empty()) {
        // Representability of the minimum-supply rule at the hot end.
        const double t_hot = kelvin(85.0);
        const double need =
            4.0 * thermal_voltage(t_hot) +
            ptat_voltage(cfg.stage2.m1, cfg.stage2.m2, t_hot, cfg.t0);
        if (cfg.vdd_min < need)
            d.warnings.push_back("configured vdd_min is below the stage-2 headroom rule (4*VT + V_PTAT = " +
                                 std::to_string(need) + " V at 85 degC)");
    }
    return d;
}

}  // namespace vref
