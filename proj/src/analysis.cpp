#include "vref/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vref/analytic.hpp"
#include "vref/errors.hpp"

namespace vref {

namespace {

BoxValue box(const std::vector<double>& series, const std::vector<double>& grid) {
    BoxValue out;
    if (series.size() != grid.size() || series.size() < 2) {
        out.degenerate = true;
        return out;
    }
    const double range = grid.back() - grid.front();
    if (range == 0.0) {
        out.degenerate = true;
        return out;
    }
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / series.size();
    if (mean == 0.0) {
        out.degenerate = true;
        return out;
    }
    out.value = (*hi - *lo) / (std::fabs(mean) * std::fabs(range)) * 1e6;
    return out;
}

}  // namespace

BoxValue tc_box(const std::vector<double>& series, const std::vector<double>& grid) {
    return box(series, grid);
}

BoxValue ls_box(const std::vector<double>& series, const std::vector<double>& grid) {
    return box(series, grid);
}

double endpoint_slope(const std::vector<double>& series, const std::vector<double>& grid) {
    if (series.size() < 2 || grid.size() != series.size()) return 0.0;
    return (series.back() - series.front()) / (grid.back() - grid.front());
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw DomainError("make_grid: step must be > 0");
    if (hi < lo) throw DomainError("make_grid: hi must be >= lo");
    const int n = static_cast<int>(std::round((hi - lo) / step));
    std::vector<double> g;
    g.reserve(n + 1);
    for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
    return g;
}

namespace {

template <typename Solve>
SweepResult run_sweep(SweepAxis axis, const std::vector<double>& grid, const Solve& solve) {
    SweepResult r;
    r.axis = axis;
    r.grid = grid;
    for (double x : grid) {
        OperatingPoint op;
        try {
            op = solve(x);
        } catch (ConvergenceError& e) {
            e.where += " at sweep point " + std::to_string(x);
            throw;
        }
        r.vref.push_back(op.v_ref);
        r.v_o.push_back(op.v_o);
        r.v_ptat.push_back(op.v_ptat);
        r.power.push_back(op.power());
        for (const auto& w : op.warnings)
            r.warnings.push_back("point " + std::to_string(x) + ": " + w);
    }
    return r;
}

}  // namespace

SweepResult sweep_temperature(const CircuitConfig& cfg, double vdd, double t_lo_c,
                              double t_hi_c, double step_c) {
    return run_sweep(SweepAxis::temperature, make_grid(t_lo_c, t_hi_c, step_c),
                     [&](double t_c) { return solve_full(cfg, vdd, kelvin(t_c)); });
}

SweepResult sweep_supply(const CircuitConfig& cfg, double t_c, double vdd_lo, double vdd_hi,
                         double step_v) {
    return run_sweep(SweepAxis::vdd, make_grid(vdd_lo, vdd_hi, step_v),
                     [&](double v) { return solve_full(cfg, v, kelvin(t_c)); });
}

SweepResult sweep_temperature_stage2_only(const CircuitConfig& cfg, double vdd, double t_lo_c,
                                          double t_hi_c, double step_c) {
    return run_sweep(SweepAxis::temperature, make_grid(t_lo_c, t_hi_c, step_c),
                     [&](double t_c) { return solve_stage2_only(cfg, vdd, kelvin(t_c)); });
}

SweepResult sweep_supply_stage2_only(const CircuitConfig& cfg, double t_c, double vdd_lo,
                                     double vdd_hi, double step_v) {
    return run_sweep(SweepAxis::vdd, make_grid(vdd_lo, vdd_hi, step_v),
                     [&](double v) { return solve_stage2_only(cfg, v, kelvin(t_c)); });
}

namespace {

Metrics metrics_common(const SweepResult& s) {
    Metrics m;
    if (!s.power.empty()) {
        const auto [pmin, pmax] = std::minmax_element(s.power.begin(), s.power.end());
        m.p_min = *pmin;
        m.p_max = *pmax;
    }
    if (!s.vref.empty())
        m.vref_mean = std::accumulate(s.vref.begin(), s.vref.end(), 0.0) / s.vref.size();
    return m;
}

}  // namespace

Metrics metrics_from_temperature_sweep(const SweepResult& s) {
    Metrics m = metrics_common(s);
    m.tc = tc_box(s.vref, s.grid).value;
    return m;
}

Metrics metrics_from_supply_sweep(const SweepResult& s) {
    Metrics m = metrics_common(s);
    m.ls = ls_box(s.vref, s.grid).value;
    return m;
}

double aspect_product(const CircuitConfig& cfg) {
    const Stage2Config s2 = cfg.effective_stage2();
    return aspect(s2.m4) * aspect(s2.m2) / (aspect(s2.m3) * aspect(s2.m1));
}

CircuitConfig with_k(const CircuitConfig& cfg, double k) {
    if (!(k > 0.0)) throw DomainError("with_k: k must be > 0");
    CircuitConfig out = cfg;
    out.stage2.m4.w *= k / aspect_product(cfg);
    return out;
}

SweepResult tc_vs_k(const CircuitConfig& cfg, const std::vector<double>& k_grid, double vdd,
                    double t_lo_c, double t_hi_c, double step_c) {
    SweepResult r;
    r.axis = SweepAxis::k_ratio;
    r.grid = k_grid;
    for (double k : k_grid) {
        const SweepResult ts = sweep_temperature(with_k(cfg, k), vdd, t_lo_c, t_hi_c, step_c);
        r.vref.push_back(tc_box(ts.vref, ts.grid).value);
        r.v_o.push_back(ts.v_o.empty() ? 0.0 : ts.v_o.front());
        r.v_ptat.push_back(ts.v_ptat.empty() ? 0.0 : ts.v_ptat.front());
        r.power.push_back(ts.power.empty() ? 0.0 : ts.power.front());
    }
    return r;
}

KSearchResult find_optimal_k(const CircuitConfig& cfg, const KSearchSettings& ks, double vdd,
                             double t_lo_c, double t_hi_c, double step_c) {
    if (ks.points < 3) throw DomainError("find_optimal_k: need at least 3 scan points");
    std::vector<double> grid;
    for (int i = 0; i < ks.points; ++i)
        grid.push_back(ks.k_min + (ks.k_max - ks.k_min) * i / (ks.points - 1));

    KSearchResult res;
    res.scan = tc_vs_k(cfg, grid, vdd, t_lo_c, t_hi_c, step_c);
    const std::vector<double>& tc = res.scan.vref;

    int imin = 0;
    for (std::size_t i = 1; i < tc.size(); ++i)
        if (tc[i] < tc[imin]) imin = static_cast<int>(i);

    // Unimodality on the scan grid: a single descending-then-ascending run,
    // judged with a small relative tolerance against solver noise.
    int minima = 0;
    for (std::size_t i = 1; i + 1 < tc.size(); ++i) {
        const double eps = 1e-9 * std::max(1.0, std::fabs(tc[i]));
        if (tc[i] < tc[i - 1] - eps && tc[i] < tc[i + 1] - eps) ++minima;
    }
    res.unimodal = minima <= 1;
    res.boundary = imin == 0 || imin == static_cast<int>(tc.size()) - 1;

    auto tc_at = [&](double k) {
        const SweepResult ts = sweep_temperature(with_k(cfg, k), vdd, t_lo_c, t_hi_c, step_c);
        return tc_box(ts.vref, ts.grid).value;
    };

    double a = grid[std::max(0, imin - 1)];
    double b = grid[std::min<int>(grid.size() - 1, imin + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = tc_at(c), fd = tc_at(d);
    while (b - a > ks.golden_tol_rel * std::fabs(0.5 * (a + b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = tc_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = tc_at(d);
        }
    }
    res.k_num = 0.5 * (a + b);
    res.k_theory = optimal_k(cfg.effective_stage2());
    res.gap = std::fabs(res.k_num - res.k_theory) / res.k_theory;
    return res;
}

std::vector<double> tc_vs_vdd(const CircuitConfig& cfg, const std::vector<double>& vdd_grid,
                              bool with_stage1, double t_lo_c, double t_hi_c, double step_c) {
    std::vector<double> out;
    out.reserve(vdd_grid.size());
    for (double v : vdd_grid) {
        const SweepResult ts = with_stage1
                                   ? sweep_temperature(cfg, v, t_lo_c, t_hi_c, step_c)
                                   : sweep_temperature_stage2_only(cfg, v, t_lo_c, t_hi_c, step_c);
        out.push_back(tc_box(ts.vref, ts.grid).value);
    }
    return out;
}

std::vector<M15Curve> m15_length_study(const CircuitConfig& cfg,
                                       const std::vector<M15Point>& lengths,
                                       bool with_dibl_comp, double fit_c1,
                                       double lambda_long, double vdd_lo, double vdd_hi,
                                       double step_v, double t_c) {
    std::vector<M15Curve> out;
    const double n_r = cfg.stage1.m14.cls.n / cfg.stage1.m15.cls.n;
    for (const M15Point& p : lengths) {
        CircuitConfig c = cfg;
        c.stage1.m15.l = p.l;
        c.stage1.m15.lambda_d = p.lambda_d;
        c.stage1.m12.lambda_d =
            with_dibl_comp ? compensated_lambda_m12(p.lambda_d, n_r, fit_c1) : lambda_long;

        M15Curve curve;
        curve.point = p;
        const SweepResult s = sweep_supply(c, t_c, vdd_lo, vdd_hi, step_v);
        curve.vdd = s.grid;
        curve.v_o = s.v_o;
        for (std::size_t i = 1; i + 1 < s.v_o.size(); ++i) {
            const double d0 = s.v_o[i] - s.v_o[i - 1];
            const double d1 = s.v_o[i + 1] - s.v_o[i];
            if (std::fabs(d0) > 1e-12 && std::fabs(d1) > 1e-12 &&
                std::signbit(d0) != std::signbit(d1)) {
                curve.interior_extremum = true;
                curve.extremum_vdd = s.grid[i];
                break;
            }
        }
        out.push_back(std::move(curve));
    }
    return out;
}

Stage1TcLeakage stage1_tc_leakage(const CircuitConfig& cfg, double vdd, double t_lo_c,
                                  double t_hi_c, double step_c) {
    const SweepResult s = sweep_temperature(cfg, vdd, t_lo_c, t_hi_c, step_c);
    Stage1TcLeakage out;
    out.vo_mean = std::accumulate(s.v_o.begin(), s.v_o.end(), 0.0) / s.v_o.size();
    out.tc_vo_frac = tc_box(s.v_o, s.grid).value * 1e-6;
    out.tc_vref_frac = tc_box(s.vref, s.grid).value * 1e-6;
    const double vref_mean =
        std::accumulate(s.vref.begin(), s.vref.end(), 0.0) / s.vref.size();
    out.ls2_per_v = stage2_ls_percent(cfg.effective_stage2(), vref_mean) / 100.0;
    out.leak_per_k = out.ls2_per_v * out.tc_vo_frac * out.vo_mean;
    out.ratio = out.tc_vref_frac != 0.0 ? out.leak_per_k / out.tc_vref_frac : 0.0;
    return out;
}

RegimeSlopes ptat_regime_study(const CircuitConfig& cfg, const std::vector<double>& ratios,
                               double supply, double t_lo_c, double t_hi_c, double step_c) {
    RegimeSlopes out;
    out.ratios = ratios;
    const std::vector<double> grid = make_grid(t_lo_c, t_hi_c, step_c);
    const Stage2Config base = cfg.effective_stage2();
    const double r_nominal = aspect(base.m2) / aspect(base.m1);
    for (double r : ratios) {
        Stage2Config s2 = base;
        s2.m2.w *= r / r_nominal;
        std::vector<double> vptat;
        for (double t_c : grid) {
            vptat.push_back(
                solve_stage2(s2, supply, kelvin(t_c), cfg.model_options(), cfg.solver).v_ptat);
        }
        out.slope_v_per_k.push_back(endpoint_slope(vptat, grid));
    }
    return out;
}

namespace {

CircuitConfig tightened(const CircuitConfig& cfg) {
    CircuitConfig c = cfg;
    c.solver.tol_v = 1e-13;
    c.solver.tol_rel_i = 1e-13;
    c.solver.max_iter = 200;
    return c;
}

}  // namespace

double dc_sensitivity_vref(const CircuitConfig& cfg, double vdd, double t_c, double delta_v) {
    const CircuitConfig c = tightened(cfg);
    const double t = kelvin(t_c);
    const double hi = solve_full(c, vdd + delta_v, t).v_ref;
    const double lo = solve_full(c, vdd - delta_v, t).v_ref;
    return (hi - lo) / (2.0 * delta_v);
}

double dc_sensitivity_vo(const CircuitConfig& cfg, double vdd, double t_c, double delta_v) {
    const CircuitConfig c = tightened(cfg);
    const double t = kelvin(t_c);
    const double hi = solve_full(c, vdd + delta_v, t).v_o;
    const double lo = solve_full(c, vdd - delta_v, t).v_o;
    return (hi - lo) / (2.0 * delta_v);
}

}  // namespace vref
