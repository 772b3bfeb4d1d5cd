#include "vref/variation.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "vref/errors.hpp"
#include "vref/rng.hpp"

namespace vref {

namespace {

void shift_device(TransistorParams& t, double dvth_thin, double dvth_thick, double mu_thin,
                  double mu_thick) {
    if (t.cls.oxide_class == OxideClass::thin) {
        t.vth0 += dvth_thin;
        t.cls.mu_cox *= mu_thin;
    } else {
        t.vth0 += dvth_thick;
        t.cls.mu_cox *= mu_thick;
    }
}

template <typename Fn>
void for_each_device(CircuitConfig& cfg, Fn&& fn) {
    fn(cfg.stage2.m1);
    fn(cfg.stage2.m2);
    fn(cfg.stage2.m3);
    fn(cfg.stage2.m4);
    fn(cfg.stage1.m11);
    fn(cfg.stage1.m12);
    fn(cfg.stage1.m13);
    fn(cfg.stage1.m14);
    fn(cfg.stage1.m15);
}

}  // namespace

CircuitConfig apply_corner(const CircuitConfig& cfg, const CornerSpec& corner) {
    CircuitConfig out = cfg;
    for_each_device(out, [&](TransistorParams& t) {
        shift_device(t, corner.dvth_thin, corner.dvth_thick, corner.mu_scale_thin,
                     corner.mu_scale_thick);
    });
    return out;
}

CircuitConfig draw_variation(const CircuitConfig& cfg, const McConfig& mc, int run) {
    NormalStream rng(mc.seed, static_cast<std::uint64_t>(run));
    const double dvth_thin = mc.sigma_vth_global * rng.next();
    const double dvth_thick = mc.sigma_vth_global * rng.next();
    const double mu_thin = std::max(0.01, 1.0 + mc.sigma_mu_rel * rng.next());
    const double mu_thick = std::max(0.01, 1.0 + mc.sigma_mu_rel * rng.next());

    CircuitConfig out = cfg;
    for_each_device(out, [&](TransistorParams& t) {
        shift_device(t, dvth_thin, dvth_thick, mu_thin, mu_thick);
        if (mc.a_vt > 0.0) t.vth0 += mc.a_vt / std::sqrt(t.w * t.l * t.mult) * rng.next();
        else rng.next();  // keep the draw order fixed regardless of a_vt
    });
    return out;
}

namespace {

McStat stat_of(const std::vector<double>& xs) {
    McStat s;
    if (xs.empty()) return s;
    s.mean = 0.0;
    for (double x : xs) s.mean += x;
    s.mean /= xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0;
    return s;
}

Histogram hist_of(const std::vector<double>& xs, int bins = 16) {
    Histogram h;
    if (xs.empty()) return h;
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) hi = lo + 1.0;  // degenerate spread: single occupied bin
    h.edges.resize(bins + 1);
    h.counts.assign(bins, 0);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    for (double x : xs) {
        int b = static_cast<int>((x - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[b];
    }
    return h;
}

McSample run_one(const CircuitConfig& cfg, const McConfig& mc, double vdd, double t_lo_c,
                 double t_hi_c, int run) {
    McSample s;
    s.run = run;
    try {
        const CircuitConfig varied = draw_variation(cfg, mc, run);
        const SweepResult ts = sweep_temperature(varied, vdd, t_lo_c, t_hi_c, mc.temp_step_c);
        s.tc = tc_box(ts.vref, ts.grid).value;
        const SweepResult vs =
            sweep_supply(varied, 25.0, varied.vdd_min, varied.vdd_max, mc.vdd_step_v);
        s.ls = ls_box(vs.vref, vs.grid).value;
        const OperatingPoint op = solve_full(varied, vdd, kelvin(25.0));
        s.vref = op.v_ref;
        s.power = op.power();
        s.ok = true;
    } catch (const Error&) {
        s.ok = false;
    }
    return s;
}

}  // namespace

McReport monte_carlo_range(const CircuitConfig& cfg, const McConfig& mc, double vdd,
                           double t_lo_c, double t_hi_c, int run_begin, int run_end) {
    if (run_end <= run_begin) throw DomainError("monte_carlo: empty run range");
    const int n = run_end - run_begin;

    McReport rep;
    rep.seed = mc.seed;
    rep.rng_name = rng_algorithm_name;
    rep.runs = n;
    rep.samples.resize(n);

    const int threads = std::max(1, mc.threads);
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            rep.samples[i] = run_one(cfg, mc, vdd, t_lo_c, t_hi_c, run_begin + i);
    } else {
        // Runs are independent and keyed by index; chunked execution with
        // indexed assembly keeps the report identical at any thread count.
        std::vector<std::future<void>> futs;
        const int chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (int i = lo; i < hi; ++i)
                    rep.samples[i] = run_one(cfg, mc, vdd, t_lo_c, t_hi_c, run_begin + i);
            }));
        }
        for (auto& f : futs) f.get();
    }

    std::vector<double> vref, tc, ls, power;
    for (const McSample& s : rep.samples) {
        if (!s.ok) {
            ++rep.failed;
            continue;
        }
        vref.push_back(s.vref);
        tc.push_back(s.tc);
        ls.push_back(s.ls);
        power.push_back(s.power);
    }
    rep.vref = stat_of(vref);
    rep.tc = stat_of(tc);
    rep.ls = stat_of(ls);
    rep.power = stat_of(power);
    rep.hist_vref = hist_of(vref);
    rep.hist_tc = hist_of(tc);
    rep.hist_ls = hist_of(ls);
    rep.hist_power = hist_of(power);
    return rep;
}

McReport monte_carlo(const CircuitConfig& cfg, const McConfig& mc, double vdd, double t_lo_c,
                     double t_hi_c) {
    if (mc.runs < 1) throw DomainError("monte_carlo: runs must be >= 1");
    return monte_carlo_range(cfg, mc, vdd, t_lo_c, t_hi_c, 0, mc.runs);
}

TrimResult trim_search(const CircuitConfig& cfg, int nominal_code, double vdd, double t_lo_c,
                       double t_hi_c, double step_c) {
    if (!cfg.trim) throw ConfigError("trim_search: configuration has no trim network");
    TrimResult res;
    res.nominal_code = nominal_code;
    for (int code = 0; code < 8; ++code) {
        CircuitConfig c = cfg;
        c.trim->code = code;
        const SweepResult ts = sweep_temperature(c, vdd, t_lo_c, t_hi_c, step_c);
        res.tc_by_code.push_back(tc_box(ts.vref, ts.grid).value);
    }
    res.best_code = nominal_code;
    for (int code = 0; code < 8; ++code)
        if (res.tc_by_code[code] < res.tc_by_code[res.best_code]) res.best_code = code;
    return res;
}

}  // namespace vref
