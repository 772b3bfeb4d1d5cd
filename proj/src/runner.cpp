#include "vref/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "vref/csv.hpp"
#include "vref/errors.hpp"

namespace vref {

namespace {

struct CommandEntry {
    Command cmd;
    const char* name;
};

constexpr CommandEntry command_table[] = {
    {Command::op, "op"},
    {Command::sweep_temp, "sweep-temp"},
    {Command::sweep_vdd, "sweep-vdd"},
    {Command::ls_ablation, "ls-ablation"},
    {Command::tc_vs_k, "tc-vs-k"},
    {Command::tc_vs_vdd, "tc-vs-vdd"},
    {Command::m15_study, "m15-study"},
    {Command::psrr, "psrr"},
    {Command::corners, "corners"},
    {Command::monte_carlo, "monte-carlo"},
    {Command::trim, "trim"},
    {Command::check_analytic, "check-analytic"},
};

}  // namespace

const char* command_name(Command c) {
    for (const auto& e : command_table)
        if (e.cmd == c) return e.name;
    return "?";
}

std::optional<Command> command_from_name(const std::string& name) {
    for (const auto& e : command_table)
        if (name == e.name) return e.cmd;
    return std::nullopt;
}

std::string RunReport::text() const {
    std::string out = "command: " + command + "\nconfig digest: " + config_digest + "\n";
    for (const auto& line : summary) out += line + "\n";
    for (const auto& [k, v] : metrics) out += k + " = " + format_double(v) + "\n";
    for (const auto& w : warnings) out += "warning: " + w + "\n";
    for (const auto& f : files) out += "wrote " + f + "\n";
    out += "duration_s: " + format_double(duration_s) + "\n";
    out += ok ? "status: ok\n" : "status: FAILED\n";
    return out;
}

namespace {

struct Ctx {
    ToolConfig cfg;        // effective (corner/trim/ideal applied)
    const RunOptions* opt;
    RunReport* report;
    std::filesystem::path out_dir;

    double vdd() const { return opt->vdd.value_or(cfg.vdd_nominal); }
    double temp_c() const { return opt->temp_c.value_or(cfg.temp_nominal_c); }

    void emit(const std::string& name, const CsvTable& table) const {
        const auto path = out_dir / name;
        table.write(path);
        report->files.push_back(path.string());
    }
    void metric(const std::string& name, double v) const {
        report->metrics.emplace_back(name, v);
    }
    void note(const std::string& line) const { report->summary.push_back(line); }
    void warn(const std::vector<std::string>& ws) const {
        for (const auto& w : ws) report->warnings.push_back(w);
    }
};

OperatingPoint solve_point(const Ctx& c, double vdd, double t_c) {
    return c.opt->no_stage1 ? solve_stage2_only(c.cfg.circuit, vdd, kelvin(t_c))
                            : solve_full(c.cfg.circuit, vdd, kelvin(t_c));
}

SweepResult temp_sweep(const Ctx& c, double vdd) {
    const SweepDefaults& s = c.cfg.sweeps;
    return c.opt->no_stage1
               ? sweep_temperature_stage2_only(c.cfg.circuit, vdd, s.temp_min_c, s.temp_max_c,
                                               s.temp_step_c)
               : sweep_temperature(c.cfg.circuit, vdd, s.temp_min_c, s.temp_max_c, s.temp_step_c);
}

SweepResult vdd_sweep(const Ctx& c, double t_c) {
    const SweepDefaults& s = c.cfg.sweeps;
    return c.opt->no_stage1
               ? sweep_supply_stage2_only(c.cfg.circuit, t_c, s.vdd_min_v, s.vdd_max_v,
                                          s.vdd_step_v)
               : sweep_supply(c.cfg.circuit, t_c, s.vdd_min_v, s.vdd_max_v, s.vdd_step_v);
}

void cmd_op(const Ctx& c) {
    const OperatingPoint op = solve_point(c, c.vdd(), c.temp_c());
    CsvTable t({"vdd_v", "temp_c", "v_x", "v_o", "v_ptat", "v_ref", "i_d11", "i_d12", "i_d13",
                "i_d14", "i_d15", "i_d1", "i_d2", "i_d3", "i_d4", "supply_current_a", "power_w",
                "residual"});
    t.add_row({op.vdd, celsius(op.temperature), op.v_x, op.v_o, op.v_ptat, op.v_ref, op.i_d11,
               op.i_d12, op.i_d13, op.i_d14, op.i_d15, op.i_d1, op.i_d2, op.i_d3, op.i_d4,
               op.supply_current, op.power(), op.residual});
    c.emit("op.csv", t);
    c.metric("v_ref_v", op.v_ref);
    c.metric("v_o_v", op.v_o);
    c.metric("v_ptat_v", op.v_ptat);
    c.metric("power_w", op.power());
    c.metric("residual", op.residual);
    c.warn(op.warnings);
}

void add_sweep_csv(const Ctx& c, const char* fname, const char* axis_name,
                   const SweepResult& s) {
    CsvTable t({axis_name, "v_ref", "v_o", "v_ptat", "power_w"});
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        t.add_row({s.grid[i], s.vref[i], s.v_o[i], s.v_ptat[i], s.power[i]});
    c.emit(fname, t);
    c.warn(s.warnings);
}

void cmd_sweep_temp(const Ctx& c) {
    const SweepResult s = temp_sweep(c, c.vdd());
    add_sweep_csv(c, "temp_sweep.csv", "temp_c", s);
    const Metrics m = metrics_from_temperature_sweep(s);
    c.metric("tc_ppm_per_c", m.tc);
    c.metric("vref_mean_v", m.vref_mean);
    c.metric("p_min_w", m.p_min);
    c.metric("p_max_w", m.p_max);
}

void cmd_sweep_vdd(const Ctx& c) {
    const SweepResult s = vdd_sweep(c, c.temp_c());
    add_sweep_csv(c, "vdd_sweep.csv", "vdd_v", s);
    const Metrics m = metrics_from_supply_sweep(s);
    c.metric("ls_ppm_per_v", m.ls);
    c.metric("vref_mean_v", m.vref_mean);
}

void cmd_ls_ablation(const Ctx& c) {
    const SweepDefaults& sw = c.cfg.sweeps;
    const double t_c = c.temp_c();

    const SweepResult alone = sweep_supply_stage2_only(c.cfg.circuit, t_c, sw.vdd_min_v,
                                                       sw.vdd_max_v, sw.vdd_step_v);
    CircuitConfig no_comp = c.cfg.circuit;
    no_comp.stage1.m12.lambda_d = c.cfg.lambda_long;
    const SweepResult uncomp =
        sweep_supply(no_comp, t_c, sw.vdd_min_v, sw.vdd_max_v, sw.vdd_step_v);
    const SweepResult comp =
        sweep_supply(c.cfg.circuit, t_c, sw.vdd_min_v, sw.vdd_max_v, sw.vdd_step_v);

    CsvTable t({"vdd_v", "vref_stage2_only", "vref_two_stage_no_comp", "vref_two_stage_comp"});
    for (std::size_t i = 0; i < alone.grid.size(); ++i)
        t.add_row({alone.grid[i], alone.vref[i], uncomp.vref[i], comp.vref[i]});
    c.emit("ls_ablation.csv", t);

    const double ls_alone = ls_box(alone.vref, alone.grid).value;
    const double ls_uncomp = ls_box(uncomp.vref, uncomp.grid).value;
    const double ls_comp = ls_box(comp.vref, comp.grid).value;
    c.metric("ls_stage2_only_ppm_per_v", ls_alone);
    c.metric("ls_two_stage_no_comp_ppm_per_v", ls_uncomp);
    c.metric("ls_two_stage_comp_ppm_per_v", ls_comp);

    // Closed-form prediction for the summary.
    const double vref_mean =
        std::accumulate(comp.vref.begin(), comp.vref.end(), 0.0) / comp.vref.size();
    const double ls2_pct = stage2_ls_percent(c.cfg.circuit.effective_stage2(), vref_mean);
    const double dvo = dc_sensitivity_vo(c.cfg.circuit, 0.5 * (sw.vdd_min_v + sw.vdd_max_v),
                                         t_c, 0.02);
    c.note("stage-2 sensitivity form: ls2 = " + format_double(ls2_pct) +
           " %/V; product form total = " + format_double(total_ls_ppm(dvo, ls2_pct)) +
           " ppm/V at mid-supply");
}

void cmd_tc_vs_k(const Ctx& c) {
    const SweepDefaults& sw = c.cfg.sweeps;
    const KSearchResult r = find_optimal_k(c.cfg.circuit, c.cfg.ksearch, c.vdd(),
                                           sw.temp_min_c, sw.temp_max_c, sw.temp_step_c);
    CsvTable t({"k", "tc_ppm_per_c"});
    for (std::size_t i = 0; i < r.scan.grid.size(); ++i)
        t.add_row({r.scan.grid[i], r.scan.vref[i]});
    c.emit("tc_vs_k.csv", t);
    c.metric("k_num", r.k_num);
    c.metric("k_theory", r.k_theory);
    c.metric("gap", r.gap);
    c.note(std::string("scan ") + (r.unimodal ? "unimodal" : "NOT unimodal") +
           (r.boundary ? ", argmin at scan boundary" : ""));
}

void cmd_tc_vs_vdd(const Ctx& c) {
    const SweepDefaults& sw = c.cfg.sweeps;
    const std::vector<double> grid = make_grid(sw.vdd_min_v, sw.vdd_max_v,
                                               std::max(sw.vdd_step_v, 0.05));
    const std::vector<double> with_s1 =
        tc_vs_vdd(c.cfg.circuit, grid, true, sw.temp_min_c, sw.temp_max_c, sw.temp_step_c);
    const std::vector<double> without =
        tc_vs_vdd(c.cfg.circuit, grid, false, sw.temp_min_c, sw.temp_max_c, sw.temp_step_c);
    CsvTable t({"vdd_v", "tc_with_stage1_ppm_per_c", "tc_stage2_only_ppm_per_c"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.add_row({grid[i], with_s1[i], without[i]});
    c.emit("tc_vs_vdd.csv", t);

    const auto spread = [](const std::vector<double>& xs) {
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        return *hi - *lo;
    };
    c.metric("tc_spread_with_stage1_ppm_per_c", spread(with_s1));
    c.metric("tc_spread_stage2_only_ppm_per_c", spread(without));
}

void cmd_m15_study(const Ctx& c) {
    const SweepDefaults& sw = c.cfg.sweeps;
    CsvTable t({"l_um", "lambda_d_mv_per_v", "dibl_comp", "vdd_v", "v_o"});
    int extrema_comp = 0, extrema_uncomp = 0;
    for (bool comp : {false, true}) {
        const auto curves = m15_length_study(c.cfg.circuit, c.cfg.m15_lengths, comp,
                                             c.cfg.refit.c1, c.cfg.lambda_long, sw.vdd_min_v,
                                             sw.vdd_max_v, std::max(sw.vdd_step_v, 0.02),
                                             c.temp_c());
        for (const auto& curve : curves) {
            for (std::size_t i = 0; i < curve.vdd.size(); ++i)
                t.add_row({curve.point.l / 1e-6, curve.point.lambda_d / 1e-3,
                           comp ? 1.0 : 0.0, curve.vdd[i], curve.v_o[i]});
            if (curve.interior_extremum) {
                (comp ? extrema_comp : extrema_uncomp)++;
                c.note("interior extremum at vdd = " + format_double(curve.extremum_vdd) +
                       " V for L = " + format_double(curve.point.l / 1e-6) + " um" +
                       (comp ? " (compensated)" : " (uncompensated)"));
            }
        }
    }
    c.emit("m15_study.csv", t);
    c.metric("curves_with_extremum_comp", extrema_comp);
    c.metric("curves_with_extremum_no_comp", extrema_uncomp);
}

void cmd_psrr(const Ctx& c) {
    const double vdd = c.opt->vdd.value_or(c.cfg.psrr.vdd_v);
    const OperatingPoint op = solve_full(c.cfg.circuit, vdd, kelvin(c.temp_c()));
    const AcParams ac = extract_ac(c.cfg.circuit, op, c.cfg.caps);
    const std::vector<double> grid = psrr_frequency_grid(
        c.cfg.psrr.f_min_hz, c.cfg.psrr.f_max_hz, c.cfg.psrr.points_per_decade);
    const std::vector<double> two_stage = psrr_numeric(ac, grid, true);
    const std::vector<double> stage2_only = psrr_numeric(ac, grid, false);

    CsvTable t({"freq_hz", "psrr_db_two_stage", "psrr_db_stage2_only"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.add_row({grid[i], two_stage[i], stage2_only[i]});
    c.emit("psrr.csv", t);

    // Low-frequency tie to the DC large-signal sensitivity.
    const double ac_dc_db = psrr_numeric(ac, {1e-4}, true)[0];
    const double fd = dc_sensitivity_vref(c.cfg.circuit, vdd, c.temp_c(), 0.02);
    const double fd_db = 20.0 * std::log10(std::fabs(fd));
    c.metric("psrr_db_at_f_min", two_stage.front());
    c.metric("psrr_db_low_freq_limit", ac_dc_db);
    c.metric("dc_sensitivity_db", fd_db);

    const auto peak = std::max_element(two_stage.begin(), two_stage.end());
    c.metric("peak_db", *peak);
    c.metric("peak_freq_hz", grid[peak - two_stage.begin()]);

    const RationalTf network = psrr_network_tf(ac, true);
    const TfDeviation same = compare_tf(network, grid, two_stage);
    c.metric("network_tf_max_dev_db", same.max_db);
    const RationalTf reported = psrr_reported_form(ac);
    const TfDeviation rep = compare_tf(reported, grid, two_stage);
    c.note("reported product form deviates up to " + format_double(rep.max_db) +
           " dB from the nodal solve (dimensional inconsistency flagged; comparison only)");
    c.warn(op.warnings);
}

void cmd_corners(const Ctx& c) {
    const SweepDefaults& sw = c.cfg.sweeps;
    CsvTable t({"corner", "vref_v", "tc_ppm_per_c", "ls_ppm_per_v", "power_w"});
    for (const CornerSpec& corner : c.cfg.corners) {
        const CircuitConfig cc = apply_corner(c.cfg.circuit, corner);
        const SweepResult ts =
            sweep_temperature(cc, c.vdd(), sw.temp_min_c, sw.temp_max_c, sw.temp_step_c);
        const SweepResult vs =
            sweep_supply(cc, c.temp_c(), sw.vdd_min_v, sw.vdd_max_v, sw.vdd_step_v);
        const OperatingPoint op = solve_full(cc, c.vdd(), kelvin(c.temp_c()));
        t.add_row_mixed({corner.name, format_double(op.v_ref),
                         format_double(tc_box(ts.vref, ts.grid).value),
                         format_double(ls_box(vs.vref, vs.grid).value),
                         format_double(op.power())});
    }
    c.emit("corners.csv", t);
}

void cmd_monte_carlo(const Ctx& c) {
    McConfig mc = c.cfg.mc;
    if (c.opt->seed) mc.seed = *c.opt->seed;
    if (c.opt->runs) mc.runs = *c.opt->runs;
    mc.threads = c.opt->threads;
    const SweepDefaults& sw = c.cfg.sweeps;
    const McReport rep =
        monte_carlo(c.cfg.circuit, mc, c.vdd(), sw.temp_min_c, sw.temp_max_c);

    CsvTable runs({"run", "ok", "vref_v", "tc_ppm_per_c", "ls_ppm_per_v", "power_w"});
    for (const McSample& s : rep.samples)
        runs.add_row({static_cast<double>(s.run), s.ok ? 1.0 : 0.0, s.vref, s.tc, s.ls,
                      s.power});
    c.emit("mc_runs.csv", runs);

    CsvTable summary({"metric", "mean", "stddev"});
    summary.add_row_mixed({"vref_v", format_double(rep.vref.mean), format_double(rep.vref.stddev)});
    summary.add_row_mixed({"tc_ppm_per_c", format_double(rep.tc.mean), format_double(rep.tc.stddev)});
    summary.add_row_mixed({"ls_ppm_per_v", format_double(rep.ls.mean), format_double(rep.ls.stddev)});
    summary.add_row_mixed({"power_w", format_double(rep.power.mean), format_double(rep.power.stddev)});
    c.emit("mc_summary.csv", summary);

    CsvTable hist({"metric", "bin_lo", "bin_hi", "count"});
    const auto add_hist = [&](const char* name, const Histogram& h) {
        for (std::size_t i = 0; i + 1 < h.edges.size(); ++i)
            hist.add_row_mixed({name, format_double(h.edges[i]), format_double(h.edges[i + 1]),
                                format_double(h.counts[i])});
    };
    add_hist("vref_v", rep.hist_vref);
    add_hist("tc_ppm_per_c", rep.hist_tc);
    add_hist("ls_ppm_per_v", rep.hist_ls);
    add_hist("power_w", rep.hist_power);
    c.emit("mc_hist.csv", hist);

    c.metric("vref_mean_v", rep.vref.mean);
    c.metric("vref_std_v", rep.vref.stddev);
    c.metric("tc_mean_ppm_per_c", rep.tc.mean);
    c.metric("tc_std_ppm_per_c", rep.tc.stddev);
    c.metric("ls_mean_ppm_per_v", rep.ls.mean);
    c.metric("ls_std_ppm_per_v", rep.ls.stddev);
    c.metric("power_mean_w", rep.power.mean);
    c.metric("power_std_w", rep.power.stddev);
    c.metric("runs_failed", rep.failed);
    c.note("rng: " + rep.rng_name + ", seed " + std::to_string(rep.seed) + ", " +
           std::to_string(rep.runs) + " runs, " + std::to_string(rep.failed) + " failed");
}

void cmd_trim(const Ctx& c) {
    if (!c.cfg.circuit.trim) throw ConfigError("trim: configuration has no trim network");
    const TrimSweepSettings& ts = c.cfg.trim_sweep;
    CsvTable t({"corner", "code", "tc_ppm_per_c", "is_best", "is_nominal"});
    std::vector<CornerSpec> corners = c.cfg.corners;
    if (c.opt->corner) corners = {*c.cfg.corner(*c.opt->corner)};
    for (const CornerSpec& corner : corners) {
        const CircuitConfig cc = apply_corner(c.cfg.circuit, corner);
        const TrimResult r = trim_search(cc, ts.nominal_code, c.vdd(), ts.temp_min_c,
                                         ts.temp_max_c, ts.temp_step_c);
        for (int code = 0; code < 8; ++code)
            t.add_row_mixed({corner.name, format_double(code),
                             format_double(r.tc_by_code[code]),
                             format_double(code == r.best_code ? 1 : 0),
                             format_double(code == r.nominal_code ? 1 : 0)});
        c.note("corner " + corner.name + ": best code " + std::to_string(r.best_code) +
               " (tc " + format_double(r.tc_by_code[r.best_code]) + " ppm/degC)");
        c.metric("best_code_" + corner.name, r.best_code);
    }
    c.emit("trim.csv", t);
}

void cmd_check_analytic(const Ctx& c) {
    // Closed forms against the ideal-model numeric solver on this config.
    CircuitConfig ideal = c.cfg.circuit;
    ideal.flags = ModelFlags{false, false, false};
    const Stage2Config s2 = ideal.effective_stage2();
    const Stage1Config& s1 = ideal.stage1;
    const ModelOptions opts = ideal.model_options();

    CsvTable t({"check", "value", "limit", "pass"});
    bool all_ok = true;
    const auto check = [&](const std::string& name, double value, double limit) {
        const bool pass = value <= limit;
        all_ok = all_ok && pass;
        t.add_row_mixed({name, format_double(value), format_double(limit), pass ? "1" : "0"});
    };

    double dv_ptat = 0.0, dv_ref = 0.0, di13 = 0.0, di15 = 0.0, dv_x = 0.0;
    for (double t_c = 0.0; t_c <= 80.0; t_c += 5.0) {
        const double tk = kelvin(t_c);
        const Stage2Solution sol = solve_stage2(s2, 1.0, tk, opts, ideal.solver);
        dv_ptat = std::max(dv_ptat,
                           std::fabs(sol.v_ptat - ptat_voltage(s2.m1, s2.m2, tk, ideal.t0)));
        dv_ref = std::max(dv_ref, std::fabs(sol.v_ref - vref_closed_form(s2, tk, ideal.t0)));
        for (double v_o : {0.2, 0.3, 0.4}) {
            // V_X at a prescribed v_o: the closed form must balance the node.
            const double vx = vx_closed_form(s1, v_o, tk, ideal.t0);
            const double i11 = drain_current(s1.m11, {vx, 0.0, tk}, opts);
            const double i12 = drain_current(s1.m12, {v_o - vx, 0.0, tk}, opts);
            dv_x = std::max(dv_x, std::fabs(i11 - i12) / std::max(i11, i12));
            const double i13 = drain_current(s1.m13, {vx, 1.0, tk}, opts);
            di13 = std::max(di13, std::fabs(i13 - id13_closed_form(s1, v_o, tk, ideal.t0)) /
                                      std::max(i13, 1e-300));
            const double i15 = drain_current(s1.m15, {0.0, 1.0, tk}, opts);
            di15 = std::max(di15, std::fabs(i15 - id15_closed_form(s1, tk, ideal.t0)) /
                                      std::max(i15, 1e-300));
        }
    }
    check("v_ptat vs closed form [V]", dv_ptat, 1e-6);
    check("v_ref vs closed form [V]", dv_ref, 1e-6);
    check("v_x closed-form KCL balance [rel]", dv_x, 1e-6);
    check("i_d13 composition [rel]", di13, 1e-6);
    check("i_d15 closed form [rel]", di15, 1e-6);

    // Temperature-free compensated output at the theoretical aspect product.
    const double kth = optimal_k(s2);
    CircuitConfig at_k = ideal;
    at_k.stage2 = s2;
    at_k.trim.reset();
    const CircuitConfig cfg_k = with_k(at_k, kth);
    double spread_lo = 1e300, spread_hi = -1e300;
    for (double t_c : {0.0, 20.0, 40.0, 60.0, 80.0}) {
        const double v = vref_closed_form(cfg_k.stage2, kelvin(t_c), ideal.t0);
        spread_lo = std::min(spread_lo, v);
        spread_hi = std::max(spread_hi, v);
    }
    check("compensated output spread over T [V]", spread_hi - spread_lo, 1e-12);
    check("closed-form dv/dT at k_theory [V/K]", std::fabs(vref_closed_form_dt(cfg_k.stage2)),
          1e-9);
    const double v9 = vref_compensated(cfg_k.stage2, ideal.t0);
    check("temperature-free form vs closed form [V]",
          std::fabs(v9 - vref_closed_form(cfg_k.stage2, kelvin(33.0), ideal.t0)), 1e-12);

    // Linearization refit, reported next to the published coefficients.
    const LinFit& fit = c.cfg.refit;
    c.note("ln(1-X) refit over [" + format_double(fit.x_lo) + ", " + format_double(fit.x_hi) +
           "]: c1 = " + format_double(fit.c1) + ", c2 = " + format_double(fit.c2) +
           ", r2 = " + format_double(fit.r2));
    c.note("reported coefficients: c1 = " + format_double(reported_fit_c1) +
           ", c2 = " + format_double(reported_fit_c2) +
           ", r2 = " + format_double(reported_fit_r2) +
           "; downstream computations use the refit (delta c1 = " +
           format_double(fit.c1 - reported_fit_c1) + ")");

    // Linearized stage-1 form: diagnostic only. Propagated fit error bound.
    const Stage1Solution st1 =
        solve_stage1(s1, 1.0, kelvin(c.cfg.temp_nominal_c), opts, ideal.solver, nullptr);
    const double vo16 = vo_linearized(s1, fit, kelvin(c.cfg.temp_nominal_c), ideal.t0);
    double max_fit_err = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = fit.x_lo + (fit.x_hi - fit.x_lo) * i / 100.0;
        max_fit_err = std::max(max_fit_err,
                               std::fabs(std::log1p(-x) - (fit.c1 * x + fit.c2)));
    }
    const double n_h = s1.m11.cls.n, n_l = s1.m12.cls.n;
    const double bound = n_h * thermal_voltage(kelvin(80.0)) * max_fit_err /
                         std::fabs(1.0 - fit.c1 / (n_l * (n_l + n_h)) * n_h * n_l);
    c.note("linearized stage-1 output: " + format_double(vo16) + " V vs numeric " +
           format_double(st1.v_o) + " V (delta " + format_double(vo16 - st1.v_o) +
           " V, propagated fit-error bound " + format_double(bound) +
           " V); diagnostic only, see README");

    // Stage-2 sensitivity: finite difference of the full model against the
    // closed form.
    const CircuitConfig full = c.cfg.circuit;
    const double t25 = kelvin(25.0);
    const Stage2Config s2full = full.effective_stage2();
    const double vv = 0.35;
    const double dv = 0.02;
    const double fd =
        (solve_stage2(s2full, vv + dv, t25, full.model_options(), full.solver).v_ref -
         solve_stage2(s2full, vv - dv, t25, full.model_options(), full.solver).v_ref) /
        (2.0 * dv);
    const double pred = stage2_supply_sensitivity(s2full.m3.cls.n, s2full.m4.cls.n,
                                                  s2full.m2.lambda_d, s2full.m4.lambda_d);
    check("stage-2 supply sensitivity vs closed form [rel]",
          std::fabs(fd - pred) / std::fabs(pred), 0.05);

    c.emit("check_analytic.csv", t);
    c.report->ok = all_ok;
    c.note(all_ok ? "all oracle comparisons within limits"
                  : "one or more oracle comparisons FAILED");
}

}  // namespace

RunReport run_command(const ToolConfig& cfg, Command cmd, const RunOptions& opt) {
    const auto t_start = std::chrono::steady_clock::now();

    RunReport report;
    report.command = command_name(cmd);
    report.config_digest = cfg.digest;

    Ctx ctx{cfg, &opt, &report, opt.out_dir};
    if (opt.corner) {
        const CornerSpec* corner = cfg.corner(*opt.corner);
        if (!corner) throw ConfigError("unknown corner \"" + *opt.corner + "\"");
        // corners/trim iterate corners themselves.
        if (cmd != Command::corners && cmd != Command::trim)
            ctx.cfg.circuit = apply_corner(ctx.cfg.circuit, *corner);
    }
    if (opt.trim_code) {
        if (!ctx.cfg.circuit.trim) throw ConfigError("--trim-code: no trim network configured");
        if (*opt.trim_code < 0 || *opt.trim_code > 7)
            throw ConfigError("--trim-code: must lie in [0, 7]");
        ctx.cfg.circuit.trim->code = *opt.trim_code;
    }
    if (opt.ideal_model) ctx.cfg.circuit.flags = ModelFlags{false, false, false};

    std::filesystem::create_directories(opt.out_dir);

    switch (cmd) {
        case Command::op: cmd_op(ctx); break;
        case Command::sweep_temp: cmd_sweep_temp(ctx); break;
        case Command::sweep_vdd: cmd_sweep_vdd(ctx); break;
        case Command::ls_ablation: cmd_ls_ablation(ctx); break;
        case Command::tc_vs_k: cmd_tc_vs_k(ctx); break;
        case Command::tc_vs_vdd: cmd_tc_vs_vdd(ctx); break;
        case Command::m15_study: cmd_m15_study(ctx); break;
        case Command::psrr: cmd_psrr(ctx); break;
        case Command::corners: cmd_corners(ctx); break;
        case Command::monte_carlo: cmd_monte_carlo(ctx); break;
        case Command::trim: cmd_trim(ctx); break;
        case Command::check_analytic: cmd_check_analytic(ctx); break;
    }

    report.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}  // namespace vref
