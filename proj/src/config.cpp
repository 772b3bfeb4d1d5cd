#include "vref/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vref/errors.hpp"

namespace vref {

namespace {

using nlohmann::json;

// Scale factors from file units to SI.
constexpr double um = 1e-6;
constexpr double mv = 1e-3;
constexpr double ua_per_v2 = 1e-6;
constexpr double ff_per_um2 = 1e-3;  // fF/um^2 -> F/m^2
constexpr double mv_um = 1e-9;       // mV*um  -> V*m
constexpr double uv = 1e-6;
constexpr double ff = 1e-15;

/// Checked accessor for one JSON object level. Collects issues with full
/// key paths and rejects keys that are not consumed.
class Reader {
public:
    Reader(const json& j, std::string path, std::vector<std::string>& issues)
        : j_(j), path_(std::move(path)), issues_(issues) {
        if (!j_.is_object()) issues_.push_back(path_ + ": expected an object");
    }

    bool has(const std::string& key) {
        return j_.is_object() && j_.contains(key);
    }

    double num(const std::string& key, double scale = 1.0) {
        mark(key);
        if (!has(key)) {
            issues_.push_back(path_ + "." + key + ": missing required number");
            return 0.0;
        }
        const json& v = j_.at(key);
        if (!v.is_number()) {
            issues_.push_back(path_ + "." + key + ": expected a number");
            return 0.0;
        }
        return v.get<double>() * scale;
    }

    double num_or(const std::string& key, double fallback, double scale = 1.0) {
        if (!has(key)) {
            mark(key);
            return fallback;
        }
        return num(key, scale);
    }

    int integer(const std::string& key, int fallback) {
        mark(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) {
            issues_.push_back(path_ + "." + key + ": expected an integer");
            return fallback;
        }
        return v.get<int>();
    }

    bool flag(const std::string& key, bool fallback) {
        mark(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) {
            issues_.push_back(path_ + "." + key + ": expected a boolean");
            return fallback;
        }
        return v.get<bool>();
    }

    std::string str(const std::string& key) {
        mark(key);
        if (!has(key)) {
            issues_.push_back(path_ + "." + key + ": missing required string");
            return {};
        }
        const json& v = j_.at(key);
        if (!v.is_string()) {
            issues_.push_back(path_ + "." + key + ": expected a string");
            return {};
        }
        return v.get<std::string>();
    }

    const json* child(const std::string& key) {
        mark(key);
        if (!has(key)) return nullptr;
        return &j_.at(key);
    }

    std::string keypath(const std::string& key) const { return path_ + "." + key; }

    /// Reject unconsumed keys.
    void finish() {
        if (!j_.is_object()) return;
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                issues_.push_back(path_ + "." + item.key() + ": unknown key");
    }

private:
    void mark(const std::string& key) { seen_.insert(key); }
    const json& j_;
    std::string path_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

struct TransistorEntry {
    TransistorParams params;
    bool lambda_auto = false;
};

TransistorEntry read_transistor(const json& j, const std::string& path,
                                const DeviceClassParams& thin, const DeviceClassParams& thick,
                                std::vector<std::string>& issues) {
    Reader r(j, path, issues);
    TransistorEntry e;
    const std::string cls = r.str("class");
    if (cls == "thin")
        e.params.cls = thin;
    else if (cls == "thick")
        e.params.cls = thick;
    else
        issues.push_back(path + ".class: must be \"thin\" or \"thick\"");

    e.params.w = r.num("w_um", um);
    e.params.l = r.num("l_um", um);
    e.params.mult = r.integer("mult", 1);
    e.params.vth0 = r.num("vth0_mv", mv);
    e.params.alpha = r.num("alpha_mv_c", mv);
    e.params.delta_gidl = r.num_or("delta_gidl", 0.0);

    if (r.has("lambda_d_mv_v") && j.at("lambda_d_mv_v").is_string()) {
        const std::string s = r.str("lambda_d_mv_v");
        if (s == "auto")
            e.lambda_auto = true;
        else
            issues.push_back(path + ".lambda_d_mv_v: number or \"auto\"");
    } else {
        e.params.lambda_d = r.num("lambda_d_mv_v", mv);
    }

    if (!(e.params.w > 0.0)) issues.push_back(path + ".w_um: must be > 0");
    if (!(e.params.l > 0.0)) issues.push_back(path + ".l_um: must be > 0");
    if (e.params.mult < 1) issues.push_back(path + ".mult: must be >= 1");
    if (!(e.params.alpha < 0.0)) issues.push_back(path + ".alpha_mv_c: must be negative");
    if (e.params.lambda_d < 0.0) issues.push_back(path + ".lambda_d_mv_v: must be >= 0");
    r.finish();
    return e;
}

CornerSpec read_corner(const json& j, const std::string& name, const std::string& path,
                       std::vector<std::string>& issues) {
    Reader r(j, path, issues);
    CornerSpec c;
    c.name = name;
    c.dvth_thin = r.num("dvth_thin_mv", mv);
    c.dvth_thick = r.num("dvth_thick_mv", mv);
    c.mu_scale_thin = r.num("mu_scale_thin");
    c.mu_scale_thick = r.num("mu_scale_thick");
    if (!(c.mu_scale_thin > 0.0)) issues.push_back(path + ".mu_scale_thin: must be > 0");
    if (!(c.mu_scale_thick > 0.0)) issues.push_back(path + ".mu_scale_thick: must be > 0");
    r.finish();
    return c;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json transistor_json(const TransistorParams& t) {
    return json{{"class", t.cls.oxide_class == OxideClass::thin ? "thin" : "thick"},
                {"mu_cox", t.cls.mu_cox},
                {"n", t.cls.n},
                {"w", t.w},
                {"l", t.l},
                {"mult", t.mult},
                {"vth0", t.vth0},
                {"alpha", t.alpha},
                {"lambda_d", t.lambda_d},
                {"delta_gidl", t.delta_gidl}};
}

std::string canonical_dump(const ToolConfig& tc) {
    // nlohmann objects keep sorted keys, so dump() is canonical.
    json j;
    j["name"] = tc.name;
    j["t0"] = tc.circuit.t0;
    const CircuitConfig& c = tc.circuit;
    j["transistors"] = {{"m1", transistor_json(c.stage2.m1)},
                        {"m2", transistor_json(c.stage2.m2)},
                        {"m3", transistor_json(c.stage2.m3)},
                        {"m4", transistor_json(c.stage2.m4)},
                        {"m11", transistor_json(c.stage1.m11)},
                        {"m12", transistor_json(c.stage1.m12)},
                        {"m13", transistor_json(c.stage1.m13)},
                        {"m14", transistor_json(c.stage1.m14)},
                        {"m15", transistor_json(c.stage1.m15)}};
    if (c.trim)
        j["trim"] = {{"w3_base", c.trim->w3_base},
                     {"w3_bits", c.trim->w3_bits},
                     {"code", c.trim->code}};
    j["flags"] = {{"drain_factor", c.flags.drain_factor},
                  {"dibl", c.flags.dibl},
                  {"stage2_loading", c.flags.stage2_loading}};
    j["solver"] = {{"tol_v", c.solver.tol_v},
                   {"tol_rel_i", c.solver.tol_rel_i},
                   {"max_iter", c.solver.max_iter}};
    j["supply"] = {{"vdd_min", c.vdd_min}, {"vdd_max", c.vdd_max},
                   {"vdd_nominal", tc.vdd_nominal}, {"temp_nominal_c", tc.temp_nominal_c}};
    json corners = json::object();
    for (const auto& cs : tc.corners)
        corners[cs.name] = {{"dvth_thin", cs.dvth_thin},
                            {"dvth_thick", cs.dvth_thick},
                            {"mu_thin", cs.mu_scale_thin},
                            {"mu_thick", cs.mu_scale_thick}};
    j["corners"] = corners;
    j["mc"] = {{"seed", tc.mc.seed},         {"runs", tc.mc.runs},
               {"sigma_vth", tc.mc.sigma_vth_global}, {"a_vt", tc.mc.a_vt},
               {"sigma_mu", tc.mc.sigma_mu_rel},      {"temp_step", tc.mc.temp_step_c},
               {"vdd_step", tc.mc.vdd_step_v}};
    j["caps"] = {{"thin", tc.caps.c_gate_thin},
                 {"thick", tc.caps.c_gate_thick},
                 {"c2_fraction", tc.caps.c2_fraction},
                 {"c1", tc.caps.c1 ? json(*tc.caps.c1) : json()},
                 {"c2", tc.caps.c2 ? json(*tc.caps.c2) : json()},
                 {"c3", tc.caps.c3 ? json(*tc.caps.c3) : json()},
                 {"c4", tc.caps.c4 ? json(*tc.caps.c4) : json()}};
    j["sweeps"] = {{"tmin", tc.sweeps.temp_min_c}, {"tmax", tc.sweeps.temp_max_c},
                   {"tstep", tc.sweeps.temp_step_c}, {"vmin", tc.sweeps.vdd_min_v},
                   {"vmax", tc.sweeps.vdd_max_v},   {"vstep", tc.sweeps.vdd_step_v}};
    j["psrr"] = {{"fmin", tc.psrr.f_min_hz},
                 {"fmax", tc.psrr.f_max_hz},
                 {"ppd", tc.psrr.points_per_decade},
                 {"vdd", tc.psrr.vdd_v}};
    j["fit"] = {{"lo", tc.fit.x_lo}, {"hi", tc.fit.x_hi}, {"samples", tc.fit.samples}};
    j["ksearch"] = {{"kmin", tc.ksearch.k_min},
                    {"kmax", tc.ksearch.k_max},
                    {"points", tc.ksearch.points},
                    {"tol", tc.ksearch.golden_tol_rel}};
    json m15 = json::array();
    for (const auto& p : tc.m15_lengths) m15.push_back({{"l", p.l}, {"lambda", p.lambda_d}});
    j["m15_study"] = m15;
    j["ptat_study"] = {{"supply", tc.ptat.supply_v}, {"ratios", tc.ptat.ratios}};
    j["trim_sweep"] = {{"tmin", tc.trim_sweep.temp_min_c},
                       {"tmax", tc.trim_sweep.temp_max_c},
                       {"tstep", tc.trim_sweep.temp_step_c},
                       {"nominal_code", tc.trim_sweep.nominal_code}};
    j["lambda_long"] = tc.lambda_long;
    j["loading_bound"] = tc.loading_bound_v;
    return j.dump();
}

}  // namespace

const CornerSpec* ToolConfig::corner(const std::string& name) const {
    for (const auto& c : corners)
        if (c.name == name) return &c;
    return nullptr;
}

ToolConfig parse_config(const std::string& text, const std::string& source_name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source_name + ": " + e.what());
    }

    std::vector<std::string> issues;
    Reader r(root, source_name, issues);
    ToolConfig tc;

    const int version = r.integer("format_version", 0);
    if (version != 1) issues.push_back(source_name + ".format_version: expected 1");
    tc.name = r.str("name");
    tc.circuit.t0 = kelvin(r.num_or("t0_c", 25.0));

    DeviceClassParams thin{OxideClass::thin, 0.0, 0.0};
    DeviceClassParams thick{OxideClass::thick, 0.0, 0.0};
    if (const json* classes = r.child("device_classes")) {
        Reader rc(*classes, r.keypath("device_classes"), issues);
        if (const json* jt = rc.child("thin")) {
            Reader rt(*jt, rc.keypath("thin"), issues);
            thin.mu_cox = rt.num("mu_cox_ua_v2", ua_per_v2);
            thin.n = rt.num("n");
            rt.finish();
        } else {
            issues.push_back(source_name + ".device_classes.thin: missing");
        }
        if (const json* jt = rc.child("thick")) {
            Reader rt(*jt, rc.keypath("thick"), issues);
            thick.mu_cox = rt.num("mu_cox_ua_v2", ua_per_v2);
            thick.n = rt.num("n");
            rt.finish();
        } else {
            issues.push_back(source_name + ".device_classes.thick: missing");
        }
        rc.finish();
    } else {
        issues.push_back(source_name + ".device_classes: missing");
    }
    for (const auto* c : {&thin, &thick}) {
        const char* nm = c->oxide_class == OxideClass::thin ? "thin" : "thick";
        if (!(c->mu_cox > 0.0))
            issues.push_back(source_name + ".device_classes." + nm + ".mu_cox_ua_v2: must be > 0");
        if (!(c->n > 1.0))
            issues.push_back(source_name + ".device_classes." + nm + ".n: must be > 1");
    }

    bool m12_auto = false;
    if (const json* jt = r.child("transistors")) {
        Reader rt(*jt, r.keypath("transistors"), issues);
        auto read = [&](const char* name, TransistorParams& dst, bool* auto_flag = nullptr) {
            if (const json* jd = rt.child(name)) {
                TransistorEntry e = read_transistor(*jd, rt.keypath(name), thin, thick, issues);
                dst = e.params;
                if (auto_flag) *auto_flag = e.lambda_auto;
                else if (e.lambda_auto)
                    issues.push_back(rt.keypath(name) +
                                     ".lambda_d_mv_v: \"auto\" is only supported on m12");
            } else {
                issues.push_back(rt.keypath(name) + ": missing transistor entry");
            }
        };
        read("m1", tc.circuit.stage2.m1);
        read("m2", tc.circuit.stage2.m2);
        read("m3", tc.circuit.stage2.m3);
        read("m4", tc.circuit.stage2.m4);
        read("m11", tc.circuit.stage1.m11);
        read("m12", tc.circuit.stage1.m12, &m12_auto);
        read("m13", tc.circuit.stage1.m13);
        read("m14", tc.circuit.stage1.m14);
        read("m15", tc.circuit.stage1.m15);
        rt.finish();
    } else {
        issues.push_back(source_name + ".transistors: missing");
    }

    if (const json* jt = r.child("trim")) {
        Reader rt(*jt, r.keypath("trim"), issues);
        TrimNetwork trim;
        trim.w3_base = rt.num("w3_base_um", um);
        if (const json* bits = rt.child("w3_bits_um")) {
            if (!bits->is_array())
                issues.push_back(rt.keypath("w3_bits_um") + ": expected an array");
            else
                for (const auto& b : *bits) {
                    if (!b.is_number()) {
                        issues.push_back(rt.keypath("w3_bits_um") + ": expected numbers");
                        break;
                    }
                    trim.w3_bits.push_back(b.get<double>() * um);
                }
        } else {
            issues.push_back(rt.keypath("w3_bits_um") + ": missing");
        }
        trim.code = rt.integer("code", 0);
        tc.circuit.trim = trim;
        rt.finish();
    }

    if (const json* jf = r.child("model_flags")) {
        Reader rf(*jf, r.keypath("model_flags"), issues);
        tc.circuit.flags.drain_factor = rf.flag("drain_factor", true);
        tc.circuit.flags.dibl = rf.flag("dibl", true);
        tc.circuit.flags.stage2_loading = rf.flag("stage2_loading", true);
        rf.finish();
    }

    if (const json* js = r.child("solver")) {
        Reader rs(*js, r.keypath("solver"), issues);
        tc.circuit.solver.tol_v = rs.num_or("tol_v_uv", 0.1, uv);
        tc.circuit.solver.tol_rel_i = rs.num_or("tol_rel_i", 1e-9);
        tc.circuit.solver.max_iter = rs.integer("max_iter", 100);
        if (!(tc.circuit.solver.tol_v > 0.0))
            issues.push_back(rs.keypath("tol_v_uv") + ": must be > 0");
        if (tc.circuit.solver.max_iter < 1)
            issues.push_back(rs.keypath("max_iter") + ": must be >= 1");
        rs.finish();
    }

    if (const json* js = r.child("supply")) {
        Reader rs(*js, r.keypath("supply"), issues);
        tc.circuit.vdd_min = rs.num_or("vdd_min_v", 0.4);
        tc.circuit.vdd_max = rs.num_or("vdd_max_v", 2.0);
        tc.vdd_nominal = rs.num_or("vdd_nominal_v", tc.circuit.vdd_min);
        tc.temp_nominal_c = rs.num_or("temp_nominal_c", 25.0);
        rs.finish();
    }

    if (const json* jc = r.child("corners")) {
        if (!jc->is_object()) {
            issues.push_back(r.keypath("corners") + ": expected an object");
        } else {
            for (const auto& item : jc->items())
                tc.corners.push_back(read_corner(item.value(), item.key(),
                                                 r.keypath("corners") + "." + item.key(),
                                                 issues));
            const CornerSpec* tt = tc.corner("TT");
            if (!tt) {
                issues.push_back(r.keypath("corners") + ": must define TT");
            } else if (tt->dvth_thin != 0.0 || tt->dvth_thick != 0.0 ||
                       tt->mu_scale_thin != 1.0 || tt->mu_scale_thick != 1.0) {
                issues.push_back(r.keypath("corners") +
                                 ".TT: must be all-zero shifts and unit scales");
            }
        }
    }

    if (const json* jm = r.child("mc")) {
        Reader rm(*jm, r.keypath("mc"), issues);
        tc.mc.seed = static_cast<std::uint64_t>(rm.num_or("seed", 1.0));
        tc.mc.runs = rm.integer("runs", 1000);
        tc.mc.sigma_vth_global = rm.num_or("sigma_vth_global_mv", 0.0, mv);
        tc.mc.a_vt = rm.num_or("a_vt_mv_um", 0.0, mv_um);
        tc.mc.sigma_mu_rel = rm.num_or("sigma_mu_rel", 0.0);
        tc.mc.temp_step_c = rm.num_or("temp_step_c", 5.0);
        tc.mc.vdd_step_v = rm.num_or("vdd_step_v", 0.1);
        if (tc.mc.runs < 1) issues.push_back(rm.keypath("runs") + ": must be >= 1");
        if (tc.mc.sigma_vth_global < 0.0)
            issues.push_back(rm.keypath("sigma_vth_global_mv") + ": must be >= 0");
        if (tc.mc.a_vt < 0.0) issues.push_back(rm.keypath("a_vt_mv_um") + ": must be >= 0");
        if (tc.mc.sigma_mu_rel < 0.0)
            issues.push_back(rm.keypath("sigma_mu_rel") + ": must be >= 0");
        rm.finish();
    }

    if (const json* jc = r.child("caps")) {
        Reader rc(*jc, r.keypath("caps"), issues);
        tc.caps.c_gate_thin = rc.num_or("c_gate_thin_ff_um2", 0.0, ff_per_um2);
        tc.caps.c_gate_thick = rc.num_or("c_gate_thick_ff_um2", 0.0, ff_per_um2);
        tc.caps.c2_fraction = rc.num_or("c2_fraction", 1e-4);
        if (rc.has("c1_ff")) tc.caps.c1 = rc.num("c1_ff", ff);
        if (rc.has("c2_ff")) tc.caps.c2 = rc.num("c2_ff", ff);
        if (rc.has("c3_ff")) tc.caps.c3 = rc.num("c3_ff", ff);
        if (rc.has("c4_ff")) tc.caps.c4 = rc.num("c4_ff", ff);
        rc.finish();
    }

    if (const json* js = r.child("sweeps")) {
        Reader rs(*js, r.keypath("sweeps"), issues);
        tc.sweeps.temp_min_c = rs.num_or("temp_min_c", 0.0);
        tc.sweeps.temp_max_c = rs.num_or("temp_max_c", 80.0);
        tc.sweeps.temp_step_c = rs.num_or("temp_step_c", 1.0);
        tc.sweeps.vdd_min_v = rs.num_or("vdd_min_v", tc.circuit.vdd_min);
        tc.sweeps.vdd_max_v = rs.num_or("vdd_max_v", tc.circuit.vdd_max);
        tc.sweeps.vdd_step_v = rs.num_or("vdd_step_v", 0.01);
        if (!(tc.sweeps.temp_step_c > 0.0))
            issues.push_back(rs.keypath("temp_step_c") + ": must be > 0");
        if (!(tc.sweeps.vdd_step_v > 0.0))
            issues.push_back(rs.keypath("vdd_step_v") + ": must be > 0");
        rs.finish();
    }

    if (const json* jp = r.child("psrr")) {
        Reader rp(*jp, r.keypath("psrr"), issues);
        tc.psrr.f_min_hz = rp.num_or("f_min_hz", 1.0);
        tc.psrr.f_max_hz = rp.num_or("f_max_hz", 1e10);
        tc.psrr.points_per_decade = rp.integer("points_per_decade", 20);
        tc.psrr.vdd_v = rp.num_or("vdd_v", 1.0);
        rp.finish();
    }

    if (const json* jf = r.child("fit")) {
        Reader rf(*jf, r.keypath("fit"), issues);
        tc.fit.x_lo = rf.num_or("x_lo", 0.57);
        tc.fit.x_hi = rf.num_or("x_hi", 0.85);
        tc.fit.samples = rf.integer("samples", 1000);
        rf.finish();
    }

    if (const json* jk = r.child("k_search")) {
        Reader rk(*jk, r.keypath("k_search"), issues);
        tc.ksearch.k_min = rk.num_or("k_min", 2.0);
        tc.ksearch.k_max = rk.num_or("k_max", 6.0);
        tc.ksearch.points = rk.integer("points", 41);
        tc.ksearch.golden_tol_rel = rk.num_or("golden_tol_rel", 1e-4);
        rk.finish();
    }

    if (const json* jm = r.child("m15_study")) {
        if (!jm->is_array()) {
            issues.push_back(r.keypath("m15_study") + ": expected an array");
        } else {
            int idx = 0;
            for (const auto& item : *jm) {
                Reader ri(item, r.keypath("m15_study") + "[" + std::to_string(idx) + "]", issues);
                M15Point p;
                p.l = ri.num("l_um", um);
                p.lambda_d = ri.num("lambda_d_mv_v", mv);
                ri.finish();
                tc.m15_lengths.push_back(p);
                ++idx;
            }
        }
    }

    if (const json* jp = r.child("ptat_study")) {
        Reader rp(*jp, r.keypath("ptat_study"), issues);
        tc.ptat.supply_v = rp.num_or("supply_v", 1.2);
        if (const json* ratios = rp.child("ratios")) {
            tc.ptat.ratios.clear();
            for (const auto& v : *ratios) tc.ptat.ratios.push_back(v.get<double>());
        }
        rp.finish();
    }

    if (const json* jt = r.child("trim_sweep")) {
        Reader rt(*jt, r.keypath("trim_sweep"), issues);
        tc.trim_sweep.temp_min_c = rt.num_or("temp_min_c", -10.0);
        tc.trim_sweep.temp_max_c = rt.num_or("temp_max_c", 85.0);
        tc.trim_sweep.temp_step_c = rt.num_or("temp_step_c", 5.0);
        tc.trim_sweep.nominal_code = rt.integer("nominal_code", 4);
        rt.finish();
    }

    tc.lambda_long = r.num_or("lambda_long_channel_mv_v", 1.0, mv);
    tc.loading_bound_v = r.num_or("loading_bound_mv", 10.0, mv);
    r.finish();

    if (!issues.empty()) throw ConfigError(issues);

    // Resolve the linearization refit and, when requested, the M12 DIBL
    // factor derived from it.
    tc.refit = fit_log_complement(tc.fit.x_lo, tc.fit.x_hi, tc.fit.samples);
    tc.m12_lambda_auto = m12_auto;
    if (m12_auto) {
        const double n_r = tc.circuit.stage1.m14.cls.n / tc.circuit.stage1.m15.cls.n;
        tc.circuit.stage1.m12.lambda_d =
            compensated_lambda_m12(tc.circuit.stage1.m15.lambda_d, n_r, tc.refit.c1);
    }

    const Diagnostics diag = wire_check(tc.circuit);
    if (!diag.ok()) throw ConfigError(diag.errors);

    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_dump(tc))));
    tc.digest = buf;
    return tc;
}

ToolConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open config file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.filename().string());
}

}  // namespace vref
