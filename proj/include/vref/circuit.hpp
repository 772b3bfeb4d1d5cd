#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vref/solver.hpp"
#include "vref/topology.hpp"

namespace vref {

struct CircuitConfig {
    Stage1Config stage1;
    Stage2Config stage2;
    std::optional<TrimNetwork> trim;
    ModelFlags flags;
    SolverSettings solver;
    double t0 = default_t0;
    double vdd_min = 0.4;
    double vdd_max = 2.0;

    ModelOptions model_options() const { return {t0, flags.drain_factor, flags.dibl}; }
    /// Stage 2 with the trim code folded into the M3 width.
    Stage2Config effective_stage2() const;
};

struct Diagnostics {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

/// Structural validation: oxide classes, positive geometry, trim
/// monotonicity, minimum-supply representability. Never mutates.
Diagnostics wire_check(const CircuitConfig& cfg);

struct Stage2Solution {
    double v_ptat = 0.0;
    double v_ref = 0.0;
    double i_d1 = 0.0, i_d2 = 0.0, i_d3 = 0.0, i_d4 = 0.0;
    double residual = 0.0;
    bool degenerate = false;
    std::vector<std::string> warnings;
    /// Branch current drawn from the stage supply rail.
    double supply_draw() const { return i_d2 + i_d4; }
};

struct Stage1Solution {
    double v_x = 0.0;
    double v_o = 0.0;
    double i_d11 = 0.0, i_d12 = 0.0, i_d13 = 0.0, i_d14 = 0.0, i_d15 = 0.0;
    double load_current = 0.0;
    double residual = 0.0;
    std::vector<std::string> warnings;
};

/// Optional load on the stage-1 output node, amps as a function of v_o,
/// with its derivative for the Newton step.
struct LoadModel {
    std::function<double(double)> current;
    std::function<double(double)> dcurrent;
};

/// Solve the temperature-correction stage at a given supply.
/// V_PTAT balances M1 against M2, then V_REF balances M3 against M4; each
/// node is a bracketed bisection refined by damped Newton.
Stage2Solution solve_stage2(const Stage2Config& s2, double supply, double temperature,
                            const ModelOptions& opts, const SolverSettings& solver);

/// Solve the LS-correction stage. The V_X node is eliminated inside the V_O
/// iteration (each residual is strictly monotone in its own unknown), with
/// bisection as the fallback when a Newton step leaves the bracket.
Stage1Solution solve_stage1(const Stage1Config& s1, double vdd, double temperature,
                            const ModelOptions& opts, const SolverSettings& solver,
                            const LoadModel* load = nullptr);

/// The V_X node alone, for a prescribed V_O (M11 diode against M12).
double solve_vx_node(const Stage1Config& s1, double vdd, double v_o, double temperature,
                     const ModelOptions& opts, const SolverSettings& solver);

struct OperatingPoint {
    double vdd = 0.0;
    double temperature = 0.0;
    double v_x = 0.0, v_o = 0.0, v_ptat = 0.0, v_ref = 0.0;
    double i_d11 = 0.0, i_d12 = 0.0, i_d13 = 0.0, i_d14 = 0.0, i_d15 = 0.0;
    double i_d1 = 0.0, i_d2 = 0.0, i_d3 = 0.0, i_d4 = 0.0;
    double supply_current = 0.0;  // i_d12 + i_d15
    double residual = 0.0;        // max relative KCL error over all nodes
    bool degenerate = false;
    bool stage1_bypassed = false;
    std::vector<std::string> warnings;
    double power() const { return vdd * supply_current; }
};

/// Full two-stage solve. Stage-2 loading on V_O is included when
/// flags.stage2_loading is set. Supply current counts only the branches
/// that touch VDD (M12, M15).
OperatingPoint solve_full(const CircuitConfig& cfg, double vdd, double temperature);

/// Temperature-correction stage powered directly from VDD (no stage 1).
OperatingPoint solve_stage2_only(const CircuitConfig& cfg, double vdd, double temperature);

}  // namespace vref
