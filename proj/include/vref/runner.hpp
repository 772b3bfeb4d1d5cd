#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vref/config.hpp"

namespace vref {

enum class Command {
    op,
    sweep_temp,
    sweep_vdd,
    ls_ablation,
    tc_vs_k,
    tc_vs_vdd,
    m15_study,
    psrr,
    corners,
    monte_carlo,
    trim,
    check_analytic,
};

const char* command_name(Command c);
std::optional<Command> command_from_name(const std::string& name);

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> corner;
    std::optional<int> trim_code;
    bool no_stage1 = false;
    bool ideal_model = false;
    std::optional<double> vdd;
    std::optional<double> temp_c;
    std::optional<int> runs;
    int threads = 1;
};

struct RunReport {
    std::string command;
    std::string config_digest;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> warnings;
    std::vector<std::string> files;  // every artifact written
    std::vector<std::string> summary;
    double duration_s = 0.0;
    bool ok = true;

    std::string text() const;
};

/// Execute one command: deterministic CSV artifacts plus a summary.
/// Exceptions propagate to the caller (the CLI maps them to exit codes).
RunReport run_command(const ToolConfig& cfg, Command cmd, const RunOptions& opt);

}  // namespace vref
