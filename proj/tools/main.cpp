#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "vref/errors.hpp"
#include "vref/runner.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_config = 2;
constexpr int exit_convergence = 3;
constexpr int exit_numerical = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design and verification toolkit for a two-stage subthreshold voltage reference"};
    app.require_subcommand(1);

    std::string config_path = "configs/generic180.json";
    vref::RunOptions opt;
    std::string out_dir = "out";
    std::string corner;
    int trim_code = -1;
    std::uint64_t seed = 0;
    bool have_seed = false;
    double vdd = 0.0, temp_c = 0.0;
    bool have_vdd = false, have_temp = false;
    int runs = 0;

    app.add_option("--config", config_path, "Parameter file (JSON)")
        ->capture_default_str();
    app.add_option("--out-dir", out_dir, "Artifact directory")->capture_default_str();
    app.add_option("--seed", seed, "Override the Monte-Carlo seed")
        ->each([&](const std::string&) { have_seed = true; });
    app.add_option("--corner", corner, "Apply a named process corner");
    app.add_option("--trim-code", trim_code, "Trim code [0, 7]")
        ->check(CLI::Range(0, 7));
    app.add_flag("--no-stage1", opt.no_stage1, "Feed the TC stage directly from VDD");
    app.add_flag("--ideal-model", opt.ideal_model,
                 "Disable drain factor, DIBL and stage-2 loading");
    app.add_option("--vdd", vdd, "Supply voltage, V")
        ->each([&](const std::string&) { have_vdd = true; });
    app.add_option("--temp-c", temp_c, "Temperature, degC")
        ->each([&](const std::string&) { have_temp = true; });
    app.add_option("--runs", runs, "Override the Monte-Carlo run count")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", opt.threads, "Monte-Carlo worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    for (const char* name :
         {"op", "sweep-temp", "sweep-vdd", "ls-ablation", "tc-vs-k", "tc-vs-vdd", "m15-study",
          "psrr", "corners", "monte-carlo", "trim", "check-analytic"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    opt.out_dir = out_dir;
    if (!corner.empty()) opt.corner = corner;
    if (trim_code >= 0) opt.trim_code = trim_code;
    if (have_seed) opt.seed = seed;
    if (have_vdd) opt.vdd = vdd;
    if (have_temp) opt.temp_c = temp_c;
    if (runs > 0) opt.runs = runs;

    const std::string sub = app.get_subcommands().front()->get_name();
    const auto cmd = vref::command_from_name(sub);
    if (!cmd) {
        std::fprintf(stderr, "unknown command %s\n", sub.c_str());
        return exit_usage;
    }

    try {
        const vref::ToolConfig cfg = vref::load_config(config_path);
        const vref::RunReport report = vref::run_command(cfg, *cmd, opt);
        std::fputs(report.text().c_str(), stdout);
        return report.ok ? exit_ok : exit_numerical;
    } catch (const vref::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config;
    } catch (const vref::ConvergenceError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_convergence;
    } catch (const vref::NumericalError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_usage;
    }
}
