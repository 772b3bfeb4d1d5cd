#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vref/analysis.hpp"
#include "vref/analytic.hpp"
#include "vref/smallsignal.hpp"
#include "vref/variation.hpp"

namespace vref {

struct SweepDefaults {
    double temp_min_c = 0.0;
    double temp_max_c = 80.0;
    double temp_step_c = 1.0;
    double vdd_min_v = 0.4;
    double vdd_max_v = 2.0;
    double vdd_step_v = 0.01;
};

struct PsrrSettings {
    double f_min_hz = 1.0;
    double f_max_hz = 1e10;
    int points_per_decade = 20;
    double vdd_v = 1.0;
};

struct FitSettings {
    double x_lo = 0.57;
    double x_hi = 0.85;
    int samples = 1000;
};

struct PtatStudySettings {
    double supply_v = 1.2;
    std::vector<double> ratios{0.4, 0.8, 1.6};
};

struct TrimSweepSettings {
    double temp_min_c = -10.0;
    double temp_max_c = 85.0;
    double temp_step_c = 5.0;
    int nominal_code = 4;
};

/// Fully resolved tool configuration: circuit in SI units, study settings,
/// and a digest of the resolved state.
struct ToolConfig {
    std::string name;
    CircuitConfig circuit;
    std::vector<CornerSpec> corners;
    McConfig mc;
    CapSpec caps;
    SweepDefaults sweeps;
    PsrrSettings psrr;
    FitSettings fit;
    KSearchSettings ksearch;
    std::vector<M15Point> m15_lengths;
    PtatStudySettings ptat;
    TrimSweepSettings trim_sweep;
    double lambda_long = 1e-3;      // V/V, long-channel DIBL default
    double loading_bound_v = 0.01;  // documented |dv_o| bound for loading neglect
    double vdd_nominal = 0.4;
    double temp_nominal_c = 25.0;
    LinFit refit;                   // linearization refit, resolved at load
    bool m12_lambda_auto = false;   // M12 DIBL factor derived from the fit
    std::string digest;

    const CornerSpec* corner(const std::string& name) const;
};

/// Parse, validate (schema + units + wire_check) and resolve a parameter
/// file. Unknown keys and constraint violations raise ConfigError with the
/// offending key path; a missing file raises Error.
ToolConfig load_config(const std::filesystem::path& path);
ToolConfig parse_config(const std::string& text, const std::string& source_name);

}  // namespace vref
