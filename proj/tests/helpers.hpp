#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vref/circuit.hpp"
#include "vref/config.hpp"
#include "vref/rng.hpp"

namespace test {

inline vref::ToolConfig default_config() {
    static const vref::ToolConfig cfg =
        vref::load_config(std::filesystem::path(VREF_CONFIG_DIR) / "generic180.json");
    return cfg;
}

/// Uniform draw in [lo, hi] from the deterministic test stream.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed, std::uint64_t run = 0) : stream_(seed, run) {}
    double operator()(double lo, double hi) {
        // Fold a normal through the error function for a stable uniform.
        const double z = stream_.next();
        const double u = 0.5 * (1.0 + std::erf(z / std::sqrt(2.0)));
        return lo + (hi - lo) * u;
    }

private:
    vref::NormalStream stream_;
};

inline vref::DeviceClassParams thin_class(double mu, double n) {
    return {vref::OxideClass::thin, mu, n};
}
inline vref::DeviceClassParams thick_class(double mu, double n) {
    return {vref::OxideClass::thick, mu, n};
}

/// Random but well-conditioned stage-2 configuration for oracle sweeps.
inline vref::Stage2Config random_stage2(Uniform& u) {
    vref::Stage2Config s2;
    const auto thin = thin_class(u(100e-6, 500e-6), u(1.1, 1.35));
    const auto thick = thick_class(u(50e-6, 95e-6), u(1.4, 1.7));
    const double vth_thin = u(0.35, 0.5);
    const double dvth12 = u(0.015, 0.05);  // keeps the PTAT pair conducting
    s2.m1 = {thin, u(0.5e-6, 3e-6), u(5e-6, 25e-6), 1, vth_thin + dvth12, u(-1.0e-3, -0.5e-3), 0.0, 0.0};
    s2.m2 = {thin, u(10e-6, 60e-6), u(2e-6, 8e-6), 1, vth_thin, u(-1.0e-3, -0.5e-3), 0.0, 0.0};
    s2.m3 = {thick, u(20e-6, 80e-6), u(0.5e-6, 2e-6), 1, u(0.55, 0.68), u(-1.3e-3, -0.8e-3), 0.0, 0.0};
    s2.m4 = {thin, u(10e-6, 40e-6), u(5e-6, 25e-6), 1, vth_thin, u(-1.0e-3, -0.5e-3), 0.0, 0.0};
    return s2;
}

/// Random stage-1 configuration with a conducting operating window.
inline vref::Stage1Config random_stage1(Uniform& u) {
    vref::Stage1Config s1;
    const auto thin = thin_class(u(150e-6, 450e-6), u(1.1, 1.35));
    const auto thick = thick_class(u(50e-6, 95e-6), u(1.4, 1.7));
    s1.m11 = {thick, u(0.5e-6, 3e-6), u(0.5e-6, 2e-6), 1, u(0.55, 0.68), u(-1.2e-3, -0.8e-3), 0.0, 0.0};
    s1.m12 = {thin, u(5e-6, 30e-6), u(0.15e-6, 0.5e-6), 1, u(0.38, 0.46), u(-0.9e-3, -0.6e-3), 0.0, 0.0};
    s1.m13 = {thick, u(2e-6, 8e-6), u(0.3e-6, 1e-6), 1, u(0.58, 0.68), u(-1.2e-3, -0.8e-3), 0.0, 0.0};
    s1.m14 = {thick, u(0.15e-6, 0.5e-6), u(10e-6, 30e-6), 1, u(0.38, 0.45), u(-1.8e-3, -1.2e-3), 0.0, 0.0};
    s1.m15 = {thin, u(30e-6, 90e-6), u(0.2e-6, 0.5e-6), 3, u(0.40, 0.46), u(-0.9e-3, -0.6e-3), 0.0, 0.0};
    return s1;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace test
