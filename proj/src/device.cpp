#include "vref/device.hpp"

#include <cmath>

#include "vref/errors.hpp"

namespace vref {

double thermal_voltage(double temperature) {
    if (!(temperature > 0.0))
        throw DomainError("thermal_voltage: temperature must be > 0 K");
    return k_boltzmann * temperature / q_electron;
}

double threshold_voltage(const TransistorParams& dev, double temperature, double vds,
                         const ModelOptions& opts) {
    if (!(temperature > 0.0))
        throw DomainError("threshold_voltage: temperature must be > 0 K");
    double vth = dev.vth0 + dev.alpha * (temperature - opts.t0);
    if (opts.dibl) vth -= dev.lambda_d * vds;
    return vth;
}

namespace {

// Exponential prefactor A such that I_D = A * drain_factor(vds).
double current_prefactor(const TransistorParams& dev, const BiasPoint& bias,
                         const ModelOptions& opts, double vt) {
    const double vth = threshold_voltage(dev, bias.temperature, bias.vds, opts);
    return aspect(dev) * dev.cls.mu_cox * vt * vt *
           std::exp((bias.vgs - vth) / (dev.cls.n * vt));
}

}  // namespace

double drain_current(const TransistorParams& dev, const BiasPoint& bias,
                     const ModelOptions& opts) {
    if (bias.vds < 0.0)
        throw DomainError("drain_current: vds < 0 (reverse-biased device)");
    const double vt = thermal_voltage(bias.temperature);
    const double a = current_prefactor(dev, bias, opts, vt);
    const double drain_factor = opts.drain_factor ? -std::expm1(-bias.vds / vt) : 1.0;
    return a * drain_factor;
}

SmallSignal small_signal(const TransistorParams& dev, const BiasPoint& bias,
                         const ModelOptions& opts) {
    if (bias.vds < 0.0)
        throw DomainError("small_signal: vds < 0 (reverse-biased device)");
    const double vt = thermal_voltage(bias.temperature);
    const double nvt = dev.cls.n * vt;
    const double a = current_prefactor(dev, bias, opts, vt);
    const double drain_factor = opts.drain_factor ? -std::expm1(-bias.vds / vt) : 1.0;
    const double id = a * drain_factor;

    SmallSignal ss;
    ss.gm = id / nvt;
    ss.gds = 0.0;
    if (opts.dibl) ss.gds += dev.lambda_d * id / nvt;
    if (opts.drain_factor) ss.gds += a * std::exp(-bias.vds / vt) / vt;
    return ss;
}

}  // namespace vref
