#pragma once

#include "vref/constants.hpp"

namespace vref {

enum class OxideClass { thin, thick };

/// Per-oxide-class model constants shared by every device of that class.
struct DeviceClassParams {
    OxideClass oxide_class = OxideClass::thin;
    double mu_cox = 0.0;  // transconductance density mu_n*C_ox, A/V^2
    double n = 1.0;       // subthreshold slope factor, > 1
};

/// One transistor: class constants plus geometry and threshold data.
struct TransistorParams {
    DeviceClassParams cls;
    double w = 0.0;           // m
    double l = 0.0;           // m
    int mult = 1;             // parallel devices
    double vth0 = 0.0;        // threshold at T0 and vds = 0, V
    double alpha = 0.0;       // threshold TC, V/K, negative
    double lambda_d = 0.0;    // DIBL factor, V/V
    double delta_gidl = 0.0;  // carried but never applied
};

/// Effective aspect ratio mult*W/L.
inline double aspect(const TransistorParams& d) { return d.mult * d.w / d.l; }

struct BiasPoint {
    double vgs = 0.0;          // V
    double vds = 0.0;          // V
    double temperature = 0.0;  // K
};

/// Model evaluation switches. The defaults give the full model; the ideal
/// model (both off) reduces the current to a pure exponential in vgs.
struct ModelOptions {
    double t0 = default_t0;
    bool drain_factor = true;  // (1 - exp(-vds/VT)) term
    bool dibl = true;          // lambda_d shift of the threshold
};

/// kB*T/q. Throws DomainError for non-positive temperature.
double thermal_voltage(double temperature);

/// vth0 + alpha*(T - T0) - lambda_d*vds (DIBL term subject to opts.dibl).
double threshold_voltage(const TransistorParams& dev, double temperature, double vds,
                         const ModelOptions& opts = {});

/// Subthreshold drain current. Throws DomainError for vds < 0: the topology
/// never reverse-biases a device, so a negative vds is a solver escape.
double drain_current(const TransistorParams& dev, const BiasPoint& bias,
                     const ModelOptions& opts = {});

struct SmallSignal {
    double gm = 0.0;   // S
    double gds = 0.0;  // S
};

/// Analytic derivatives of drain_current at the bias point.
/// gm = I_D/(n*VT); gds combines the DIBL term lambda*I_D/(n*VT) with the
/// drain-factor leakage term. Zero current gives gm = gds = 0.
SmallSignal small_signal(const TransistorParams& dev, const BiasPoint& bias,
                         const ModelOptions& opts = {});

}  // namespace vref
