#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "vref/circuit.hpp"

namespace vref {

/// Capacitance model. Gate caps are estimated as c_gate*W*L*mult per device
/// and split half to source, half to drain; c2 (the v_REF-to-vdd routing
/// parasitic) defaults to a fixed fraction of c1. Explicit overrides win.
struct CapSpec {
    double c_gate_thin = 0.0;   // F/m^2
    double c_gate_thick = 0.0;  // F/m^2
    double c2_fraction = 1e-4;
    std::optional<double> c1, c2, c3, c4;  // F, absolute overrides
};

/// Linearization of the solved circuit at an operating point.
struct AcParams {
    SmallSignal m1, m2, m3, m4;
    SmallSignal m11, m12, m13, m14, m15;
    double c1 = 0.0;  // v_ref -> gnd
    double c2 = 0.0;  // v_ref -> vdd
    double c3 = 0.0;  // v_o   -> gnd
    double c4 = 0.0;  // v_o   -> vdd
    double r_o2() const;
    double r_o4() const;
};

AcParams extract_ac(const CircuitConfig& cfg, const OperatingPoint& op, const CapSpec& caps);

/// Rational transfer function in s, ascending coefficients.
struct RationalTf {
    std::vector<double> num;
    std::vector<double> den;
    std::vector<std::complex<double>> zeros;
    std::vector<std::complex<double>> poles;
    double dc_gain = 0.0;
    bool dimensional_warning = false;  // set on the as-printed reported form
    bool trivial_zero = false;         // numerator identically zero

    std::complex<double> eval(std::complex<double> s) const;
    double magnitude_db(double freq_hz) const;
    /// Max relative residual of num/den evaluated at the stored roots.
    double root_check_residual() const;
};

/// The literature-reported two-pole/two-zero product form. Its constant
/// term mixes a resistance with a dimensionless unit; the result carries
/// dimensional_warning and is for comparison output only.
RationalTf psrr_reported_form(const AcParams& ac);

/// Transfer function of the reduced two-node (v_O, v_REF) network, the same
/// model psrr_numeric solves. V_X and V_PTAT carry no capacitance, so they
/// are eliminated exactly and independently of frequency.
RationalTf psrr_network_tf(const AcParams& ac, bool include_stage1);

/// Per-frequency complex nodal solve of the two-node network; |v_ref/v_dd|
/// in dB. Throws NumericalError on a singular nodal matrix.
std::vector<double> psrr_numeric(const AcParams& ac, const std::vector<double>& freq_hz,
                                 bool include_stage1);

std::vector<double> psrr_frequency_grid(double f_min, double f_max, int points_per_decade);

struct TfDeviation {
    double max_db = 0.0;
    double freq_hz = 0.0;
};

/// Worst-case |difference| between a transfer function's magnitude and a
/// numeric magnitude series over the same grid. Throws on an empty grid.
TfDeviation compare_tf(const RationalTf& tf, const std::vector<double>& freq_hz,
                       const std::vector<double>& mag_db);

}  // namespace vref
