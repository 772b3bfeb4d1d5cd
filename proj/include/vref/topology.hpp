#pragma once

#include <vector>

#include "vref/device.hpp"

namespace vref {

/// Temperature-correction stage. M1 diode-connected at V_PTAT, M2 source
/// follower with vgs = 0 feeding it from the stage supply; M3 thick-oxide
/// diode at V_REF, M4 thin-oxide device gated by V_PTAT feeding it.
struct Stage2Config {
    TransistorParams m1;  // thin
    TransistorParams m2;  // thin
    TransistorParams m3;  // thick
    TransistorParams m4;  // thin
};

/// Line-sensitivity correction stage. M11 diode at V_X, M12 gated by V_O
/// with drain at VDD; M13 gated by V_X with drain at V_O, M14 diode at V_O,
/// M15 vgs = 0 current source from VDD.
struct Stage1Config {
    TransistorParams m11;  // thick
    TransistorParams m12;  // thin
    TransistorParams m13;  // thick
    TransistorParams m14;  // thick
    TransistorParams m15;  // thin
};

/// 3-bit binary-weighted width trim on M3.
struct TrimNetwork {
    double w3_base = 0.0;          // m
    std::vector<double> w3_bits;   // m, binary-weighted, LSB first
    int code = 0;                  // [0, 7]

    double effective_width(int c) const {
        double w = w3_base;
        for (std::size_t i = 0; i < w3_bits.size(); ++i)
            if (c & (1 << i)) w += w3_bits[i];
        return w;
    }
    double effective_width() const { return effective_width(code); }
};

struct ModelFlags {
    bool drain_factor = true;
    bool dibl = true;
    bool stage2_loading = true;
};

}  // namespace vref
