#pragma once

namespace vref {

// CODATA 2018 exact values.
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double q_electron = 1.602176634e-19;  // C

// Threshold-voltage reference temperature, 25 degC.
inline constexpr double default_t0 = 298.15;  // K

inline constexpr double kelvin(double celsius) { return celsius + 273.15; }
inline constexpr double celsius(double kelvin) { return kelvin - 273.15; }

}  // namespace vref
