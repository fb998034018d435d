#pragma once

#include <numbers>

namespace sivcav::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values, SI.
inline constexpr double c_light = 299792458.0;               // m/s
inline constexpr double planck_h = 6.62607015e-34;           // J s
inline constexpr double bohr_magneton = 9.2740100783e-24;    // J/T

// Zeeman coupling in frequency units, mu_B / h.
inline constexpr double bohr_magneton_hz_per_t = bohr_magneton / planck_h;  // ~13.996 GHz/T

}  // namespace sivcav::constants
