#pragma once

#include <numbers>

namespace hcav::constants {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double planck = 6.62607015e-34;           // J s
inline constexpr double hbar = planck / (2.0 * pi);        // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double debye = 3.33564e-30;               // C m

inline constexpr double joule_to_micro_ev = 1.0 / elementary_charge * 1e6;

/// c expressed in um * THz, so that f[THz] = c_um_thz / lambda[um].
inline constexpr double c_um_thz = speed_of_light * 1e-6;

/// Planck constant in ueV per THz.
inline constexpr double h_ueV_per_THz = planck * 1e12 * joule_to_micro_ev;

}  // namespace hcav::constants
