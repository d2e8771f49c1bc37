#pragma once

// Internal unit system: time in microseconds, distance in nm, magnetic field
// in Gauss, angular frequencies in rad/us.  Frequencies cross the API
// boundary in MHz (ordinary, not angular); conversions happen at the edges.

namespace axy {

inline constexpr double pi = 3.14159265358979323846;

// gyromagnetic ratios, rad/us/G
inline constexpr double gamma_electron = 17.6085962784;
inline constexpr double gamma_c13 = 6.728284e-3;

// mu0 hbar gamma_e gamma_c13 / (4 pi), rad/us * nm^3 : electron-nuclear
// dipolar (hyperfine) prefactor for a point dipole at distance r nm.
inline constexpr double hyperfine_prefactor = 0.124941;

// mu0 hbar gamma_c13^2 / (4 pi), rad/us * nm^3 : carbon-carbon dipolar prefactor.
inline constexpr double cc_dipolar_prefactor = 4.77402e-5;

// diamond conventional cubic cell, nm; nearest-neighbour bond = cell*sqrt(3)/4
inline constexpr double diamond_cell = 0.357;
inline constexpr double c13_natural_abundance = 0.011;

inline constexpr double mhz_to_rad_us = 2.0 * pi;   // 1 MHz = 2*pi rad/us

}  // namespace axy
