#pragma once

#include <cmath>
#include <numbers>

// Physical constants (CODATA 2018) and the Rb-87 D1 defaults used throughout.
// Internally every rate and detuning is an angular frequency in rad/s; the
// conversion helpers below are used only at I/O boundaries.
namespace eit::constants {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double ln2 = std::numbers::ln2;

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double torr = 101325.0 / 760.0;       // Pa

inline constexpr double rb87_mass_u = 86.909180527;
inline constexpr double rb87_mass = rb87_mass_u * atomic_mass_unit;
inline constexpr double rb87_d1_wavelength = 795e-9;   // m, as quoted for the experiment

// Natural linewidth of the D1 line, Γ/(2π). Literature value; the lineshape
// formulas need it but the experiment description does not state it.
inline constexpr double rb87_d1_gamma_hz = 5.75e6;

// Reduced D1 matrix element <J=1/2||er||J'=1/2>, and the effective
// far-detuned (isotropic) dipole moment |d|/sqrt(3) used for Rabi maps.
inline constexpr double rb87_d1_reduced_dipole = 2.537e-29;  // C m
inline const double rb87_d1_effective_dipole = rb87_d1_reduced_dipole / std::sqrt(3.0);

}  // namespace eit::constants

namespace eit {

inline constexpr double hz_to_rad(double f) { return constants::two_pi * f; }
inline constexpr double rad_to_hz(double w) { return w / constants::two_pi; }

}  // namespace eit
