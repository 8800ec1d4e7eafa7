#pragma once

// Physical constants (CODATA 2018) and unit conversions used throughout.
namespace rydsim::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double epsilon0 = 8.8541878128e-12;      // F / m
inline constexpr double k_boltzmann = 1.380649e-23;       // J / K
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

// Atomic unit of electric dipole moment, e*a0.
inline constexpr double atomic_dipole = elementary_charge * bohr_radius;  // C m

inline constexpr double sodium_mass = 22.98976928 * atomic_mass_unit;  // kg

}  // namespace rydsim::constants
