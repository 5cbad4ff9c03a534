#pragma once

// Physical constants and unit conversions. Internally everything is in
// atomic units (hartree, bohr, electron mass); energies cross the public
// interfaces in kelvin.

namespace coldcc::units {

inline constexpr double kHartreeToKelvin = 315775.02480407;
inline constexpr double kKelvinToHartree = 1.0 / kHartreeToKelvin;
inline constexpr double kKelvinToWavenumber = 0.69503480;  // cm^-1 per K
inline constexpr double kMHzToKelvin = 4.799243073e-5;

inline constexpr double kAmuToElectronMass = 1822.888486209;
inline constexpr double kBohrToCm = 0.529177210903e-8;
inline constexpr double kAuVelocityToCmPerS = 2.18769126364e8;

// Isotope masses (amu).
inline constexpr double kMassHelium3 = 3.0160293201;
inline constexpr double kMassOxygen17 = 16.99913175650;

inline constexpr double kMicroKelvin = 1e-6;

inline constexpr double to_hartree(double kelvin) { return kelvin * kKelvinToHartree; }
inline constexpr double to_kelvin(double hartree) { return hartree * kHartreeToKelvin; }

/// Reduced mass of two bodies, in amu.
inline constexpr double reduced_mass(double m1, double m2) { return m1 * m2 / (m1 + m2); }

}  // namespace coldcc::units
