#ifndef MSP_CONSTANTS_HPP
#define MSP_CONSTANTS_HPP

#include <numbers>

/// Physical constants (CODATA 2018, SI) and the unit-boundary conversions
/// used at the I/O edge: meV, nm, K, cm^-2 and degrees outside, SI inside.
namespace msp::constants {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double e = 1.602176634e-19;         // C
inline constexpr double m0 = 9.1093837015e-31;       // kg
inline constexpr double eps0 = 8.8541878128e-12;     // F / m
inline constexpr double c = 299792458.0;             // m / s
inline constexpr double kB = 1.380649e-23;           // J / K

inline constexpr double meV = 1e-3 * e;              // J
inline constexpr double nm = 1e-9;                   // m
inline constexpr double per_cm2 = 1e4;               // cm^-2 -> m^-2

/// k_B in meV / K.
inline constexpr double kB_meV = kB / meV;

/// hbar^2 / (2 m0) in meV nm^2.
inline constexpr double kinetic_meV_nm2 = hbar * hbar / (2.0 * m0) / meV / (nm * nm);

inline constexpr double meV_to_rad_per_s(double energy_meV) { return energy_meV * meV / hbar; }
inline constexpr double rad_per_s_to_meV(double omega) { return omega * hbar / meV; }
inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

} // namespace msp::constants

#endif
