#pragma once

namespace cavitykit {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

// Losses and transmissions are stored as dimensionless fractions internally;
// ppm appears only at the I/O boundary.
inline constexpr double from_ppm(double ppm) { return ppm * 1e-6; }
inline constexpr double to_ppm(double fraction) { return fraction * 1e6; }

}  // namespace cavitykit
