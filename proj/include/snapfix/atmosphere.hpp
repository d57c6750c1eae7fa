#pragma once

#include <array>

#include "snapfix/geodesy.hpp"

namespace snapfix {

/// Broadcast ionospheric model coefficients (zeros = model disabled-ish floor).
struct KlobucharParams {
  std::array<double, 4> alpha{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> beta{0.0, 0.0, 0.0, 0.0};
};

/// L1 ionospheric group delay [s] for a signal from (az, el) at user position, GPS time t.
/// Negative elevations are clamped to the horizon.
double klobuchar_delay(const KlobucharParams& k, const GeodeticPosition& user, double azimuth_rad,
                       double elevation_rad, const GpsTime& t);

/// Tropospheric delay [m], two-layer refractivity integration (dry + wet).
/// Heights in meters; met inputs referenced to station height. Throws on elevation <= 0.
double tropospheric_delay(double elevation_rad, double height_m, double pressure_mbar = 1013.0,
                          double temperature_k = 293.0, double humidity_pct = 50.0);

}  // namespace snapfix
