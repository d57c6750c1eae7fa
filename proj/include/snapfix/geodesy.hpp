#pragma once

#include <cmath>

namespace snapfix {

namespace constants {
inline constexpr double speed_of_light = 299792458.0;           ///< [m/s]
inline constexpr double earth_rotation_rate = 7.2921151467e-5;  ///< [rad/s]
inline constexpr double earth_mu = 3.986005e14;                 ///< [m^3/s^2]
inline constexpr double wgs84_a = 6378137.0;                    ///< semi-major axis [m]
inline constexpr double wgs84_f = 1.0 / 298.257223563;          ///< flattening
inline constexpr double seconds_per_week = 604800.0;            ///< [s]
inline constexpr double code_period = 1.0e-3;                   ///< C/A code repetition [s]
inline constexpr double l1_frequency = 1575.42e6;               ///< [Hz]
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg2rad = pi / 180.0;
inline constexpr double rad2deg = 180.0 / pi;
inline constexpr double mean_earth_radius = 6371000.0;          ///< [m], spherical displacement radius
}  // namespace constants

/// GPS time as full week number (no mod-1024 rollover) + seconds of week.
struct GpsTime {
  int week = 0;
  double sow = 0.0;  ///< seconds of week, normalized to [0, 604800)

  /// Normalizes sow into [0, 604800), carrying whole weeks.
  static GpsTime make(int week, double sow);

  /// This time advanced by dt seconds (dt may be negative).
  GpsTime plus(double dt) const { return make(week, sow + dt); }

  /// Full (unwrapped) difference this - other in seconds.
  double minus(const GpsTime& other) const {
    return (week - other.week) * 604800.0 + (sow - other.sow);
  }
};

/// Earth-centered earth-fixed position [m].
struct EcefPosition {
  double x = 0.0, y = 0.0, z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  EcefPosition operator+(const EcefPosition& o) const { return {x + o.x, y + o.y, z + o.z}; }
  EcefPosition operator-(const EcefPosition& o) const { return {x - o.x, y - o.y, z - o.z}; }
  EcefPosition operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const EcefPosition& o) const { return x * o.x + y * o.y + z * o.z; }
};

inline double distance(const EcefPosition& a, const EcefPosition& b) { return (a - b).norm(); }

/// Geodetic coordinates on the WGS84 ellipsoid.
struct GeodeticPosition {
  double lat_rad = 0.0;
  double lon_rad = 0.0;
  double height_m = 0.0;
};

/// Direction and range of a target as seen from a site.
struct TopocentricView {
  double azimuth_rad = 0.0;    ///< clockwise from north
  double elevation_rad = 0.0;  ///< above local horizon
  double range_m = 0.0;
};

/// Julian day number for a civil date (valid years 1901..2099).
/// fractional_hours is hours-of-day including fraction; throws InputError on bad dates.
double julian_day(int year, int month, int day, double fractional_hours);

/// GPS week/seconds-of-week for a Julian day (weeks counted from 1980-01-06, no rollover).
GpsTime gps_time_from_julian_day(double jd);

/// GPS time for a civil UTC-like calendar epoch (no leap-second handling).
GpsTime gps_time_from_calendar(int year, int month, int day, int hour, int minute, double second);

/// Wraps a time difference into (-302400, +302400] seconds.
double wrap_half_week(double dt_s);

/// Rotates an ECEF position into the frame of the reception instant,
/// compensating earth rotation over travel_time_s of signal flight.
EcefPosition earth_rotation_correction(double travel_time_s, const EcefPosition& p);

GeodeticPosition ecef_to_geodetic(const EcefPosition& p);
EcefPosition geodetic_to_ecef(const GeodeticPosition& g);

/// Azimuth/elevation/range of target as seen from site (site given in ECEF).
TopocentricView topocentric(const EcefPosition& site, const EcefPosition& target);

}  // namespace snapfix
