#include "snapfix/geodesy.hpp"

#include <cmath>

#include "snapfix/errors.hpp"

namespace snapfix {

using namespace constants;

GpsTime GpsTime::make(int week, double sow) {
  double w = std::floor(sow / seconds_per_week);
  GpsTime t;
  t.week = week + static_cast<int>(w);
  t.sow = sow - w * seconds_per_week;
  if (t.sow >= seconds_per_week) {  // guard against floating roundup at the boundary
    t.sow -= seconds_per_week;
    t.week += 1;
  }
  return t;
}

static bool leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

double julian_day(int year, int month, int day, double fractional_hours) {
  static const int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (year < 1901 || year > 2099) throw InputError("julian_day: year out of range");
  if (month < 1 || month > 12) throw InputError("julian_day: month out of range");
  int dmax = mdays[month - 1] + ((month == 2 && leap_year(year)) ? 1 : 0);
  if (day < 1 || day > dmax) throw InputError("julian_day: day out of range");
  if (fractional_hours < 0.0 || fractional_hours >= 24.0)
    throw InputError("julian_day: hours out of range");

  int y = year, m = month;
  if (m <= 2) {
    y -= 1;
    m += 12;
  }
  return std::floor(365.25 * y) + std::floor(30.6001 * (m + 1)) + day + fractional_hours / 24.0 +
         1720981.5;
}

GpsTime gps_time_from_julian_day(double jd) {
  const double gps_epoch_jd = 2444244.5;  // 1980-01-06 00:00
  double days = jd - gps_epoch_jd;
  int week = static_cast<int>(std::floor(days / 7.0));
  double sow = (days - 7.0 * week) * 86400.0;
  return GpsTime::make(week, sow);
}

GpsTime gps_time_from_calendar(int year, int month, int day, int hour, int minute, double second) {
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0.0 || second >= 60.0)
    throw InputError("gps_time_from_calendar: time of day out of range");
  double jd = julian_day(year, month, day, 0.0);
  GpsTime t = gps_time_from_julian_day(jd);
  return t.plus(hour * 3600.0 + minute * 60.0 + second);
}

double wrap_half_week(double dt_s) {
  double half = seconds_per_week / 2.0;
  double w = std::fmod(dt_s, seconds_per_week);
  if (w > half) w -= seconds_per_week;
  if (w <= -half) w += seconds_per_week;
  return w;
}

EcefPosition earth_rotation_correction(double travel_time_s, const EcefPosition& p) {
  double a = earth_rotation_rate * travel_time_s;
  double c = std::cos(a), s = std::sin(a);
  return {c * p.x + s * p.y, -s * p.x + c * p.y, p.z};
}

GeodeticPosition ecef_to_geodetic(const EcefPosition& p) {
  const double a = wgs84_a;
  const double e2 = wgs84_f * (2.0 - wgs84_f);
  const double b = a * (1.0 - wgs84_f);

  double rho = std::hypot(p.x, p.y);
  GeodeticPosition g;
  g.lon_rad = (rho > 0.0) ? std::atan2(p.y, p.x) : 0.0;

  if (rho < 1e-6) {  // on the polar axis
    g.lat_rad = (p.z >= 0.0) ? pi / 2.0 : -pi / 2.0;
    g.height_m = std::fabs(p.z) - b;
    return g;
  }

  double lat = std::atan2(p.z, rho * (1.0 - e2));
  double h = 0.0;
  for (int it = 0; it < 10; ++it) {
    double sl = std::sin(lat);
    double n = a / std::sqrt(1.0 - e2 * sl * sl);
    h = rho / std::cos(lat) - n;
    double lat_new = std::atan2(p.z, rho * (1.0 - e2 * n / (n + h)));
    if (std::fabs(lat_new - lat) < 1e-12) {
      lat = lat_new;
      break;
    }
    lat = lat_new;
  }
  double sl = std::sin(lat);
  double n = a / std::sqrt(1.0 - e2 * sl * sl);
  g.lat_rad = lat;
  g.height_m = rho / std::cos(lat) - n;
  return g;
}

EcefPosition geodetic_to_ecef(const GeodeticPosition& g) {
  const double a = wgs84_a;
  const double e2 = wgs84_f * (2.0 - wgs84_f);
  double sl = std::sin(g.lat_rad), cl = std::cos(g.lat_rad);
  double n = a / std::sqrt(1.0 - e2 * sl * sl);
  return {(n + g.height_m) * cl * std::cos(g.lon_rad),
          (n + g.height_m) * cl * std::sin(g.lon_rad),
          (n * (1.0 - e2) + g.height_m) * sl};
}

TopocentricView topocentric(const EcefPosition& site, const EcefPosition& target) {
  GeodeticPosition g = ecef_to_geodetic(site);
  double sl = std::sin(g.lat_rad), cl = std::cos(g.lat_rad);
  double so = std::sin(g.lon_rad), co = std::cos(g.lon_rad);
  EcefPosition d = target - site;
  // ENU components
  double e = -so * d.x + co * d.y;
  double n = -sl * co * d.x - sl * so * d.y + cl * d.z;
  double u = cl * co * d.x + cl * so * d.y + sl * d.z;
  TopocentricView v;
  v.range_m = d.norm();
  v.elevation_rad = std::atan2(u, std::hypot(e, n));
  v.azimuth_rad = std::atan2(e, n);
  if (v.azimuth_rad < 0.0) v.azimuth_rad += 2.0 * pi;
  return v;
}

}  // namespace snapfix
