#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snapfix/errors.hpp"
#include "snapfix/geodesy.hpp"

using namespace snapfix;
namespace k = snapfix::constants;

TEST_CASE("julian day matches tabulated epochs") {
  // J2000.0 and the GPS zero epoch, from standard almanac tables.
  CHECK(julian_day(2000, 1, 1, 12.0) == doctest::Approx(2451545.0).epsilon(1e-12));
  CHECK(julian_day(1980, 1, 6, 0.0) == doctest::Approx(2444244.5).epsilon(1e-12));
  CHECK(julian_day(2026, 8, 22, 0.0) == doctest::Approx(2461274.5).epsilon(1e-12));
}

TEST_CASE("julian day rejects invalid dates") {
  CHECK_THROWS_AS(julian_day(1900, 1, 1, 0.0), InputError);
  CHECK_THROWS_AS(julian_day(2100, 1, 1, 0.0), InputError);
  CHECK_THROWS_AS(julian_day(2020, 13, 1, 0.0), InputError);
  CHECK_THROWS_AS(julian_day(2020, 0, 1, 0.0), InputError);
  CHECK_THROWS_AS(julian_day(2021, 2, 29, 0.0), InputError);
  CHECK_THROWS_AS(julian_day(2020, 4, 31, 0.0), InputError);
  CHECK_THROWS_AS(julian_day(2020, 1, 1, -0.5), InputError);
  CHECK_THROWS_AS(julian_day(2020, 1, 1, 24.5), InputError);
  CHECK_NOTHROW(julian_day(2020, 2, 29, 0.0));
  CHECK_NOTHROW(julian_day(2000, 2, 29, 0.0));
}

TEST_CASE("gps time from julian day") {
  GpsTime t0 = gps_time_from_julian_day(2444244.5);
  CHECK(t0.week == 0);
  CHECK(t0.sow == doctest::Approx(0.0).scale(1.0));

  // J2000 is 7300.5 days after the GPS epoch: week 1042 + 6.5 days.
  GpsTime tj = gps_time_from_julian_day(2451545.0);
  CHECK(tj.week == 1042);
  CHECK(tj.sow == doctest::Approx(6.5 * 86400.0).epsilon(1e-9));
}

TEST_CASE("gps time from calendar") {
  GpsTime t0 = gps_time_from_calendar(1980, 1, 6, 0, 0, 0.0);
  CHECK(t0.week == 0);
  CHECK(t0.sow == doctest::Approx(0.0).scale(1.0));

  // 1980-01-07 00:00 is one day into week 0.
  GpsTime t1 = gps_time_from_calendar(1980, 1, 7, 0, 0, 0.0);
  CHECK(t1.week == 0);
  CHECK(t1.sow == doctest::Approx(86400.0));

  GpsTime t2 = gps_time_from_calendar(2026, 8, 22, 12, 30, 15.5);
  // 2026-08-22 is a Saturday, 6 days into its week.
  CHECK(t2.sow == doctest::Approx(6 * 86400.0 + 12 * 3600.0 + 30 * 60.0 + 15.5).epsilon(1e-12));
  GpsTime back = gps_time_from_julian_day(julian_day(2026, 8, 22, 12.0 + 30.0 / 60.0 + 15.5 / 3600.0));
  CHECK(back.week == t2.week);
  CHECK(back.sow == doctest::Approx(t2.sow).epsilon(1e-9));
}

TEST_CASE("gps time normalization and arithmetic") {
  GpsTime a = GpsTime::make(100, 604800.0);
  CHECK(a.week == 101);
  CHECK(a.sow == doctest::Approx(0.0).scale(1.0));

  GpsTime b = GpsTime::make(100, -1.0);
  CHECK(b.week == 99);
  CHECK(b.sow == doctest::Approx(604799.0));

  GpsTime c = GpsTime::make(100, 3.0 * 604800.0 + 12.5);
  CHECK(c.week == 103);
  CHECK(c.sow == doctest::Approx(12.5));

  GpsTime t{2000, 604799.25};
  GpsTime u = t.plus(1.5);
  CHECK(u.week == 2001);
  CHECK(u.sow == doctest::Approx(0.75));
  CHECK(u.minus(t) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(t.minus(u) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("wrap half week") {
  CHECK(wrap_half_week(10.0) == doctest::Approx(10.0));
  CHECK(wrap_half_week(302401.0) == doctest::Approx(-302399.0));
  CHECK(wrap_half_week(-302401.0) == doctest::Approx(302399.0));
  CHECK(wrap_half_week(302400.0) == doctest::Approx(302400.0));
  CHECK(wrap_half_week(604800.0 * 3 + 5.0) == doctest::Approx(5.0));
  CHECK(wrap_half_week(-302400.0) == doctest::Approx(302400.0));
}

TEST_CASE("earth rotation correction") {
  EcefPosition p{26.56e6, 0.0, 1.234e6};
  double tau = 0.0765;
  EcefPosition r = earth_rotation_correction(tau, p);
  double a = k::earth_rotation_rate * tau;
  CHECK(r.x == doctest::Approx(std::cos(a) * p.x).epsilon(1e-15));
  CHECK(r.y == doctest::Approx(-std::sin(a) * p.x).epsilon(1e-12));
  CHECK(r.z == doctest::Approx(p.z).epsilon(1e-15));
  // A point on the +x axis swings toward -y: the frame rotates east under the signal.
  CHECK(r.y < 0.0);
  // Rotation preserves length and is undone by a negative interval.
  CHECK(r.norm() == doctest::Approx(p.norm()).epsilon(1e-14));
  EcefPosition back = earth_rotation_correction(-tau, r);
  CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(p.y).scale(p.norm()));
  CHECK(back.z == doctest::Approx(p.z).epsilon(1e-14));
  // Magnitude of the swing for a GPS-like range: about 150 m.
  CHECK(std::abs(r.y) == doctest::Approx(26.56e6 * std::sin(a)).epsilon(1e-12));
}

TEST_CASE("geodetic conversions at reference points") {
  EcefPosition equator = geodetic_to_ecef({0.0, 0.0, 0.0});
  CHECK(equator.x == doctest::Approx(k::wgs84_a).epsilon(1e-12));
  CHECK(equator.y == doctest::Approx(0.0).scale(1.0));
  CHECK(equator.z == doctest::Approx(0.0).scale(1.0));

  double b = k::wgs84_a * (1.0 - k::wgs84_f);
  EcefPosition pole = geodetic_to_ecef({k::pi / 2.0, 0.0, 0.0});
  CHECK(pole.z == doctest::Approx(b).epsilon(1e-12));
  CHECK(std::abs(pole.x) < 1e-6);

  GeodeticPosition g = ecef_to_geodetic({0.0, 0.0, b + 250.0});
  CHECK(g.lat_rad == doctest::Approx(k::pi / 2.0).epsilon(1e-12));
  CHECK(g.height_m == doctest::Approx(250.0).epsilon(1e-9));

  GeodeticPosition q = ecef_to_geodetic({k::wgs84_a + 100.0, 0.0, 0.0});
  CHECK(q.lat_rad == doctest::Approx(0.0).scale(1.0));
  CHECK(q.lon_rad == doctest::Approx(0.0).scale(1.0));
  CHECK(q.height_m == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("geodetic round trip over a grid") {
  double worst = 0.0;
  for (int la = -85; la <= 85; la += 17) {
    for (int lo = -175; lo <= 175; lo += 25) {
      for (double h : {-400.0, 0.0, 1600.0, 20000.0, 2.0e7}) {
        GeodeticPosition g{la * k::deg2rad, lo * k::deg2rad, h};
        EcefPosition p = geodetic_to_ecef(g);
        GeodeticPosition g2 = ecef_to_geodetic(p);
        EcefPosition p2 = geodetic_to_ecef(g2);
        worst = std::max(worst, distance(p, p2));
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("topocentric view from the equator") {
  EcefPosition site{k::wgs84_a, 0.0, 0.0};

  TopocentricView up = topocentric(site, {k::wgs84_a + 1000.0, 0.0, 0.0});
  CHECK(up.elevation_rad == doctest::Approx(k::pi / 2.0).epsilon(1e-9));
  CHECK(up.range_m == doctest::Approx(1000.0).epsilon(1e-12));

  TopocentricView north = topocentric(site, {k::wgs84_a, 0.0, 1000.0});
  CHECK(north.azimuth_rad == doctest::Approx(0.0).scale(1.0));
  CHECK(north.elevation_rad == doctest::Approx(0.0).scale(1.0));
  CHECK(north.range_m == doctest::Approx(1000.0).epsilon(1e-12));

  TopocentricView east = topocentric(site, {k::wgs84_a, 1000.0, 0.0});
  CHECK(east.azimuth_rad == doctest::Approx(k::pi / 2.0).epsilon(1e-12));
  CHECK(east.elevation_rad == doctest::Approx(0.0).scale(1.0));

  TopocentricView west = topocentric(site, {k::wgs84_a, -1000.0, 0.0});
  CHECK(west.azimuth_rad == doctest::Approx(3.0 * k::pi / 2.0).epsilon(1e-12));

  TopocentricView down = topocentric(site, {k::wgs84_a - 500.0, 0.0, 0.0});
  CHECK(down.elevation_rad == doctest::Approx(-k::pi / 2.0).epsilon(1e-9));
}

TEST_CASE("topocentric view at a mid latitude site") {
  GeodeticPosition sg{40.0 * k::deg2rad, -105.0 * k::deg2rad, 1600.0};
  EcefPosition site = geodetic_to_ecef(sg);
  // Move 1 km straight up along the ellipsoid normal.
  EcefPosition above = geodetic_to_ecef({sg.lat_rad, sg.lon_rad, sg.height_m + 1000.0});
  TopocentricView v = topocentric(site, above);
  CHECK(v.elevation_rad == doctest::Approx(k::pi / 2.0).epsilon(1e-6));
  CHECK(v.range_m == doctest::Approx(1000.0).epsilon(1e-6));
}
