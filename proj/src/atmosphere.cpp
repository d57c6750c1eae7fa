#include "snapfix/atmosphere.hpp"

#include <algorithm>
#include <cmath>

#include "snapfix/errors.hpp"

namespace snapfix {

using namespace constants;

double klobuchar_delay(const KlobucharParams& k, const GeodeticPosition& user, double azimuth_rad,
                       double elevation_rad, const GpsTime& t) {
  // Broadcast model works in semicircles.
  double el = std::max(elevation_rad, 0.0) / pi;
  double az = azimuth_rad;
  double lat = user.lat_rad / pi;
  double lon = user.lon_rad / pi;

  double psi = 0.0137 / (el + 0.11) - 0.022;  // earth-centered angle to pierce point

  double lat_i = lat + psi * std::cos(az);
  lat_i = std::clamp(lat_i, -0.416, 0.416);
  double lon_i = lon + psi * std::sin(az) / std::cos(lat_i * pi);
  double lat_m = lat_i + 0.064 * std::cos((lon_i - 1.617) * pi);  // geomagnetic latitude

  double t_local = 4.32e4 * lon_i + t.sow;
  t_local = std::fmod(t_local, 86400.0);
  if (t_local < 0.0) t_local += 86400.0;

  double f = 1.0 + 16.0 * std::pow(0.53 - el, 3.0);  // slant factor

  double per = k.beta[0] + lat_m * (k.beta[1] + lat_m * (k.beta[2] + lat_m * k.beta[3]));
  per = std::max(per, 72000.0);
  double amp = k.alpha[0] + lat_m * (k.alpha[1] + lat_m * (k.alpha[2] + lat_m * k.alpha[3]));
  amp = std::max(amp, 0.0);

  double x = 2.0 * pi * (t_local - 50400.0) / per;
  if (std::fabs(x) < 1.57) {
    double x2 = x * x;
    return f * (5.0e-9 + amp * (1.0 - x2 / 2.0 + x2 * x2 / 24.0));
  }
  return f * 5.0e-9;
}

double tropospheric_delay(double elevation_rad, double height_m, double pressure_mbar,
                          double temperature_k, double humidity_pct) {
  if (elevation_rad <= 0.0) throw InputError("tropospheric_delay: elevation must be positive");
  if (temperature_k <= 0.0 || pressure_mbar <= 0.0)
    throw InputError("tropospheric_delay: bad met data");

  const double a_e = 6378.137;      // [km]
  const double b0 = 7.839257e-5;
  const double tlapse = -6.5;       // [K/km]
  double sinel = std::sin(elevation_rad);
  double hsta = height_m / 1000.0;  // [km]

  // Met data given at station height; reduce to sea level along the lapse profile.
  double hp = hsta, htkel = hsta, hhum = hsta;
  double tkhum = temperature_k + tlapse * (hhum - htkel);
  double atkel = 7.5 * (tkhum - 273.15) / (237.3 + tkhum - 273.15);
  double e0 = 0.0611 * humidity_pct * std::pow(10.0, atkel);  // partial water vapor pressure
  double tksea = temperature_k - tlapse * htkel;
  double em = -978.77 / (2.8704e4 * tlapse * 1.0e-3);
  double tkelh = tksea + tlapse * hhum;
  double e0sea = e0 * std::pow(tksea / tkelh, 4.0 * em);
  double tkelp = tksea + tlapse * hp;
  double psea = pressure_mbar * std::pow(tksea / tkelp, em);

  if (sinel < 0.0) sinel = 0.0;
  double delay = 0.0;

  double refsea = 77.624e-6 / tksea;
  double htop = 1.1385e-5 / refsea;
  refsea *= psea;
  double ref = refsea * std::pow((htop - hsta) / htop, 4.0);

  for (int pass = 0; pass < 2; ++pass) {
    double rtop = (a_e + htop) * (a_e + htop) - (a_e + hsta) * (a_e + hsta) * (1.0 - sinel * sinel);
    rtop = (rtop < 0.0 ? 0.0 : std::sqrt(rtop)) - (a_e + hsta) * sinel;

    double a = -sinel / (htop - hsta);
    double b = -b0 * (1.0 - sinel * sinel) / (2.0 * (htop - hsta));

    double alpha[8] = {2.0 * a,
                       2.0 * a * a + 4.0 * b / 3.0,
                       a * (a * a + 3.0 * b),
                       std::pow(a, 4.0) / 5.0 + 2.4 * a * a * b + 1.2 * b * b,
                       2.0 * a * b * (a * a + 3.0 * b) / 3.0,
                       b * b * (6.0 * a * a + 4.0 * b) * 1.428571e-1,
                       0.0,
                       0.0};
    if (b * b > 1.0e-35) {
      alpha[6] = a * b * b * b / 2.0;
      alpha[7] = std::pow(b, 4.0) / 9.0;
    }

    double dr = rtop;
    double rn = rtop;
    for (int i = 0; i < 8; ++i) {
      rn *= rtop;
      dr += alpha[i] * rn;
    }
    delay += dr * ref * 1000.0;  // [m]

    if (pass == 0) {  // switch to the wet component
      refsea = (371900.0e-6 / tksea - 12.92e-6) / tksea;
      htop = 1.1385e-5 * (1255.0 / tksea + 0.05) / refsea;
      ref = refsea * e0sea * std::pow((htop - hsta) / htop, 4.0);
    }
  }
  return delay;
}

}  // namespace snapfix
