#include "snapfix/rinex.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "snapfix/errors.hpp"

namespace snapfix {

namespace {

std::string field(const std::string& line, std::size_t start, std::size_t len) {
  if (start >= line.size()) return "";
  return line.substr(start, std::min(len, line.size() - start));
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Fortran-style float: D or d exponent markers accepted; empty field reads as 0.
double num_field(const std::string& line, std::size_t start, std::size_t len, int lineno) {
  std::string s = trim(field(line, start, len));
  if (s.empty()) return 0.0;
  for (char& c : s)
    if (c == 'D' || c == 'd') c = 'E';
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("bad numeric field '" + s + "'", lineno);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad numeric field '" + s + "'", lineno);
  }
}

int int_field(const std::string& line, std::size_t start, std::size_t len, int lineno) {
  std::string s = trim(field(line, start, len));
  if (s.empty()) return 0;
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw ParseError("bad integer field '" + s + "'", lineno);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad integer field '" + s + "'", lineno);
  }
}

struct LineReader {
  std::istream& in;
  int lineno = 0;
  bool next(std::string& out) {
    if (!std::getline(in, out)) return false;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    ++lineno;
    return true;
  }
};

void check_record(const Ephemeris& e, int lineno) {
  if (e.e < 0.0 || e.e >= 0.1)
    throw ParseError("eccentricity " + std::to_string(e.e) + " outside [0, 0.1)", lineno);
  double a = e.sqrt_a * e.sqrt_a;
  if (a < 2.0e7 || a > 3.0e7)
    throw ParseError("semi-major axis " + std::to_string(a) + " m outside GPS shell", lineno);
  if (std::fabs(e.af0) >= 1.0e-2)
    throw ParseError("clock bias af0 " + std::to_string(e.af0) + " s implausible", lineno);
  if (e.prn < 1 || e.prn > 63) throw ParseError("PRN out of range", lineno);
}

/// Orbit fields shared by version 2 and 3 layouts; rows = 7 continuation lines, 4 fields each.
void assign_orbit_fields(Ephemeris& e, const double f[7][4]) {
  e.iode = f[0][0];
  e.crs = f[0][1];
  e.delta_n = f[0][2];
  e.m0 = f[0][3];
  e.cuc = f[1][0];
  e.e = f[1][1];
  e.cus = f[1][2];
  e.sqrt_a = f[1][3];
  double toe_sow = f[2][0];
  e.cic = f[2][1];
  e.omega0 = f[2][2];
  e.cis = f[2][3];
  e.i0 = f[3][0];
  e.crc = f[3][1];
  e.omega = f[3][2];
  e.omega_dot = f[3][3];
  e.idot = f[4][0];
  e.codes_l2 = f[4][1];
  int week = static_cast<int>(f[4][2]);
  e.l2p_flag = f[4][3];
  e.accuracy = f[5][0];
  e.health = f[5][1];
  e.tgd = f[5][2];
  e.iodc = f[5][3];
  e.transmission_sow = f[6][0];
  e.fit_interval = f[6][1];
  e.toe = GpsTime::make(week, toe_sow);
}

}  // namespace

RinexNavData parse_rinex_nav(std::istream& in) {
  RinexNavData out;
  LineReader rd{in};
  std::string line;

  if (!rd.next(line)) throw ParseError("empty file", 1);
  out.version = num_field(line, 0, 9, rd.lineno);
  char ftype = line.size() > 20 ? line[20] : ' ';
  bool v3 = out.version >= 3.0;
  if (out.version < 2.0 || out.version >= 4.0)
    throw ParseError("unsupported RINEX version", rd.lineno);
  if (ftype != 'N' && ftype != 'n')
    throw ParseError(std::string("not a navigation file (type '") + ftype + "')", rd.lineno);
  if (!v3) {
    // 2.x: type letter alone distinguishes systems; 'N' means GPS.
  } else {
    char sys = line.size() > 40 ? line[40] : ' ';
    if (sys != 'G' && sys != 'M' && sys != ' ')
      out.warnings.push_back("satellite system '" + std::string(1, sys) +
                             "'; only GPS records will be used");
  }

  bool alpha_seen = false, beta_seen = false;
  bool in_header = true;
  while (in_header) {
    if (!rd.next(line)) throw ParseError("unexpected end of file inside header", rd.lineno);
    std::string label = trim(field(line, 60, 20));
    if (label == "END OF HEADER") {
      in_header = false;
    } else if (label == "ION ALPHA") {
      for (int i = 0; i < 4; ++i) out.klobuchar.alpha[i] = num_field(line, 2 + 12 * i, 12, rd.lineno);
      alpha_seen = true;
    } else if (label == "ION BETA") {
      for (int i = 0; i < 4; ++i) out.klobuchar.beta[i] = num_field(line, 2 + 12 * i, 12, rd.lineno);
      beta_seen = true;
    } else if (label == "IONOSPHERIC CORR") {
      std::string kind = trim(field(line, 0, 4));
      if (kind == "GPSA") {
        for (int i = 0; i < 4; ++i)
          out.klobuchar.alpha[i] = num_field(line, 5 + 12 * i, 12, rd.lineno);
        alpha_seen = true;
      } else if (kind == "GPSB") {
        for (int i = 0; i < 4; ++i)
          out.klobuchar.beta[i] = num_field(line, 5 + 12 * i, 12, rd.lineno);
        beta_seen = true;
      }
    }
    // other header lines carried over silently
  }
  out.has_klobuchar = alpha_seen && beta_seen;

  // ---- data records ----
  while (rd.next(line)) {
    if (trim(line).empty()) continue;
    int start_line = rd.lineno;

    if (!v3) {
      Ephemeris e;
      e.prn = int_field(line, 0, 2, rd.lineno);
      int yy = int_field(line, 3, 2, rd.lineno);
      int year = yy >= 80 ? 1900 + yy : 2000 + yy;
      int mon = int_field(line, 6, 2, rd.lineno);
      int day = int_field(line, 9, 2, rd.lineno);
      int hour = int_field(line, 12, 2, rd.lineno);
      int minute = int_field(line, 15, 2, rd.lineno);
      double sec = num_field(line, 17, 5, rd.lineno);
      try {
        e.toc = gps_time_from_calendar(year, mon, day, hour, minute, sec);
      } catch (const InputError& ex) {
        throw ParseError(std::string("bad epoch: ") + ex.what(), rd.lineno);
      }
      e.af0 = num_field(line, 22, 19, rd.lineno);
      e.af1 = num_field(line, 41, 19, rd.lineno);
      e.af2 = num_field(line, 60, 19, rd.lineno);

      double f[7][4];
      for (int r = 0; r < 7; ++r) {
        if (!rd.next(line))
          throw ParseError("truncated record (started at line " + std::to_string(start_line) + ")",
                           rd.lineno + 1);
        for (int c = 0; c < 4; ++c) f[r][c] = num_field(line, 3 + 19 * c, 19, rd.lineno);
      }
      assign_orbit_fields(e, f);
      // toe week field and toc must agree; records with week 0 inherit the toc week
      if (e.toe.week == 0) e.toe = GpsTime::make(e.toc.week, e.toe.sow);
      check_record(e, start_line);
      out.ephemerides.records[e.prn].push_back(e);
    } else {
      char sys = line[0];
      if (sys != 'G') {
        // skip the whole record: continuation lines start with four blanks
        ++out.skipped_records;
        while (in.peek() == ' ') {
          if (!rd.next(line)) break;
        }
        continue;
      }
      Ephemeris e;
      e.prn = int_field(line, 1, 2, rd.lineno);
      int year = int_field(line, 4, 4, rd.lineno);
      int mon = int_field(line, 9, 2, rd.lineno);
      int day = int_field(line, 12, 2, rd.lineno);
      int hour = int_field(line, 15, 2, rd.lineno);
      int minute = int_field(line, 18, 2, rd.lineno);
      double sec = num_field(line, 21, 2, rd.lineno);
      try {
        e.toc = gps_time_from_calendar(year, mon, day, hour, minute, sec);
      } catch (const InputError& ex) {
        throw ParseError(std::string("bad epoch: ") + ex.what(), rd.lineno);
      }
      e.af0 = num_field(line, 23, 19, rd.lineno);
      e.af1 = num_field(line, 42, 19, rd.lineno);
      e.af2 = num_field(line, 61, 19, rd.lineno);

      double f[7][4];
      for (int r = 0; r < 7; ++r) {
        if (!rd.next(line))
          throw ParseError("truncated record (started at line " + std::to_string(start_line) + ")",
                           rd.lineno + 1);
        for (int c = 0; c < 4; ++c) f[r][c] = num_field(line, 4 + 19 * c, 19, rd.lineno);
      }
      assign_orbit_fields(e, f);
      if (e.toe.week == 0) e.toe = GpsTime::make(e.toc.week, e.toe.sow);
      check_record(e, start_line);
      out.ephemerides.records[e.prn].push_back(e);
    }
  }
  if (out.skipped_records > 0)
    out.warnings.push_back("skipped " + std::to_string(out.skipped_records) +
                           " non-GPS record(s)");
  return out;
}

RinexNavData parse_rinex_nav_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_rinex_nav(in);
}

namespace {

std::string dfield(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%19.12E", v);
  std::string s(buf);
  auto p = s.find('E');
  if (p != std::string::npos) s[p] = 'D';
  return s;
}

void civil_from_gps(const GpsTime& t, int& year, int& mon, int& day, int& hour, int& minute,
                    double& sec) {
  double jd = 2444244.5 + t.week * 7.0 + t.sow / 86400.0;
  double jd05 = jd + 0.5;
  long a = static_cast<long>(std::floor(jd05));
  double frac = jd05 - a;
  long l = a + 68569;
  long n = 4 * l / 146097;
  l = l - (146097 * n + 3) / 4;
  long i = 4000 * (l + 1) / 1461001;
  l = l - 1461 * i / 4 + 31;
  long j = 80 * l / 2447;
  day = static_cast<int>(l - 2447 * j / 80);
  l = j / 11;
  mon = static_cast<int>(j + 2 - 12 * l);
  year = static_cast<int>(100 * (n - 49) + i + l);
  // split the day fraction, rounded to 0.1 s so whole-second epochs stay exact
  double sod = std::round(frac * 86400.0 * 10.0) / 10.0;
  if (sod >= 86400.0) sod = 0.0;  // cannot occur for in-range inputs, guard anyway
  hour = static_cast<int>(sod / 3600.0);
  minute = static_cast<int>((sod - hour * 3600.0) / 60.0);
  sec = sod - hour * 3600.0 - minute * 60.0;
}

}  // namespace

std::string serialize_rinex_nav(const EphemerisSet& set, const KlobucharParams* klobuchar) {
  std::ostringstream os;
  char buf[128];

  std::snprintf(buf, sizeof(buf), "%9.2f%11s%-20s%-20s%-20s", 2.11, "", "N: GPS NAV DATA", "",
                "RINEX VERSION / TYPE");
  os << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%-20s%-20s%-20s%-20s", "snapfix", "", "",
                "PGM / RUN BY / DATE");
  os << buf << "\n";
  if (klobuchar) {
    auto ion_line = [&](const std::array<double, 4>& v, const char* label) {
      std::string l = "  ";
      for (int i = 0; i < 4; ++i) {
        char b2[32];
        std::snprintf(b2, sizeof(b2), "%12.4E", v[i]);
        std::string f(b2);
        auto p = f.find('E');
        if (p != std::string::npos) f[p] = 'D';
        l += f;
      }
      l += std::string(60 - l.size(), ' ');
      l += label;
      os << l << "\n";
    };
    ion_line(klobuchar->alpha, "ION ALPHA");
    ion_line(klobuchar->beta, "ION BETA");
  }
  std::snprintf(buf, sizeof(buf), "%60s%-20s", "", "END OF HEADER");
  os << buf << "\n";

  for (const auto& [prn, recs] : set.records) {
    for (const Ephemeris& e : recs) {
      int year, mon, day, hour, minute;
      double sec;
      civil_from_gps(e.toc, year, mon, day, hour, minute, sec);
      int yy = year % 100;
      std::snprintf(buf, sizeof(buf), "%2d %02d %2d %2d %2d %2d %4.1f", e.prn, yy, mon, day, hour,
                    minute, sec);
      os << buf << dfield(e.af0) << dfield(e.af1) << dfield(e.af2) << "\n";

      const double rows[7][4] = {
          {e.iode, e.crs, e.delta_n, e.m0},
          {e.cuc, e.e, e.cus, e.sqrt_a},
          {e.toe.sow, e.cic, e.omega0, e.cis},
          {e.i0, e.crc, e.omega, e.omega_dot},
          {e.idot, e.codes_l2, static_cast<double>(e.toe.week), e.l2p_flag},
          {e.accuracy, e.health, e.tgd, e.iodc},
          {e.transmission_sow, e.fit_interval, 0.0, 0.0},
      };
      for (int r = 0; r < 7; ++r) {
        os << "   ";
        for (int c = 0; c < 4; ++c) os << dfield(rows[r][c]);
        os << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace snapfix
