#include "snapfix/snapshot_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "snapfix/errors.hpp"

namespace snapfix {

namespace {

std::string strip_comment(const std::string& line) {
  auto p = line.find('#');
  return p == std::string::npos ? line : line.substr(0, p);
}

double parse_double(const std::string& tok, int lineno, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + tok + "'", lineno);
  }
}

}  // namespace

Snapshot read_snapshot(std::istream& in) {
  Snapshot snap;
  std::string line;
  int lineno = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(strip_comment(line));
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!header_seen) {
      if (tok[0] != "SNAP1") throw ParseError("expected SNAP1 header", lineno);
      if (tok.size() < 4) throw ParseError("header needs week, seconds of week and id", lineno);
      int week = static_cast<int>(parse_double(tok[1], lineno, "week"));
      double sow = parse_double(tok[2], lineno, "seconds of week");
      if (week < 0 || sow < 0.0 || sow >= 604800.0)
        throw ParseError("week/seconds-of-week out of range", lineno);
      snap.epoch = GpsTime::make(week, sow);
      snap.receiver_id = tok[3];
      header_seen = true;
      continue;
    }

    if (tok.size() < 2) throw ParseError("observation needs prn and phase", lineno);
    Observation ob;
    ob.prn = static_cast<int>(parse_double(tok[0], lineno, "prn"));
    if (ob.prn < 1 || ob.prn > 63) throw ParseError("prn out of range", lineno);
    ob.phase = parse_double(tok[1], lineno, "phase");
    if (!(ob.phase >= 0.0 && ob.phase < 1.0))
      throw ParseError("phase must lie in [0, 1)", lineno);
    if (tok.size() >= 3 && tok[2] != "-") ob.doppler_hz = parse_double(tok[2], lineno, "doppler");
    if (tok.size() >= 4) ob.snr_dbhz = parse_double(tok[3], lineno, "snr");
    for (const auto& prev : snap.obs)
      if (prev.prn == ob.prn) throw ParseError("duplicate prn " + std::to_string(ob.prn), lineno);
    snap.obs.push_back(ob);
  }
  if (!header_seen) throw ParseError("missing SNAP1 header", lineno == 0 ? 1 : lineno);
  return snap;
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_snapshot(in);
}

void write_snapshot(std::ostream& out, const Snapshot& snap) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "SNAP1 %d %.9f %s\n", snap.epoch.week, snap.epoch.sow,
                snap.receiver_id.c_str());
  out << buf;
  for (const Observation& ob : snap.obs) {
    std::snprintf(buf, sizeof(buf), "%d %.17g", ob.prn, ob.phase);
    out << buf;
    if (ob.has_doppler()) {
      std::snprintf(buf, sizeof(buf), " %.17g", ob.doppler_hz);
      out << buf;
    } else if (std::isfinite(ob.snr_dbhz)) {
      out << " -";
    }
    if (std::isfinite(ob.snr_dbhz)) {
      std::snprintf(buf, sizeof(buf), " %.17g", ob.snr_dbhz);
      out << buf;
    }
    out << "\n";
  }
}

void write_snapshot_file(const std::string& path, const Snapshot& snap) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_snapshot(out, snap);
}

}  // namespace snapfix
