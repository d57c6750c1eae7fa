#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "snapfix/atmosphere.hpp"
#include "snapfix/ephemeris.hpp"

namespace snapfix {

/// Result of parsing a navigation file.
struct RinexNavData {
  EphemerisSet ephemerides;
  KlobucharParams klobuchar;
  bool has_klobuchar = false;
  double version = 0.0;
  int skipped_records = 0;  ///< non-GPS records dropped (version 3 mixed files)
  std::vector<std::string> warnings;
};

/// Parses a RINEX 2.x or 3.x GPS navigation stream.
/// Throws ParseError (with line number) on malformed content or invariant violations.
RinexNavData parse_rinex_nav(std::istream& in);

/// Convenience overload; throws InputError when the file cannot be opened.
RinexNavData parse_rinex_nav_file(const std::string& path);

/// Canonical RINEX 2.11 text for a set (optionally with ionospheric header lines).
std::string serialize_rinex_nav(const EphemerisSet& set, const KlobucharParams* klobuchar = nullptr);

}  // namespace snapfix
