#pragma once

#include <iosfwd>
#include <string>

#include "snapfix/snapshot.hpp"

namespace snapfix {

/// Reads the plain-text snapshot format:
///   SNAP1 <week> <seconds_of_week> <receiver_id>
///   <prn> <phase> [<doppler_hz>|-] [<snr_dbhz>]
/// '#' starts a comment. Throws ParseError (with line numbers) on malformed input.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot_file(const std::string& path);

void write_snapshot(std::ostream& out, const Snapshot& snap);
void write_snapshot_file(const std::string& path, const Snapshot& snap);

}  // namespace snapfix
