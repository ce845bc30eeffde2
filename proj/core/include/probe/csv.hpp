#pragma once

#include <istream>
#include <string>
#include <vector>

namespace probe {

/// One parsed CSV record plus the 1-based line it started on.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Minimal RFC 4180 reader: comma separated, double-quote quoting with ""
/// escapes, quoted fields may span lines. Accepts LF or CRLF endings and a
/// leading UTF-8 BOM. Blank lines are skipped.
std::vector<CsvRecord> read_csv(std::istream& in);

}  // namespace probe
