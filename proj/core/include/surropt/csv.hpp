#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace surropt {

// Comma-separated, mandatory header, LF endings, no quoting. The schemas used
// here never need quoting.

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a whole table. Throws InputError on ragged rows.
CsvTable read_csv(std::istream& in);

/// Parses a full-field double; throws InputError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);

}  // namespace surropt
