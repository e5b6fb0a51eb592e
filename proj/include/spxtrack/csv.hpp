#pragma once

#include <string>
#include <vector>

namespace spx {

// Splits one CSV line on commas; no quoting, fields trimmed of spaces.
std::vector<std::string> csv_split(const std::string& line);

// Throws ParseError naming file:line when conversion fails.
double csv_to_double(const std::string& field, const std::string& where);
long csv_to_long(const std::string& field, const std::string& where);

// Reads all non-empty lines; when the first line starts with a non-numeric
// field it is treated as a header and skipped.
std::vector<std::vector<std::string>> csv_read_rows(const std::string& path);

} // namespace spx
