#pragma once

#include <string>
#include <vector>

namespace crashsev::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_line(const std::string& line);

/// Reads a whole CSV file: first row is the header, the rest are records.
/// Skips blank lines; strips a UTF-8 BOM and trailing CR.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Table read_file(const std::string& path);

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);

/// Shortest round-trip decimal form of a double (std::to_chars); byte-stable.
std::string format_double(double v);

}  // namespace crashsev::csv
