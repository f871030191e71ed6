#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace coresp {

/// A delimited text table: one header row plus data rows of equal width.
struct TextTable {
    char delimiter = ',';
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a comma- or tab-delimited table. The delimiter is detected from the
/// header line (tab wins when present). Blank lines are skipped, CR is
/// stripped, and a row whose width differs from the header throws ParseError
/// naming the 1-based line number.
TextTable read_table(const std::filesystem::path& path);

/// Same as read_table on in-memory text; `source` names it in error messages.
TextTable parse_table(std::string_view text, std::string_view source = "<memory>");

void write_table(const std::filesystem::path& path, const TextTable& table);

/// Parses a finite decimal number. Missing markers ("", NA, NaN) and trailing
/// garbage are rejected with a ParseError that carries the cell coordinates
/// (1-based line, 1-based column).
double parse_number(std::string_view cell, std::size_t line, std::size_t column, std::string_view source);

/// Formats with `significant_digits` significant digits, or the shortest
/// representation that round-trips exactly when significant_digits == 0.
std::string format_number(double value, int significant_digits = 0);

/// Digits used for numeric report output by the command-line tool.
inline constexpr int report_digits = 12;

} // namespace coresp
