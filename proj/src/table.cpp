#include "coresp/table.hpp"

#include "coresp/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace coresp {

namespace {

std::vector<std::string> split_line(std::string_view line, char delimiter) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
        while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
        if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
            cell = cell.substr(1, cell.size() - 2);
        }
        cells.emplace_back(cell);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

} // namespace

TextTable parse_table(std::string_view text, std::string_view source) {
    TextTable table;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (is_blank(line)) {
            if (end == text.size()) break;
            continue;
        }
        if (!have_header) {
            table.delimiter = line.find('\t') != std::string_view::npos ? '\t' : ',';
            table.header = split_line(line, table.delimiter);
            have_header = true;
        } else {
            auto cells = split_line(line, table.delimiter);
            if (cells.size() != table.header.size()) {
                throw ParseError(fmt::format("{}: line {} has {} fields, header has {}", source, line_no,
                                             cells.size(), table.header.size()));
            }
            table.rows.push_back(std::move(cells));
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw ParseError(fmt::format("{}: missing header row", source));
    return table;
}

TextTable read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_table(buffer.str(), path.string());
}

void write_table(const std::filesystem::path& path, const TextTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << table.delimiter;
            out << cells[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

double parse_number(std::string_view cell, std::size_t line, std::size_t column, std::string_view source) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && cell.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ParseError(fmt::format("{}: non-numeric or missing value '{}' at line {}, column {}", source, cell,
                                     line, column));
    }
    return value;
}

std::string format_number(double value, int significant_digits) {
    if (value == 0.0) return "0";
    if (significant_digits <= 0) return fmt::format("{}", value);
    return fmt::format("{:.{}g}", value, significant_digits);
}

} // namespace coresp
