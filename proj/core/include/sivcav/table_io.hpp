#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sivcav::io {

// Delimited-text data file: '#'-prefixed header lines carry metadata as
// "key: value" pairs plus one "columns:" line naming each column (units
// embedded in the name, e.g. tau_ns). Data rows are space-separated doubles
// printed with 17 significant digits, so emit -> parse is lossless.
struct Table {
    std::vector<std::string> column_names;      // no whitespace inside a name
    std::vector<std::vector<double>> columns;   // equal lengths
    std::map<std::string, std::string> metadata;  // sorted, deterministic

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

void validate(const Table& table);

std::string format_table(const Table& table);
Table parse_table(const std::string& text);

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

}  // namespace sivcav::io
