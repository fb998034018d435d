#include "sivcav/table_io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sivcav::io {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

void validate(const Table& table) {
    if (table.column_names.size() != table.columns.size())
        throw std::invalid_argument("column name count does not match column count");
    if (table.columns.empty()) throw std::invalid_argument("table has no columns");
    for (const auto& name : table.column_names) {
        if (name.empty()) throw std::invalid_argument("empty column name");
        for (char c : name)
            if (std::isspace(static_cast<unsigned char>(c)))
                throw std::invalid_argument("column names must not contain whitespace");
    }
    for (const auto& col : table.columns)
        if (col.size() != table.rows())
            throw std::invalid_argument("columns must have equal length");
    for (const auto& [key, value] : table.metadata) {
        if (key.empty() || key.find('\n') != std::string::npos ||
            key.find(':') != std::string::npos)
            throw std::invalid_argument("metadata keys must be single-line without ':'");
        if (value.find('\n') != std::string::npos)
            throw std::invalid_argument("metadata values must be single-line");
    }
}

std::string format_table(const Table& table) {
    validate(table);
    std::ostringstream out;
    for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << "\n";
    out << "# columns:";
    for (const auto& name : table.column_names) out << ' ' << name;
    out << "\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ' ';
            out << format_double(table.columns[c][r]);
        }
        out << "\n";
    }
    return out.str();
}

Table parse_table(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string body = trim(line.substr(1));
            if (body.empty()) continue;
            const auto colon = body.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("malformed header line: " + line);
            const std::string key = trim(body.substr(0, colon));
            const std::string value = trim(body.substr(colon + 1));
            if (key == "columns") {
                std::istringstream names(value);
                std::string name;
                while (names >> name) table.column_names.push_back(name);
                table.columns.assign(table.column_names.size(), {});
                have_columns = true;
            } else {
                table.metadata[key] = value;
            }
            continue;
        }
        if (!have_columns) throw std::invalid_argument("data row before the columns header");
        std::istringstream row(line);
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            std::string cell;
            if (!(row >> cell)) throw std::invalid_argument("short data row: " + line);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw std::invalid_argument("non-numeric cell: " + cell);
            table.columns[c].push_back(v);
        }
        std::string extra;
        if (row >> extra) throw std::invalid_argument("long data row: " + line);
    }
    if (!have_columns) throw std::invalid_argument("missing columns header");
    validate(table);
    return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    const std::string text = format_table(table);
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str());
}

}  // namespace sivcav::io
