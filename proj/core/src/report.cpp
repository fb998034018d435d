#include "sivcav/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sivcav::report {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return std::signbit(v) ? "-1e999" : "1e999";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Document::Entry* Document::find(const std::string& key) {
    for (auto& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

Document& Document::set(const std::string& key, double value) {
    if (Entry* e = find(key))
        e->value = value;
    else
        entries_.push_back({key, value});
    return *this;
}

Document& Document::set(const std::string& key, const std::string& value) {
    if (Entry* e = find(key))
        e->value = value;
    else
        entries_.push_back({key, value});
    return *this;
}

Document& Document::set(const std::string& key, const char* value) {
    return set(key, std::string(value));
}

Document& Document::set(const std::string& key, std::int64_t value) {
    if (Entry* e = find(key))
        e->value = value;
    else
        entries_.push_back({key, value});
    return *this;
}

Document& Document::set(const std::string& key, bool value) {
    if (Entry* e = find(key))
        e->value = value;
    else
        entries_.push_back({key, value});
    return *this;
}

Document& Document::section(const std::string& key) {
    if (Entry* e = find(key)) {
        if (auto* doc = std::get_if<std::unique_ptr<Document>>(&e->value)) return **doc;
        throw std::invalid_argument("document key already holds a scalar: " + key);
    }
    entries_.push_back({key, std::make_unique<Document>()});
    return *std::get<std::unique_ptr<Document>>(entries_.back().value);
}

void Document::render_json(std::string& out, int indent) const {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    out += "{";
    bool first = true;
    for (const auto& e : entries_) {
        out += first ? "\n" : ",\n";
        first = false;
        out += pad_in + "\"" + json_escape(e.key) + "\": ";
        if (const auto* d = std::get_if<double>(&e.value))
            out += format_double(*d);
        else if (const auto* s = std::get_if<std::string>(&e.value))
            out += "\"" + json_escape(*s) + "\"";
        else if (const auto* i = std::get_if<std::int64_t>(&e.value))
            out += std::to_string(*i);
        else if (const auto* b = std::get_if<bool>(&e.value))
            out += *b ? "true" : "false";
        else
            std::get<std::unique_ptr<Document>>(e.value)->render_json(out, indent + 1);
    }
    out += entries_.empty() ? "}" : "\n" + pad + "}";
}

void Document::render_text(std::string& out, int indent) const {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const auto& e : entries_) {
        if (const auto* doc = std::get_if<std::unique_ptr<Document>>(&e.value)) {
            out += pad + "[" + e.key + "]\n";
            (*doc)->render_text(out, indent + 1);
            continue;
        }
        out += pad + e.key + " = ";
        if (const auto* d = std::get_if<double>(&e.value))
            out += format_double(*d);
        else if (const auto* s = std::get_if<std::string>(&e.value))
            out += *s;
        else if (const auto* i = std::get_if<std::int64_t>(&e.value))
            out += std::to_string(*i);
        else
            out += *std::get_if<bool>(&e.value) ? "true" : "false";
        out += "\n";
    }
}

std::string Document::to_json() const {
    std::string out;
    render_json(out, 0);
    out += "\n";
    return out;
}

std::string Document::to_text() const {
    std::string out;
    render_text(out, 0);
    return out;
}

}  // namespace sivcav::report
