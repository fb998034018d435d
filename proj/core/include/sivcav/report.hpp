#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace sivcav::report {

// Ordered key-value result document with nested sections. Renders as JSON
// (machine side) or aligned plain text (human side); insertion order is
// preserved so repeated runs emit byte-identical documents.
class Document {
public:
    Document() = default;
    Document(Document&&) noexcept = default;
    Document& operator=(Document&&) noexcept = default;

    Document& set(const std::string& key, double value);
    Document& set(const std::string& key, const std::string& value);
    Document& set(const std::string& key, const char* value);
    Document& set(const std::string& key, std::int64_t value);
    Document& set(const std::string& key, bool value);

    // Creates (or reopens) a nested section.
    Document& section(const std::string& key);

    bool empty() const { return entries_.empty(); }

    std::string to_json() const;  // pretty-printed, two-space indent
    std::string to_text() const;  // "key = value" lines, sections indented

private:
    using Value =
        std::variant<double, std::string, std::int64_t, bool, std::unique_ptr<Document>>;
    struct Entry {
        std::string key;
        Value value;
    };

    Entry* find(const std::string& key);
    void render_json(std::string& out, int indent) const;
    void render_text(std::string& out, int indent) const;

    std::vector<Entry> entries_;
};

}  // namespace sivcav::report
