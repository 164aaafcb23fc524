#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uvclt {

/// Shortest round-trippable decimal form of a double ("%.17g" trimmed), so
/// repeated runs emit byte-identical files.
std::string format_double(double value);

/// Tabular result with a key-value metadata header; serializes to CSV (header
/// as '# key: value' comment lines) or to JSON ({"meta": ..., "rows": [...]}).
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_meta(const std::string& key, const std::string& value);
    void add_meta(const std::string& key, double value);
    void add_row(std::vector<std::string> cells);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t row_count() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

/// FNV-1a 64-bit over raw bytes, hex-encoded; used to fingerprint configs.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace uvclt
