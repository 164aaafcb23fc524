#include "uvclt/report.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace uvclt {

std::string format_double(double value) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

void Table::add_meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
}

void Table::add_meta(const std::string& key, double value) {
    meta_.emplace_back(key, format_double(value));
}

void Table::add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

void Table::write_csv(std::ostream& os) const {
    for (const auto& [key, value] : meta_) {
        os << "# " << key << ": " << value << '\n';
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        os << columns_[c] << (c + 1 < columns_.size() ? "," : "");
    }
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << row[c] << (c + 1 < row.size() ? "," : "");
        }
        os << '\n';
    }
}

namespace {

void write_json_string(std::ostream& os, const std::string& s) {
    os << '"';
    for (char ch : s) {
        switch (ch) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            default: os << ch;
        }
    }
    os << '"';
}

// Cells flow through as raw JSON when they parse as finite numbers, strings
// otherwise.
bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    return s.find("nan") == std::string::npos && s.find("inf") == std::string::npos;
}

}  // namespace

void Table::write_json(std::ostream& os) const {
    os << "{\n  \"meta\": {";
    for (std::size_t i = 0; i < meta_.size(); ++i) {
        os << (i == 0 ? "\n    " : ",\n    ");
        write_json_string(os, meta_[i].first);
        os << ": ";
        write_json_string(os, meta_[i].second);
    }
    os << "\n  },\n  \"rows\": [";
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        os << (r == 0 ? "\n    {" : ",\n    {");
        for (std::size_t c = 0; c < rows_[r].size(); ++c) {
            if (c > 0) os << ", ";
            write_json_string(os, columns_[c]);
            os << ": ";
            if (looks_numeric(rows_[r][c])) {
                os << rows_[r][c];
            } else {
                write_json_string(os, rows_[r][c]);
            }
        }
        os << '}';
    }
    os << "\n  ]\n}\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001B3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace uvclt
