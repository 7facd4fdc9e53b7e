#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rwc/error.hpp"

namespace rwc::csv {

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw FormatError("cannot format number");
    return std::string(buf, ptr);
}

/// Fixed-point formatting for human-facing reports.
inline std::string format_fixed(double v, int digits) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    if (ec != std::errc{}) throw FormatError("cannot format number");
    return std::string(buf, ptr);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

template <class T>
T parse_number(std::string_view field, std::string_view what) {
    T value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw FormatError("bad " + std::string(what) + " value '" + std::string(field) + "'");
    return value;
}

inline bool parse_flag(std::string_view field, std::string_view what) {
    if (field == "1") return true;
    if (field == "0") return false;
    throw FormatError("bad " + std::string(what) + " flag '" + std::string(field) + "'");
}

/// Comma-separated file with a mandatory header row. Leading '#' lines carry
/// provenance and are exposed through comments().
class Reader {
public:
    Reader(const std::filesystem::path& path, std::string_view expected_header) : path_(path) {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open " + path.string());
        std::string line;
        bool header_seen = false;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line.front() == '#') {
                comments_.push_back(line);
                continue;
            }
            if (!header_seen) {
                if (line != expected_header)
                    throw FormatError(path.string() + ": expected header '" +
                                      std::string(expected_header) + "'");
                header_seen = true;
                columns_ = split(expected_header).size();
                continue;
            }
            rows_.push_back(line);
        }
        if (!header_seen) throw FormatError(path.string() + ": missing header row");
    }

    [[nodiscard]] std::size_t row_count() const noexcept { return rows_.size(); }

    /// Fields of row r; the column count is checked against the header.
    [[nodiscard]] std::vector<std::string_view> row(std::size_t r) const {
        auto fields = split(rows_.at(r));
        if (fields.size() != columns_)
            throw FormatError(path_.string() + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(columns_));
        return fields;
    }

    [[nodiscard]] const std::vector<std::string>& comments() const noexcept { return comments_; }

private:
    std::filesystem::path path_;
    std::size_t columns_ = 0;
    std::vector<std::string> rows_;
    std::vector<std::string> comments_;
};

/// Value of a `key=value` token in any provenance comment, or empty.
inline std::string comment_value(const std::vector<std::string>& comments, std::string_view key) {
    const std::string needle = std::string(key) + "=";
    for (const auto& c : comments) {
        std::istringstream tokens(c.substr(1));
        std::string tok;
        while (tokens >> tok)
            if (tok.rfind(needle, 0) == 0) return tok.substr(needle.size());
    }
    return {};
}

}  // namespace rwc::csv
