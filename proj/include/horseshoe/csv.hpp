#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace horseshoe::csv {

/// Malformed input; line() is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// Shortest decimal string that reads back to the same double.
inline std::string format(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
    if (r.ec != std::errc() || r.ptr != field.data() + field.size())
        throw ParseError("not a number: '" + std::string(field) + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite value: '" + std::string(field) + "'", line);
    return v;
}

/// Reads a single-column CSV whose header is `y`. Blank lines and lines
/// starting with '#' are skipped.
inline std::vector<double> read_y_column(std::istream& in) {
    std::vector<double> ys;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header_seen) {
            if (t != "y") throw ParseError("expected header 'y', got '" + std::string(t) + "'", lineno);
            header_seen = true;
            continue;
        }
        if (t.find(',') != std::string_view::npos)
            throw ParseError("expected a single column", lineno);
        ys.push_back(parse_double(t, lineno));
    }
    if (!header_seen) throw ParseError("missing header 'y'", lineno + 1);
    return ys;
}

/// Writes one row; doubles go through format().
class RowWriter {
public:
    explicit RowWriter(std::ostream& out) : out_(out) {}

    RowWriter& operator<<(double v) { return field(format(v)); }
    RowWriter& operator<<(std::string_view s) { return field(s); }
    RowWriter& operator<<(const char* s) { return field(s); }
    RowWriter& operator<<(std::size_t v) { return field(std::to_string(v)); }
    RowWriter& operator<<(unsigned long long v) { return field(std::to_string(v)); }
    void end() {
        out_ << '\n';
        first_ = true;
    }

private:
    RowWriter& field(std::string_view s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }
    std::ostream& out_;
    bool first_ = true;
};

}  // namespace horseshoe::csv
