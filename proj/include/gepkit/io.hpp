#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gepkit/errors.hpp"
#include "gepkit/matrix.hpp"

namespace gepkit {

/// Shortest fixed-precision form that round-trips any finite double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline bool try_parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0' && errno != ERANGE;
}

inline bool try_parse_size(const std::string& tok, std::size_t& out) {
    if (tok.empty() || tok[0] == '-') return false;
    const char* begin = tok.c_str();
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x",
                                  static_cast<unsigned>(ch));
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

}  // namespace detail

/// Text matrix format: first content line "rows cols", then one line per row
/// of space-separated decimals; '#' starts a comment. Errors name the file
/// and line.
inline Matrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> tokens;

    const auto next_content = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            tokens.clear();
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    };
    const auto fail = [&](const std::string& msg) {
        return ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    if (!next_content()) throw ParseError(path + ": missing 'rows cols' header");
    std::size_t rows = 0, cols = 0;
    if (tokens.size() != 2 || !detail::try_parse_size(tokens[0], rows) ||
        !detail::try_parse_size(tokens[1], cols) || rows < 1 || cols < 1)
        throw fail("header must be two positive integers 'rows cols'");

    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!next_content())
            throw ParseError(path + ": file ends after " + std::to_string(r) +
                             " of " + std::to_string(rows) + " rows");
        if (tokens.size() != cols)
            throw fail("expected " + std::to_string(cols) + " values, got " +
                       std::to_string(tokens.size()));
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            if (!detail::try_parse_double(tokens[c], v))
                throw fail("bad number '" + tokens[c] + "'");
            m(r, c) = v;
        }
    }
    if (next_content()) throw fail("unexpected content after last row");
    return m;
}

/// Writes the text matrix format; values as %.17g so reading back restores
/// the exact doubles. An optional comment becomes a leading '#' line.
inline void write_matrix(const std::string& path, const Matrix& m,
                         const std::string& comment = "") {
    std::ofstream out(path);
    if (!out) throw Error(path + ": cannot open file for writing");
    if (!comment.empty()) out << "# " << comment << '\n';
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ' ';
            out << fmt17(m(r, c));
        }
        out << '\n';
    }
    if (!out) throw Error(path + ": write failed");
}

/// Streaming JSON writer with two-space indentation. Doubles print as %.17g
/// (non-finite values as strings), so identical data serializes to identical
/// bytes. The caller balances begin/end calls.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    JsonWriter& begin_object() {
        place();
        out_ << '{';
        stack_.push_back({false, 0});
        return *this;
    }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() {
        place();
        out_ << '[';
        stack_.push_back({true, 0});
        return *this;
    }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& name) {
        Level& top = stack_.back();
        if (top.count > 0) out_ << ',';
        ++top.count;
        out_ << '\n';
        indent();
        out_ << '"' << detail::json_escape(name) << "\": ";
        key_pending_ = true;
        return *this;
    }

    JsonWriter& value(double v) {
        place();
        if (std::isfinite(v))
            out_ << fmt17(v);
        else
            out_ << '"' << fmt17(v) << '"';
        return *this;
    }
    JsonWriter& value(bool b) {
        place();
        out_ << (b ? "true" : "false");
        return *this;
    }
    JsonWriter& value(const std::string& s) {
        place();
        out_ << '"' << detail::json_escape(s) << '"';
        return *this;
    }
    JsonWriter& value(const char* s) { return value(std::string(s)); }
    JsonWriter& value(std::uint64_t n) {
        place();
        out_ << n;
        return *this;
    }
    JsonWriter& value(std::int64_t n) {
        place();
        out_ << n;
        return *this;
    }

    void finish() { out_ << '\n'; }

private:
    struct Level {
        bool is_array;
        std::size_t count;
    };

    void indent() {
        for (std::size_t i = 0; i < stack_.size(); ++i) out_ << "  ";
    }
    void place() {
        if (key_pending_) {
            key_pending_ = false;
            return;
        }
        if (stack_.empty()) return;
        Level& top = stack_.back();
        if (top.count > 0) out_ << ',';
        ++top.count;
        out_ << '\n';
        indent();
    }
    JsonWriter& close(char closer) {
        const Level lv = stack_.back();
        stack_.pop_back();
        if (lv.count > 0) {
            out_ << '\n';
            indent();
        }
        out_ << closer;
        return *this;
    }

    std::ostream& out_;
    std::vector<Level> stack_;
    bool key_pending_ = false;
};

}  // namespace gepkit
