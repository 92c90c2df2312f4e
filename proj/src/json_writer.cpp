#include "welfare/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace welfare {

std::string format_double17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void JsonWriter::separate() {
    if (after_key_) {
        after_key_ = false;
        return;
    }
    if (!levels_.empty()) {
        Level& level = levels_.back();
        if (!level.first) out_ << ',';
        if (level.one_per_line) out_ << '\n';
        level.first = false;
    }
}

void JsonWriter::write_string(std::string_view s) {
    out_ << '"';
    for (char c : s) {
        switch (c) {
            case '"': out_ << "\\\""; break;
            case '\\': out_ << "\\\\"; break;
            case '\n': out_ << "\\n"; break;
            case '\r': out_ << "\\r"; break;
            case '\t': out_ << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                    out_ << buf;
                } else {
                    out_ << c;
                }
        }
    }
    out_ << '"';
}

JsonWriter& JsonWriter::begin_object() {
    separate();
    out_ << '{';
    levels_.push_back({true, false});
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    levels_.pop_back();
    out_ << '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array(bool one_per_line) {
    separate();
    out_ << '[';
    levels_.push_back({true, one_per_line});
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    if (levels_.back().one_per_line && !levels_.back().first) out_ << '\n';
    levels_.pop_back();
    out_ << ']';
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    separate();
    write_string(k);
    out_ << ':';
    after_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double x) {
    if (!std::isfinite(x)) return null();
    separate();
    out_ << format_double17(x);
    return *this;
}

JsonWriter& JsonWriter::value(const std::optional<double>& x) {
    return x ? value(*x) : null();
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
    separate();
    out_ << x;
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    separate();
    out_ << (b ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
    separate();
    write_string(s);
    return *this;
}

JsonWriter& JsonWriter::null() {
    separate();
    out_ << "null";
    return *this;
}

}  // namespace welfare
