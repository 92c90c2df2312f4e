#pragma once

// Minimal streaming JSON writer that prints every double with 17 significant
// digits, so output parses back to the identical bit pattern.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace welfare {

std::string format_double17(double x);

class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    JsonWriter& begin_object();
    JsonWriter& end_object();
    /// With one_per_line, each element starts on its own line.
    JsonWriter& begin_array(bool one_per_line = false);
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);

    JsonWriter& value(double x);  // non-finite values become null
    JsonWriter& value(const std::optional<double>& x);
    JsonWriter& value(std::uint64_t x);
    JsonWriter& value(bool b);
    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& null();

    template <typename T>
    JsonWriter& field(std::string_view k, const T& v) {
        key(k);
        return value(v);
    }

private:
    void separate();
    void write_string(std::string_view s);

    std::ostream& out_;
    struct Level {
        bool first;
        bool one_per_line;
    };
    std::vector<Level> levels_;  // one entry per open container
    bool after_key_ = false;
};

}  // namespace welfare
