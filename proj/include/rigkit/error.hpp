#pragma once

#include <stdexcept>
#include <string>

namespace rigkit {

// Anything wrong with user-supplied data: invalid rigs, malformed files,
// inconsistent shapes.  The CLI maps these to exit code 1.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Parse failure with a 1-based line number for diagnostics.
struct ParseError : DataError {
    size_t line = 0;

    ParseError(const std::string& what, size_t line_)
        : DataError(what + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

}  // namespace rigkit
