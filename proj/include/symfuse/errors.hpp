#pragma once

#include <stdexcept>
#include <string>

namespace symfuse {

/// File, format or input-shape problem (bad CSV row, truncated image,
/// incomplete score panel, too few training shots). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric contract violation (response magnitude out of range, non-positive
/// variance, kernel larger than the image). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace symfuse
