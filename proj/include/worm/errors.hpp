#pragma once

#include <stdexcept>
#include <string>

namespace worm {

/// Invalid parameters or violated preconditions. The CLI maps this to exit code 1.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A computation could not meet its numeric contract (tolerance not met,
/// count mismatch, double pole, divergent truncation, ...). CLI exit code 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace worm
