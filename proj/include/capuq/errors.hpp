#pragma once

#include <stdexcept>
#include <string>

namespace capuq {

/// Bad inputs, shapes, or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite loss or other numerical breakdown. The CLI maps this to exit code 3.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace capuq
