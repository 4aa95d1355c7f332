#pragma once

#include <stdexcept>
#include <string>

namespace chebrec {

/// Invalid input: bad dimensions, malformed config, out-of-range arguments.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: singular collocation submatrix, failed optimality
/// certificate, simplex cycling guard, basis rejected by the Chebyshev check.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what, int subinterval = -1)
        : std::runtime_error(what), subinterval_(subinterval) {}

    /// 0-based index of the offending subinterval, or -1 when not applicable.
    [[nodiscard]] int subinterval() const noexcept { return subinterval_; }

private:
    int subinterval_;
};

/// Filesystem or format failure while reading/writing artifacts.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chebrec
