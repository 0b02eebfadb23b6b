#pragma once

// Arithmetic in one variable z: numbers, z, + - * / ^, parentheses and unary
// minus. ^ binds tighter than unary minus and associates to the right, so
// -z^2 is -(z^2) and 2^3^2 is 2^9.

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spdlm::cli {

class ExpressionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Compiled expression; cheap to copy and safe to call from several threads.
using Expression = std::function<double(double)>;

/// Throws ExpressionError with the offending column on malformed input.
[[nodiscard]] Expression parse_expression(std::string_view text);

}  // namespace spdlm::cli
