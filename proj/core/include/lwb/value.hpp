#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace lwb {

/// Scalar attribute value: the result of a token conversion, a constant flag
/// or enum, or a computed attribute.
using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

/// Human readable rendering (strings unquoted, floats in shortest form).
std::string to_display(const Value& v);

/// Numeric view of int and float values; throws for other kinds.
double as_number(const Value& v);

}  // namespace lwb
