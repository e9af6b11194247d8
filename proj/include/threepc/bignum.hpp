#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace threepc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

/// 16^exponent, the size of the digest space for `exponent` nibbles.
BigInt pow16(std::size_t exponent);

double to_double(const Rational& value);
double to_double(const BigInt& value);

/// Natural logarithm of a positive rational, accurate far beyond double range.
double log_of(const Rational& value);

std::string to_decimal(const BigInt& value);

/// Renders a rational with `digits` significant digits (scientific when large or tiny).
std::string format_real(const Rational& value, int digits = 15);

/// Parses a non-negative decimal such as "20", "0.5" or "1e-3" exactly.
/// Throws std::invalid_argument on malformed input.
Rational parse_decimal(std::string_view text);

/// Parses a non-negative decimal integer. Throws std::invalid_argument.
BigInt parse_bigint(std::string_view text);

} // namespace threepc
