#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rankone {

// All heights, offsets and counts are arbitrary-precision integers; all widths
// and measures are exact rationals. Nothing in the library ever rounds.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Formats as "p/q", or just "p" when q == 1. This is the canonical exact form
// used in every data file the project writes.
std::string rational_string(const Rational& r);

// Accepts "p", "-p", "p/q" with q > 0 after normalization. Rejects anything
// else (floats in particular).
std::optional<Rational> parse_rational(std::string_view text);

// Lossless narrowing used by the 64-bit counting kernels.
std::optional<std::uint64_t> to_u64(const BigInt& value);

}  // namespace rankone
