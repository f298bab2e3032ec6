#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <string>
#include <string_view>

namespace wfdeploy {

// Exact non-float scalar used for every cost, size and time in the library.
// Overflow of the 128-bit numerator/denominator throws std::overflow_error.
using Integer = boost::multiprecision::checked_int128_t;
using Rational = boost::rational<Integer>;

/// Parses `12`, `0.25` or `3/8`. Negative values and exponents are rejected.
/// Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// Exact decimal when the denominator is of the form 2^a 5^b, `p/q` otherwise.
/// parse_rational(format_rational(q)) == q for every non-negative q.
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

}  // namespace wfdeploy

namespace boost {

// Under C++20 rewritten comparisons, boost::rational's templated equality
// against a builtin integer recurses forever (Boost <= 1.74). These exact
// overloads win overload resolution and route through rational == rational.
inline bool operator==(const wfdeploy::Rational& a, int b) { return a == wfdeploy::Rational(b); }
inline bool operator==(const wfdeploy::Rational& a, long long b) {
  return a == wfdeploy::Rational(b);
}

}  // namespace boost
