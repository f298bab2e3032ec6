#include "wfdeploy/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace wfdeploy {

namespace {

Integer parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
  }
  Integer value = 0;
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    }
    value = value * 10 + (ch - '0');
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  try {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      Integer num = parse_digits(text.substr(0, slash), text);
      Integer den = parse_digits(text.substr(slash + 1), text);
      if (den == 0) {
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
      }
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) {
      return Rational(parse_digits(text, text));
    }
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    Integer num = int_part.empty() ? Integer(0) : parse_digits(int_part, text);
    Integer den = 1;
    if (!frac_part.empty()) {
      Integer frac = parse_digits(frac_part, text);
      for (std::size_t i = 0; i < frac_part.size(); ++i) {
        den *= 10;
      }
      num = num * den + frac;
    }
    return Rational(num, den);
  } catch (const std::overflow_error&) {
    throw std::invalid_argument("number out of range '" + std::string(text) + "'");
  }
}

std::string format_rational(const Rational& value) {
  Integer num = value.numerator();
  Integer den = value.denominator();
  std::string sign;
  if (num < 0) {
    sign = "-";
    num = -num;
  }
  if (den == 1) {
    return sign + num.str();
  }

  Integer rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) {
    return sign + num.str() + "/" + den.str();
  }

  int places = std::max(twos, fives);
  Integer scale = 1;
  for (int i = 0; i < places; ++i) {
    scale *= 10;
  }
  Integer scaled = num * (scale / den);
  std::string digits = (scaled % scale).str();
  std::string frac(static_cast<std::size_t>(places) - digits.size(), '0');
  frac += digits;
  return sign + (scaled / scale).str() + "." + frac;
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

}  // namespace wfdeploy
