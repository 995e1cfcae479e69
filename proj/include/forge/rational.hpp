#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "forge/error.hpp"

namespace forge {

// Masking probabilities are always 1/k, so 64-bit components never overflow.
using Rational = boost::rational<std::int64_t>;

// Ranking metrics sum fractions with unrelated denominators.
using BigRational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline std::string to_string(const BigRational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

/// Parses "n/d" (or a bare integer "n").
inline Rational parse_rational(const std::string& text) {
  try {
    std::size_t slash = text.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(text));
    std::size_t used = 0;
    std::int64_t num = std::stoll(text.substr(0, slash), &used);
    if (used != slash) throw ValidationError("bad numerator");
    std::string den_text = text.substr(slash + 1);
    std::int64_t den = std::stoll(den_text, &used);
    if (used != den_text.size() || den == 0) throw ValidationError("bad denominator");
    return Rational(num, den);
  } catch (const std::logic_error&) {
    throw ValidationError("malformed rational '" + text + "'");
  }
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline double to_double(const BigRational& r) { return r.convert_to<double>(); }

}  // namespace forge
