#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace gauntlet {

// Exact arbitrary-precision rational. Always stored reduced with a positive
// denominator; every probability, payoff and expected value in the engine is
// one of these. No floating point anywhere in the core modules.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline Rational make_rational(BigInt num, BigInt den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline Rational rat(long long num, long long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

// Canonical text form: "n" when integral, "a/b" otherwise.
inline std::string rat_str(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Parses "a/b" or "n". Requires canonical input: reduced, denominator > 0.
inline Rational parse_rational(const std::string& s) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument("rational '" + s + "': " + why);
  };
  if (s.empty()) throw bad("empty");
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw bad("zero denominator");
    if (den < 0) throw bad("negative denominator (canonical form required)");
    if (gcd(abs(num), den) != 1) throw bad("not in reduced form");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw bad("malformed integer");
  }
}

inline Rational rat_pow(const Rational& base, unsigned long exp) {
  Rational out(1);
  Rational b = base;
  while (exp > 0) {
    if (exp & 1) out *= b;
    b *= b;
    exp >>= 1;
  }
  return out;
}

}  // namespace gauntlet
