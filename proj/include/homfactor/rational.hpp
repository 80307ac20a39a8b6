#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "homfactor/errors.hpp"

namespace homfactor {

// All ratios in the toolkit are exact; no floating point enters any decision.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& i) { return i.str(); }

// Canonical "p/q" (or "p" when q == 1), matching what parse_rational accepts.
inline std::string to_string(const Rational& r) {
  BigInt num = numerator(r), den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw FileParseError("rational with zero denominator: " + text);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw FileParseError("malformed rational: '" + text + "'");
  }
}

inline BigInt pow_bigint(BigInt base, unsigned long exp) {
  BigInt r = 1;
  while (exp > 0) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

inline BigInt binomial(unsigned long n, unsigned long k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (unsigned long i = 1; i <= k; ++i) {
    r *= BigInt(n - k + i);
    r /= BigInt(i);  // exact: r is a binomial coefficient at each step
  }
  return r;
}

// Largest integer s with 2^s <= n^k, i.e. floor(k*log2(n)). Exact.
inline long floor_log2_pow(unsigned long n, unsigned long k) {
  if (n < 1) throw Error("floor_log2_pow: n must be >= 1");
  if (n == 1) return 0;
  BigInt target = pow_bigint(BigInt(n), k);
  long s = 0;
  BigInt p = 2;  // 2^(s+1)
  while (p <= target) {
    ++s;
    p *= 2;
  }
  return s;
}

// Smallest integer s with 2^s >= n^k, i.e. ceil(k*log2(n)). Exact.
inline long ceil_log2_pow(unsigned long n, unsigned long k) {
  long f = floor_log2_pow(n, k);
  if (pow_bigint(2, static_cast<unsigned long>(f)) == pow_bigint(BigInt(n), k)) return f;
  return f + 1;
}

// Rational bounds on log2(n) with denominator `den`: the tightest p/den with
// 2^p <= n^den (lower) resp. 2^p >= n^den (upper). Both exact by construction.
inline Rational log2_lower(unsigned long n, unsigned long den = 4096) {
  return Rational(BigInt(floor_log2_pow(n, den)), BigInt(den));
}

inline Rational log2_upper(unsigned long n, unsigned long den = 4096) {
  return Rational(BigInt(ceil_log2_pow(n, den)), BigInt(den));
}

inline Rational pow_rational(const Rational& base, unsigned long exp) {
  return Rational(pow_bigint(numerator(base), exp), pow_bigint(denominator(base), exp));
}

// Decimal rendering with `digits` places, truncated toward zero. Only used for
// plot data; reports keep exact fractions.
inline std::string to_decimal_string(const Rational& r, int digits = 9) {
  BigInt num = numerator(r), den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  BigInt scaled = num * pow_bigint(10, static_cast<unsigned long>(digits)) / den;
  std::string s = scaled.str();
  std::string pad(digits + 1 > static_cast<int>(s.size()) ? digits + 1 - s.size() : 0, '0');
  s = pad + s;
  std::string out = s.substr(0, s.size() - digits) + "." + s.substr(s.size() - digits);
  return (neg && scaled != 0) ? "-" + out : out;
}

}  // namespace homfactor
