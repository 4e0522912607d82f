#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

#include "cvlab/core/error.hpp"

namespace cvlab {

using Rational = mpq_class;

/// Parses "p/q" or "p" (optional leading '-') into a canonical rational.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty rational literal");
  auto digits = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && s[0] == '-') i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  const auto den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
  if (!digits(num, true) || (slash != std::string_view::npos && !digits(den, false)))
    throw InvalidInput("malformed rational literal '" + std::string(text) + "'");
  Rational r;
  r.get_num() = mpz_class(std::string(num));
  r.get_den() = slash == std::string_view::npos ? mpz_class(1) : mpz_class(std::string(den));
  if (r.get_den() == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Natural log of a positive rational, safe for numerators and denominators
/// far outside the double range.
inline double log_of(const Rational& r) {
  if (sgn(r) <= 0) throw InvalidInput("log of non-positive rational");
  auto log_z = [](const mpz_class& z) {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
  };
  return log_z(r.get_num()) - log_z(r.get_den());
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// Dyadic rational approximation of exp(x): the double result of std::exp
/// truncated to `bits` significant bits. Relative error is below 2^-(bits-1).
inline Rational dyadic_exp(double x, int bits = 44) {
  const double v = std::exp(x);
  int e = 0;
  const double frac = std::frexp(v, &e);  // v = frac * 2^e, frac in [0.5, 1)
  const double scaled = std::ldexp(frac, bits);
  Rational r{mpz_class(static_cast<long>(std::llround(scaled)))};
  const int shift = bits - e;
  if (shift > 0) {
    mpz_class den = 1;
    den <<= static_cast<mp_bitcnt_t>(shift);
    r /= den;
  } else if (shift < 0) {
    mpz_class mul = 1;
    mul <<= static_cast<mp_bitcnt_t>(-shift);
    r *= mul;
  }
  r.canonicalize();
  return r;
}

}  // namespace cvlab
