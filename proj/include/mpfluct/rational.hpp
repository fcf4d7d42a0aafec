#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mpfluct {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p", "p/q" or a plain decimal like "0.5"; the result is canonical.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& r);

Rational pow(const Rational& base, unsigned exponent);

BigInt binomial(unsigned n, unsigned k);

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace mpfluct
