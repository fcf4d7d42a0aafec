#include "mpfluct/rational.hpp"

#include "mpfluct/errors.hpp"

#include <cctype>

namespace mpfluct {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw DomainError("empty rational literal");

  Rational r;
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw DomainError("rational literal mixes '.' and '/': " + s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const auto frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw DomainError("bad decimal literal: " + s);
    if (digits[0] == '+') digits.erase(0, 1);
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw DomainError("bad decimal literal: " + s);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    r = Rational(num, den);
  } else {
    std::string body = s;
    if (!body.empty() && body[0] == '+') body.erase(0, 1);
    if (r.set_str(body, 10) != 0) throw DomainError("bad rational literal: " + s);
    if (r.get_den() == 0) throw DomainError("zero denominator: " + s);
  }
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

Rational pow(const Rational& base, unsigned exponent) {
  Rational out(1);
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1U) out *= b;
    b *= b;
    exponent >>= 1U;
  }
  return out;
}

BigInt binomial(unsigned n, unsigned k) {
  BigInt out;
  if (k > n) return BigInt(0);
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

}  // namespace mpfluct
