#pragma once

#include "mpfluct/rational.hpp"

#include <vector>

namespace mpfluct::chebyshev {

inline constexpr int kDefaultOrder = 32;
inline constexpr int kMaxOrder = 64;

/// Polynomial in x with exact rational coefficients; coefficients()[i]
/// multiplies x^i. Trailing zeros are trimmed, so the zero polynomial has
/// no coefficients.
class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coefficients);

  const std::vector<Rational>& coefficients() const { return coeffs_; }
  /// Coefficient of x^power, zero beyond the degree.
  Rational coefficient(int power) const;
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  Rational operator()(const Rational& x) const;
  double operator()(double x) const;

  RationalPoly shifted_up() const;  // x * p
  friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator*(const Rational& c, const RationalPoly& p);
  friend bool operator==(const RationalPoly&, const RationalPoly&) = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Monic Chebyshev polynomial of the first kind on [-2, 2]:
/// T_k(2 cos t) = 2 cos(k t). T_{-1} = 0 and T_0 = 1.
RationalPoly chebyshev_T(int k);

/// sqrt(y)^k T_k((x - (1 + y)) / sqrt(y)), expanded exactly. Throws
/// InvariantError if a half-integer power of y would survive.
RationalPoly gamma_poly(int k, const Rational& y);

/// sigma^{2k} Gamma_k(x / sigma^2), taking sigma^2 directly.
RationalPoly gamma_scaled(int k, const Rational& y, const Rational& sigma2);

/// Unit lower-triangular (K+1) x (K+1) matrix of exact rationals.
class CoeffTriangle {
 public:
  CoeffTriangle() = default;
  explicit CoeffTriangle(int order);
  int order() const { return order_; }
  const Rational& at(int row, int col) const;
  Rational& at(int row, int col);
  friend bool operator==(const CoeffTriangle&, const CoeffTriangle&) = default;

 private:
  int order_ = 0;
  std::vector<Rational> entries_;
  Rational zero_;
};

struct CoeffTriangles {
  CoeffTriangle gamma;          // g'_{k,m}: coefficient of x^m in Gamma_k
  CoeffTriangle gamma_inverse;  // g_{k,m}
};

/// Coefficient matrix of (Gamma_k)_{k<=K} and its exact inverse.
/// Throws DomainError unless 1 <= K <= 64.
CoeffTriangles coeff_triangles(int order, const Rational& y);

/// sum_j y^j C(k, j) C(k, m + j).
Rational g_closed_form(int k, int m, const Rational& y);

/// Limit k-th moment of the mean empirical spectral measure:
/// sigma^{2k}/k sum_i C(k,i) C(k,i-1) kappa^{i-1} mu^{k-i+1}.
Rational mp_moment(int k, const Rational& kappa, const Rational& mu, const Rational& sigma2);

}  // namespace mpfluct::chebyshev
