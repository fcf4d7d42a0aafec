#include "mpfluct/chebyshev.hpp"

#include "mpfluct/errors.hpp"

#include <string>

namespace mpfluct::chebyshev {

RationalPoly::RationalPoly(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

void RationalPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPoly::coefficient(int power) const {
  if (power < 0 || power > degree()) return Rational(0);
  return coeffs_[static_cast<std::size_t>(power)];
}

Rational RationalPoly::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RationalPoly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

RationalPoly RationalPoly::shifted_up() const {
  if (coeffs_.empty()) return {};
  std::vector<Rational> out;
  out.reserve(coeffs_.size() + 1);
  out.emplace_back(0);
  out.insert(out.end(), coeffs_.begin(), coeffs_.end());
  return RationalPoly(std::move(out));
}

RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
  const auto n = std::max(a.coeffs_.size(), b.coeffs_.size());
  std::vector<Rational> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.coefficient(static_cast<int>(i)) + b.coefficient(static_cast<int>(i));
  return RationalPoly(std::move(out));
}

RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) { return a + Rational(-1) * b; }

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return RationalPoly(std::move(out));
}

RationalPoly operator*(const Rational& c, const RationalPoly& p) {
  std::vector<Rational> out = p.coeffs_;
  for (auto& x : out) x *= c;
  return RationalPoly(std::move(out));
}

RationalPoly chebyshev_T(int k) {
  if (k < -1) throw DomainError("chebyshev_T needs k >= -1");
  if (k == -1) return {};
  RationalPoly prev;                           // T_{-1}
  RationalPoly cur(std::vector<Rational>{1});  // T_0
  for (int i = 0; i < k; ++i) {
    // x T_i = T_{i+1} + (1 + [i == 1]) T_{i-1}
    RationalPoly next = cur.shifted_up() - Rational(i == 1 ? 2 : 1) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

RationalPoly gamma_poly(int k, const Rational& y) {
  if (k < 0) throw DomainError("gamma_poly needs k >= 0");
  if (y <= 0) throw DomainError("gamma_poly needs y > 0");
  const RationalPoly t = chebyshev_T(k);
  const RationalPoly shift(std::vector<Rational>{-(1 + y), Rational(1)});
  RationalPoly out;
  RationalPoly shift_power(std::vector<Rational>{1});
  for (int d = 0; d <= k; ++d) {
    const Rational c = t.coefficient(d);
    if ((k - d) % 2 != 0) {
      if (c != 0) throw InvariantError("odd power of sqrt(y) survives in Gamma_" + std::to_string(k));
    } else if (c != 0) {
      out = out + (c * pow(y, static_cast<unsigned>((k - d) / 2))) * shift_power;
    }
    shift_power = shift_power * shift;
  }
  return out;
}

RationalPoly gamma_scaled(int k, const Rational& y, const Rational& sigma2) {
  if (sigma2 <= 0) throw DomainError("gamma_scaled needs sigma^2 > 0");
  const RationalPoly base = gamma_poly(k, y);
  std::vector<Rational> out(static_cast<std::size_t>(k) + 1);
  for (int m = 0; m <= k; ++m) out[static_cast<std::size_t>(m)] = pow(sigma2, static_cast<unsigned>(k - m)) * base.coefficient(m);
  return RationalPoly(std::move(out));
}

CoeffTriangle::CoeffTriangle(int order)
    : order_(order), entries_(static_cast<std::size_t>((order + 1) * (order + 1))) {
  for (int i = 0; i <= order; ++i) at(i, i) = 1;
}

const Rational& CoeffTriangle::at(int row, int col) const {
  if (row < 0 || col < 0 || row > order_ || col > order_) throw DomainError("triangle index out of range");
  if (col > row) return zero_;
  return entries_[static_cast<std::size_t>(row * (order_ + 1) + col)];
}

Rational& CoeffTriangle::at(int row, int col) {
  if (row < 0 || col < 0 || row > order_ || col > row) throw DomainError("triangle index out of range");
  return entries_[static_cast<std::size_t>(row * (order_ + 1) + col)];
}

CoeffTriangles coeff_triangles(int order, const Rational& y) {
  if (order < 1 || order > kMaxOrder)
    throw DomainError("coefficient triangles need 1 <= K <= " + std::to_string(kMaxOrder));
  CoeffTriangles out{CoeffTriangle(order), CoeffTriangle(order)};
  for (int k = 0; k <= order; ++k) {
    const RationalPoly p = gamma_poly(k, y);
    for (int m = 0; m < k; ++m) out.gamma.at(k, m) = p.coefficient(m);
  }
  // Forward substitution for the unit lower-triangular inverse.
  for (int i = 1; i <= order; ++i) {
    for (int j = i - 1; j >= 0; --j) {
      Rational acc(0);
      for (int l = j; l < i; ++l) acc += out.gamma.at(i, l) * out.gamma_inverse.at(l, j);
      out.gamma_inverse.at(i, j) = -acc;
    }
  }
  return out;
}

Rational g_closed_form(int k, int m, const Rational& y) {
  if (k < 0 || m < 0 || m > k) throw DomainError("g_closed_form needs 0 <= m <= k");
  Rational out(0);
  for (int j = 0; j <= k - m; ++j) {
    const BigInt count = binomial(static_cast<unsigned>(k), static_cast<unsigned>(j)) *
                         binomial(static_cast<unsigned>(k), static_cast<unsigned>(m + j));
    out += pow(y, static_cast<unsigned>(j)) * Rational(count);
  }
  return out;
}

Rational mp_moment(int k, const Rational& kappa, const Rational& mu, const Rational& sigma2) {
  if (k < 1) throw DomainError("mp_moment needs k >= 1");
  Rational sum(0);
  for (int i = 1; i <= k; ++i) {
    const BigInt c = binomial(static_cast<unsigned>(k), static_cast<unsigned>(i)) *
                     binomial(static_cast<unsigned>(k), static_cast<unsigned>(i - 1));
    sum += Rational(c) * pow(kappa, static_cast<unsigned>(i - 1)) * pow(mu, static_cast<unsigned>(k - i + 1));
  }
  return pow(sigma2, static_cast<unsigned>(k)) * sum / Rational(k);
}

}  // namespace mpfluct::chebyshev
