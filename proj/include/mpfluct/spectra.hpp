#pragma once

#include "mpfluct/chebyshev.hpp"
#include "mpfluct/ensembles.hpp"
#include "mpfluct/rational.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace mpfluct::spectra {

inline constexpr int kMaxTracePower = 20;
inline constexpr int kMaxGammaOrder = 12;
inline constexpr int kMaxChiralDimension = 256;

/// W = (1/n) Y Y* for an s x t data matrix Y.
struct CovarianceMatrix {
  Eigen::MatrixXcd w;
  int n = 0;
  int s = 0;
  int t = 0;
  std::uint64_t seed = 0;
};

/// Throws DomainError unless n >= 1.
CovarianceMatrix build_w(const Eigen::MatrixXcd& y, int n, std::uint64_t seed = 0);

/// Ascending eigenvalues of W. Throws NumericError if the solver fails.
Eigen::VectorXd eigenvalues(const CovarianceMatrix& w);
/// Eigenvalues of (1/n) Y Y^T without forming a complex matrix.
Eigen::VectorXd eigenvalues_real(const Eigen::MatrixXd& y, int n);

/// tr(W^k) for k = 1..k_max via the spectrum. Throws DomainError unless
/// 1 <= k_max <= 20.
std::vector<double> trace_powers(const CovarianceMatrix& w, int k_max);
std::vector<double> trace_powers_from_spectrum(const Eigen::VectorXd& spectrum, int k_max);
/// Same quantity through repeated matrix products; used as an oracle.
std::vector<double> trace_powers_by_products(const CovarianceMatrix& w, int k_max);

/// Coefficients sigma^{2k-2m} g'_{k,m}, m = 0..k, of Gamma_k(x, sigma) in
/// double precision.
std::vector<double> gamma_weights(int k, const Rational& y, const Rational& sigma2);

/// tr Gamma_k(W, sigma) from tr(W^m), m = 1..k, and the dimension s.
double trace_gamma_from_powers(const std::vector<double>& powers, int s, const std::vector<double>& weights);
/// Throws DomainError unless 0 <= k <= 12.
double trace_gamma(const CovarianceMatrix& w, int k, const Rational& y, const Rational& sigma2);

/// Hermitian (s+t) x (s+t) matrix [[0, Y], [Y*, 0]].
struct ChiralMatrix {
  Eigen::MatrixXcd h;
  int s = 0;
  int t = 0;
};

ChiralMatrix chiral_embed(const Eigen::MatrixXcd& y);

/// True for cells of the two zero diagonal blocks (0-based indices).
bool in_zero_block(int p, int q, int s, int t);
/// Grid cell behind an off-block entry of H; indices are 0-based. Throws
/// DomainError on the zero blocks or outside the matrix.
std::pair<int, int> psi(int p, int q, int s, int t);

/// tr((H / sqrt(n))^k), k = 1..k_max, by repeated products.
std::vector<double> chiral_trace_powers(const ChiralMatrix& h, int n, int k_max);

/// Relation on [s+t]^2 pulled back from the grid through psi, with each
/// zero-block pair {(p,q),(q,p)} as its own class.
struct ChiralRelation {
  int s = 0;
  int t = 0;
  std::vector<int> class_of;  // row-major over (s+t)^2
  std::int64_t alpha0_hat = 0;
  std::int64_t alpha2 = 0;

  int dimension() const { return s + t; }
  int class_at(int p, int q) const { return class_of[static_cast<std::size_t>(p) * static_cast<std::size_t>(s + t) + static_cast<std::size_t>(q)]; }
};

/// Throws SizeLimitError when s + t > 256.
ChiralRelation induced_chiral_relation(const ensembles::DependenceStructure& d);

}  // namespace mpfluct::spectra
