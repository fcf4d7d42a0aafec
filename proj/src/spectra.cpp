#include "mpfluct/spectra.hpp"

#include "mpfluct/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>

namespace mpfluct::spectra {

CovarianceMatrix build_w(const Eigen::MatrixXcd& y, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("n must be positive");
  CovarianceMatrix out;
  out.w = (y * y.adjoint()) / static_cast<double>(n);
  out.n = n;
  out.s = static_cast<int>(y.rows());
  out.t = static_cast<int>(y.cols());
  out.seed = seed;
  return out;
}

Eigen::VectorXd eigenvalues(const CovarianceMatrix& w) {
  if (w.w.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(w.w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

Eigen::VectorXd eigenvalues_real(const Eigen::MatrixXd& y, int n) {
  if (n < 1) throw DomainError("n must be positive");
  if (y.rows() == 0) return {};
  Eigen::MatrixXd w = (y * y.transpose()) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

namespace {

void check_power(int k_max) {
  if (k_max < 1 || k_max > kMaxTracePower) {
    throw DomainError("trace powers limited to 1 <= k <= " + std::to_string(kMaxTracePower));
  }
}

}  // namespace

std::vector<double> trace_powers_from_spectrum(const Eigen::VectorXd& spectrum, int k_max) {
  check_power(k_max);
  std::vector<double> out(static_cast<std::size_t>(k_max), 0.0);
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    double power = 1.0;
    for (int k = 0; k < k_max; ++k) {
      power *= spectrum[i];
      out[static_cast<std::size_t>(k)] += power;
    }
  }
  for (double v : out) {
    if (!std::isfinite(v)) throw NumericError("non-finite trace power");
  }
  return out;
}

std::vector<double> trace_powers(const CovarianceMatrix& w, int k_max) {
  check_power(k_max);
  return trace_powers_from_spectrum(eigenvalues(w), k_max);
}

std::vector<double> trace_powers_by_products(const CovarianceMatrix& w, int k_max) {
  check_power(k_max);
  std::vector<double> out;
  Eigen::MatrixXcd power = w.w;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) power = power * w.w;
    out.push_back(power.trace().real());
  }
  return out;
}

std::vector<double> gamma_weights(int k, const Rational& y, const Rational& sigma2) {
  if (k < 0 || k > kMaxGammaOrder) throw DomainError("Gamma order limited to 0 <= k <= " + std::to_string(kMaxGammaOrder));
  const auto poly = chebyshev::gamma_scaled(k, y, sigma2);
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (int m = 0; m <= k; ++m) out[static_cast<std::size_t>(m)] = to_double(poly.coefficient(m));
  return out;
}

double trace_gamma_from_powers(const std::vector<double>& powers, int s, const std::vector<double>& weights) {
  double total = weights.empty() ? 0.0 : weights[0] * s;
  for (std::size_t m = 1; m < weights.size(); ++m) {
    if (m > powers.size()) throw DomainError("not enough trace powers for this Gamma order");
    total += weights[m] * powers[m - 1];
  }
  return total;
}

double trace_gamma(const CovarianceMatrix& w, int k, const Rational& y, const Rational& sigma2) {
  const auto weights = gamma_weights(k, y, sigma2);
  if (k == 0) return weights[0] * w.s;
  return trace_gamma_from_powers(trace_powers(w, k), w.s, weights);
}

ChiralMatrix chiral_embed(const Eigen::MatrixXcd& y) {
  ChiralMatrix out;
  out.s = static_cast<int>(y.rows());
  out.t = static_cast<int>(y.cols());
  const int dim = out.s + out.t;
  out.h = Eigen::MatrixXcd::Zero(dim, dim);
  out.h.topRightCorner(out.s, out.t) = y;
  out.h.bottomLeftCorner(out.t, out.s) = y.adjoint();
  return out;
}

bool in_zero_block(int p, int q, int s, int t) {
  const bool p_upper = p < s;
  const bool q_upper = q < s;
  (void)t;
  return p_upper == q_upper;
}

std::pair<int, int> psi(int p, int q, int s, int t) {
  const int dim = s + t;
  if (p < 0 || q < 0 || p >= dim || q >= dim) throw DomainError("index outside the chiral matrix");
  if (in_zero_block(p, q, s, t)) throw DomainError("psi is undefined on the zero diagonal blocks");
  if (q >= s) return {p, q - s};
  return {q, p - s};
}

std::vector<double> chiral_trace_powers(const ChiralMatrix& h, int n, int k_max) {
  if (n < 1) throw DomainError("n must be positive");
  if (k_max < 1 || k_max > 2 * kMaxTracePower + 1) throw DomainError("chiral trace power out of range");
  const Eigen::MatrixXcd scaled = h.h / std::sqrt(static_cast<double>(n));
  std::vector<double> out;
  Eigen::MatrixXcd power = scaled;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) power = power * scaled;
    out.push_back(power.trace().real());
  }
  return out;
}

ChiralRelation induced_chiral_relation(const ensembles::DependenceStructure& d) {
  const int s = d.s();
  const int t = d.t();
  const int dim = s + t;
  if (dim > kMaxChiralDimension) throw SizeLimitError("chiral relation limited to s + t <= 256");
  ChiralRelation out;
  out.s = s;
  out.t = t;
  out.class_of.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), -1);
  int next = d.class_count();
  for (int p = 0; p < dim; ++p) {
    for (int q = 0; q < dim; ++q) {
      auto& slot = out.class_of[static_cast<std::size_t>(p) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(q)];
      if (!in_zero_block(p, q, s, t)) {
        const auto [a, b] = psi(p, q, s, t);
        slot = d.class_of(a, b);
      } else if (p <= q) {
        slot = next++;
        out.class_of[static_cast<std::size_t>(q) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(p)] = slot;
      }
    }
  }
  std::map<int, std::int64_t> sizes;
  for (int c : out.class_of) ++sizes[c];
  for (const auto& [c, size] : sizes) out.alpha2 = std::max(out.alpha2, size);
  for (int p = 0; p < dim; ++p) {
    for (int q = 0; q < dim; ++q) {
      const int c = out.class_at(p, q);
      for (int p2 = 0; p2 < dim; ++p2) {
        if (p2 != p && out.class_at(q, p2) == c) ++out.alpha0_hat;
      }
    }
  }
  return out;
}

}  // namespace mpfluct::spectra
