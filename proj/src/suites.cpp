#include "mpfluct/suites.hpp"

#include "mpfluct/chebyshev.hpp"
#include "mpfluct/ensembles.hpp"
#include "mpfluct/errors.hpp"
#include "mpfluct/montecarlo.hpp"
#include "mpfluct/partitions.hpp"
#include "mpfluct/spectra.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace mpfluct::suites {

namespace {

using chebyshev::RationalPoly;

Check timed(const std::string& name, const std::function<std::string()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  check.name = name;
  try {
    check.detail = body();
    check.passed = check.detail.rfind("ok", 0) == 0;
  } catch (const std::exception& e) {
    check.passed = false;
    check.detail = std::string("exception: ") + e.what();
  }
  check.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check;
}

const std::vector<Rational>& sample_ratios() {
  static const std::vector<Rational> ys{Rational(1, 2), Rational(1), Rational(2), Rational(7, 3)};
  return ys;
}

std::string inverse_matches_closed_form() {
  int compared = 0;
  for (const auto& y : sample_ratios()) {
    const auto tri = chebyshev::coeff_triangles(16, y);
    for (int k = 0; k <= 16; ++k) {
      for (int m = 0; m <= k; ++m) {
        if (tri.gamma_inverse.at(k, m) != chebyshev::g_closed_form(k, m, y)) {
          return "mismatch at y=" + to_string(y) + " k=" + std::to_string(k) + " m=" + std::to_string(m);
        }
        ++compared;
      }
    }
  }
  return "ok: " + std::to_string(compared) + " coefficients";
}

std::string half_pair_bijection() {
  long long total = 0;
  for (int k = 1; k <= 6; ++k) {
    for (int m = 1; m <= k; ++m) {
      for (int j = 0; j <= k - m; ++j) {
        const auto all = partitions::enumerate_nhpp(k, m, j);
        const BigInt expected = binomial(static_cast<unsigned>(k), static_cast<unsigned>(j)) *
                                binomial(static_cast<unsigned>(k), static_cast<unsigned>(m + j));
        const std::string at = " at k=" + std::to_string(k) + " m=" + std::to_string(m) + " j=" + std::to_string(j);
        if (BigInt(static_cast<unsigned long>(all.size())) != expected) return "count mismatch" + at;
        if (partitions::enumerate_dot_structures(j, m, k).size() != all.size()) return "dot structure count mismatch" + at;
        for (const auto& pi : all) {
          const auto dots = partitions::dot_bijection(pi);
          if (dots.j() != j || dots.m() != m) return "dot statistics mismatch" + at;
          if (!(partitions::dot_bijection_inverse(dots) == pi)) return "round trip failed" + at;
        }
        total += static_cast<long long>(all.size());
      }
    }
  }
  return "ok: " + std::to_string(total) + " half pair partitions";
}

std::string recurrences(int order) {
  const RationalPoly x(std::vector<Rational>{0, 1});
  for (int k = 1; k < order; ++k) {
    const auto lhs = x * chebyshev::chebyshev_T(k);
    const auto rhs = chebyshev::chebyshev_T(k + 1) + Rational(k == 1 ? 2 : 1) * chebyshev::chebyshev_T(k - 1);
    if (!(lhs == rhs)) return "Chebyshev recurrence fails at k=" + std::to_string(k);
  }
  for (const auto& y : sample_ratios()) {
    const std::string at = " for y=" + to_string(y);
    std::vector<RationalPoly> g;
    for (int k = 0; k <= order; ++k) g.push_back(chebyshev::gamma_poly(k, y));
    if (!(g[1] == RationalPoly(std::vector<Rational>{-(1 + y), 1}))) return "Gamma_1 wrong" + at;
    for (int k = 1; k < order; ++k) {
      const auto lhs = x * g[static_cast<std::size_t>(k)];
      const auto rhs = g[static_cast<std::size_t>(k + 1)] + (1 + y) * g[static_cast<std::size_t>(k)] +
                       Rational(k == 1 ? 2 : 1) * y * g[static_cast<std::size_t>(k - 1)];
      if (!(lhs == rhs)) return "shifted recurrence fails at k=" + std::to_string(k) + at;
    }
    const auto tri = chebyshev::coeff_triangles(order, y);
    const auto& gi = tri.gamma_inverse;
    for (int k = 1; k < order; ++k) {
      if (gi.at(k + 1, 0) != (1 + y) * gi.at(k, 0) + 2 * y * gi.at(k, 1))
        return "boundary inverse recurrence fails at k=" + std::to_string(k) + at;
      for (int m = 1; m <= k + 1; ++m) {
        const Rational next = m + 1 <= k ? gi.at(k, m + 1) : Rational(0);
        const Rational here = m <= k ? gi.at(k, m) : Rational(0);
        if (gi.at(k + 1, m) != gi.at(k, m - 1) + (1 + y) * here + y * next)
          return "inverse recurrence fails at k=" + std::to_string(k) + " m=" + std::to_string(m) + at;
      }
    }
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; b <= a; ++b) {
        Rational acc = 0;
        for (int k = b; k <= a; ++k) acc += tri.gamma.at(a, k) * gi.at(k, b);
        if (acc != (a == b ? 1 : 0)) return "triangles are not inverse at (" + std::to_string(a) + "," + std::to_string(b) + ")" + at;
      }
    }
  }
  return "ok: orders up to " + std::to_string(order);
}

std::string counts_generate_inverse() {
  for (const auto& y : sample_ratios()) {
    for (int k = 1; k <= 8; ++k) {
      for (int m = 1; m <= k; ++m) {
        Rational sum = 0;
        for (int j = 0; j <= k - m; ++j) sum += pow(y, static_cast<unsigned>(j)) * Rational(partitions::nhpp_count(k, m, j));
        if (sum != chebyshev::g_closed_form(k, m, y)) return "generating function mismatch at k=" + std::to_string(k);
      }
    }
  }
  return "ok";
}

std::vector<ensembles::StructureSpec> builtin_specs() {
  return {ensembles::StructureSpec::independent(), ensembles::StructureSpec::column_block(2),
          ensembles::StructureSpec::column_block(3), ensembles::StructureSpec::row_pair(),
          ensembles::StructureSpec::duplicate_patch(2, 2), ensembles::StructureSpec::duplicate_patch(3, 2)};
}

std::string beta_relations() {
  int tested = 0;
  for (const auto& spec : builtin_specs()) {
    for (int s = 1; s <= 8; ++s) {
      for (int t = 1; t <= 8; ++t) {
        const auto d = ensembles::make_structure(spec, s, t);
        const auto b = ensembles::beta_stats(d);
        const std::string at = " for " + spec.name() + " on " + std::to_string(s) + "x" + std::to_string(t);
        if (b.beta3 > b.beta2) return "beta3 > beta2" + at;
        if (b.beta1 > std::max(s, t) * b.beta2) return "beta1 > max(s,t) beta2" + at;
        const auto chiral = spectra::induced_chiral_relation(d);
        if (chiral.alpha2 != 2 * b.beta2) return "alpha2 != 2 beta2" + at;
        if (chiral.alpha0_hat > 2 * b.beta0) return "alpha0 > 2 beta0" + at;
        ++tested;
      }
    }
  }
  const auto ind = ensembles::beta_stats(ensembles::make_structure(ensembles::StructureSpec::independent(), 3, 3));
  if (!(ind == ensembles::BetaStats{0, 3, 1, 1})) return "independent 3x3 statistics wrong";
  const auto blk = ensembles::beta_stats(ensembles::make_structure(ensembles::StructureSpec::column_block(2), 4, 4));
  if (blk.beta0 != 16 || blk.beta2 != 2 || blk.beta3 != 2) return "column_block(2) 4x4 statistics wrong";
  return "ok: " + std::to_string(tested) + " structures";
}

std::vector<ensembles::EntryModel> builtin_models() {
  using ensembles::EntryModel;
  using ensembles::Marginal;
  using ensembles::ModelKind;
  return {EntryModel{ModelKind::GaussianReal, 1, 0, Marginal::GaussianReal},
          EntryModel{ModelKind::GaussianComplex, 2, 0, Marginal::GaussianReal},
          EntryModel{ModelKind::Rademacher, 1, 0, Marginal::GaussianReal},
          EntryModel{ModelKind::ClassConstant, 3, 0, Marginal::GaussianReal},
          EntryModel{ModelKind::ClassConstant, 1, 0, Marginal::GaussianComplex},
          EntryModel{ModelKind::ClassCorrelated, 1, Rational(1, 3), Marginal::GaussianReal}};
}

std::string un_oracles() {
  int tested = 0;
  for (const auto& spec : builtin_specs()) {
    for (const auto& [s, t] : std::vector<std::pair<int, int>>{{2, 3}, {4, 4}, {3, 6}}) {
      const auto d = ensembles::make_structure(spec, s, t);
      for (const auto& model : builtin_models()) {
        const auto exact = montecarlo::un_exact_m1(d, model, 5, Rational(1), 2).value;
        const auto brute = montecarlo::un_bruteforce(1, d, model, 5, Rational(1), 2).value;
        if (exact != brute) {
          return "U_n(2) mismatch for " + spec.name() + " with " + ensembles::model_name(model.kind) + ": " +
                 to_string(exact) + " vs " + to_string(brute);
        }
        ++tested;
      }
    }
  }
  const auto d = ensembles::make_structure(ensembles::StructureSpec::independent(), 2, 2);
  for (const auto& model : builtin_models()) {
    const auto expansion = montecarlo::covariance_by_expansion(d, model, 2, 1, 1);
    const auto exact = montecarlo::un_exact_m1(d, model, 2, Rational(1), 2).value;
    if (expansion != exact) return std::string("expansion identity fails for ") + ensembles::model_name(model.kind);
  }
  return "ok: " + std::to_string(tested) + " structure/model pairs";
}

std::string chiral_traces() {
  const auto d = ensembles::make_structure(ensembles::StructureSpec::independent(), 8, 8);
  const ensembles::EntryModel model{ensembles::ModelKind::GaussianComplex, 1, 0, ensembles::Marginal::GaussianReal};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto y = ensembles::sample_matrix(d, model, seed);
    const auto w = spectra::build_w(y, 8, seed);
    const auto tw = spectra::trace_powers(w, 5);
    const auto th = spectra::chiral_trace_powers(spectra::chiral_embed(y), 8, 11);
    for (int k = 1; k <= 5; ++k) {
      const double a = th[static_cast<std::size_t>(2 * k - 1)];
      const double b = 2 * tw[static_cast<std::size_t>(k - 1)];
      if (std::abs(a - b) > 1e-9 * std::abs(b)) return "even chiral trace mismatch at k=" + std::to_string(k);
    }
  }
  return "ok";
}

}  // namespace

std::vector<Check> combinatorics_suite() {
  return {timed("inverse coefficients equal closed form", inverse_matches_closed_form),
          timed("half pair partitions biject onto dot structures", half_pair_bijection),
          timed("Chebyshev and inverse-coefficient recurrences", [] { return recurrences(chebyshev::kDefaultOrder); }),
          timed("half pair counts generate inverse coefficients", counts_generate_inverse)};
}

std::vector<Check> structure_suite() {
  return {timed("beta inequalities and chiral relations", beta_relations),
          timed("U_n(2) closed form, brute force and expansion agree", un_oracles),
          timed("chiral trace identity", chiral_traces)};
}

}  // namespace mpfluct::suites
