#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpfluct/errors.hpp"
#include "mpfluct/montecarlo.hpp"
#include "mpfluct/partitions.hpp"
#include "oracles.hpp"

#include <map>
#include <set>

using namespace mpfluct;
using namespace mpfluct::montecarlo;
using ensembles::DependenceStructure;
using ensembles::EntryModel;
using ensembles::Marginal;
using ensembles::ModelKind;
using ensembles::StructureSpec;
using partitions::CircleIndex;
using partitions::CirclePartition;

namespace {

EntryModel model(ModelKind kind, Rational variance = 1, Rational rho = 0, Marginal marginal = Marginal::GaussianReal) {
  return EntryModel{kind, std::move(variance), std::move(rho), marginal};
}

std::vector<EntryModel> all_models() {
  return {model(ModelKind::GaussianReal, 2),
          model(ModelKind::GaussianComplex, Rational(1, 2)),
          model(ModelKind::Rademacher, 3),
          model(ModelKind::ClassConstant, 1, 0, Marginal::GaussianReal),
          model(ModelKind::ClassConstant, 2, 0, Marginal::GaussianComplex),
          model(ModelKind::ClassCorrelated, 1, oracle::ratio(1, 3))};
}

std::vector<StructureSpec> builtin_specs() {
  return {StructureSpec::independent(), StructureSpec::column_block(2), StructureSpec::column_block(3),
          StructureSpec::row_pair(), StructureSpec::duplicate_patch(2, 2), StructureSpec::duplicate_patch(1, 2)};
}

// E(x^{cx} y^{cy}) for two entries, straight from each model's description.
Rational pair_expectation(const DependenceStructure& d, const EntryModel& m, std::pair<int, int> x, bool conj_x,
                          std::pair<int, int> y, bool conj_y) {
  if (!d.equivalent(x.first, x.second, y.first, y.second)) return 0;
  const bool same_cell = x == y;
  const Rational& v = m.variance;
  switch (m.kind) {
    case ModelKind::GaussianReal:
    case ModelKind::Rademacher: return same_cell ? v : Rational(0);
    case ModelKind::GaussianComplex: return same_cell && conj_x != conj_y ? v : Rational(0);
    case ModelKind::ClassConstant:
      if (m.marginal == Marginal::GaussianComplex) return conj_x != conj_y ? v : Rational(0);
      return v;
    case ModelKind::ClassCorrelated: return same_cell ? v : m.rho * v;
  }
  return 0;
}

// Literal U_n(4): loop over both circles' free indices, keep assignments whose
// induced relation on the eight points is pi_g for some dihedral g, and sum
// the products of the four pair expectations.
Rational un4_literal(const DependenceStructure& d, const EntryModel& m, int n) {
  const int s = d.s();
  const int t = d.t();
  std::map<std::vector<int>, partitions::DihedralElement> targets;
  for (const auto& g : partitions::dihedral_group(2))
    targets.emplace(partitions::dihedral_partition(g).partition().labels(), g);
  auto circle = [](int p1, int p2, int q1, int q2) {
    return std::vector<std::pair<int, int>>{{p1, q1}, {p2, q1}, {p2, q2}, {p1, q2}};
  };
  Rational total = 0;
  for (int a = 0; a < s * s * t * t; ++a) {
    const auto c1 = circle(a % s, (a / s) % s, (a / (s * s)) % t, a / (s * s * t));
    for (int b = 0; b < s * s * t * t; ++b) {
      const auto c2 = circle(b % s, (b / s) % s, (b / (s * s)) % t, b / (s * s * t));
      std::vector<std::pair<int, int>> cells(c1);
      cells.insert(cells.end(), c2.begin(), c2.end());
      std::vector<std::int64_t> classes;
      for (const auto& [p, q] : cells) classes.push_back(d.class_of(p, q));
      const auto induced = partitions::SetPartition::from_labels(std::span<const std::int64_t>(classes));
      const auto hit = targets.find(induced.labels());
      if (hit == targets.end()) continue;
      const auto& g = hit->second;
      Rational product = 1;
      for (int l = 1; l <= 4; ++l) {
        const int gl = g.image(l);
        product *= pair_expectation(d, m, c1[static_cast<std::size_t>(l - 1)], l % 2 == 0,
                                    c2[static_cast<std::size_t>(gl - 1)], gl % 2 == 0);
      }
      total += product;
    }
  }
  return total / pow(Rational(n), 4);
}

// Exact Cov(tr W^k1, tr W^k2) for sign entries by enumerating every sign
// pattern of the classes (class_constant) or of the cells (rademacher).
Rational sign_covariance(const DependenceStructure& d, bool per_class, int n, int k1, int k2) {
  const int s = d.s();
  const int t = d.t();
  const int units = per_class ? d.class_count() : s * t;
  const int patterns = 1 << units;
  Rational e1 = 0, e2 = 0, e12 = 0;
  for (int mask = 0; mask < patterns; ++mask) {
    std::vector<std::vector<long>> y(static_cast<std::size_t>(s), std::vector<long>(static_cast<std::size_t>(t)));
    for (int p = 0; p < s; ++p)
      for (int q = 0; q < t; ++q) {
        const int unit = per_class ? d.class_of(p, q) : p * t + q;
        y[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = (mask >> unit) & 1 ? 1 : -1;
      }
    std::vector<std::vector<long>> yy(static_cast<std::size_t>(s), std::vector<long>(static_cast<std::size_t>(s), 0));
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        for (int q = 0; q < t; ++q)
          yy[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
              y[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)] * y[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
    auto trace_power = [&](int k) -> Rational {
      std::vector<std::vector<long>> acc = yy;
      for (int step = 1; step < k; ++step) {
        std::vector<std::vector<long>> next(static_cast<std::size_t>(s), std::vector<long>(static_cast<std::size_t>(s), 0));
        for (int a = 0; a < s; ++a)
          for (int b = 0; b < s; ++b)
            for (int c = 0; c < s; ++c)
              next[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                  acc[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] * yy[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
        acc = std::move(next);
      }
      long tr = 0;
      for (int a = 0; a < s; ++a) tr += acc[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
      return Rational(tr) / pow(Rational(n), static_cast<unsigned>(k));
    };
    const Rational x1 = trace_power(k1);
    const Rational x2 = trace_power(k2);
    e1 += x1;
    e2 += x2;
    e12 += x1 * x2;
  }
  const Rational count = patterns;
  return e12 / count - (e1 / count) * (e2 / count);
}

ExperimentConfig small_config(int n, int replicates, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.seed = seed;
  return cfg;
}

const ResultRow& row(const ResultTable& table, const std::string& name) {
  for (const auto& r : table.rows)
    if (r.statistic == name) return r;
  FAIL("missing row " << name);
  return table.rows.front();
}

}  // namespace

TEST_CASE("config: derived sizes and validation") {
  ExperimentConfig cfg;
  cfg.n = 10;
  cfg.kappa = oracle::ratio(1, 2);
  cfg.mu = oracle::ratio(3, 2);
  CHECK(cfg.rows() == 5);
  CHECK(cfg.cols() == 15);
  CHECK(cfg.y() == oracle::ratio(1, 3));
  CHECK_NOTHROW(cfg.validate());

  auto bad = cfg;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.kappa = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.model.variance = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.replicates = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.powers = {0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("multi-indices satisfy the consistency conditions") {
  int count = 0;
  for_each_multi_index({4, 2}, 2, 3, [&](const MultiIndex& p) {
    ++count;
    for (int i = 1; i <= 2; ++i) {
      const int len = p.lengths[static_cast<std::size_t>(i - 1)];
      for (int l = 1; l <= len; l += 2) CHECK(p.at({i, l}).second == p.at({i, l + 1}).second);
      for (int l = 2; l <= len; l += 2) CHECK(p.at({i, l}).first == p.at({i, l % len + 1}).first);
    }
  });
  // free indices: circle of length 4 has 2 rows and 2 columns, length 2 has 1 and 1
  CHECK(count == (2 * 2 * 3 * 3) * (2 * 3));
}

TEST_CASE("M_n: documented examples") {
  const auto d = ensembles::make_structure(StructureSpec::independent(), 2, 2);
  const auto four_block = partitions::dihedral_partition(partitions::DihedralElement::identity(1));
  const auto all = enumerate_mn(four_block, d, MnConstraint::All);
  CHECK(all.size() == 4);
  for (const auto& p : all) {
    CHECK(p.at({1, 1}) == p.at({1, 2}));
    CHECK(p.at({1, 1}) == p.at({2, 1}));
    CHECK(p.at({1, 1}) == p.at({2, 2}));
  }

  const auto pairing = CirclePartition::from_blocks({2, 2}, {{{1, 1}, {2, 1}}, {{1, 2}, {2, 2}}});
  // a single column per length-2 circle forces P_{i,1} = P_{i,2}, so both blocks merge
  CHECK(enumerate_mn(pairing, d, MnConstraint::All).empty());

  const auto column = ensembles::make_structure(StructureSpec::column_block(2), 2, 2);
  const auto pairs_col = enumerate_mn(pairing, column, MnConstraint::All);
  for (const auto& p : pairs_col) CHECK(induced_partition(p, column) == pairing);

  const auto big = ensembles::make_structure(StructureSpec::independent(), 7, 7);
  CHECK_THROWS_AS(enumerate_mn(four_block, big, MnConstraint::All), SizeLimitError);
}

TEST_CASE("M_n: every element induces exactly the requested partition") {
  for (const auto& spec : builtin_specs()) {
    const auto d = ensembles::make_structure(spec, 3, 3);
    for (const auto& sp : partitions::enumerate_set_partitions(4)) {
      const CirclePartition pi({2, 2}, sp);
      const auto all = enumerate_mn(pi, d, MnConstraint::All);
      for (const auto& p : all) CHECK(induced_partition(p, d) == pi);
      // brute-force count over all multi-indices
      int expected = 0;
      for_each_multi_index({2, 2}, 3, 3, [&](const MultiIndex& p) { expected += induced_partition(p, d) == pi; });
      CHECK(static_cast<int>(all.size()) == expected);
    }
  }
}

TEST_CASE("PM_n is the subset of M_n with equal cells inside blocks on one circle") {
  for (const auto& spec : builtin_specs())
    for (int m = 1; m <= 2; ++m)
      for (const auto& g : partitions::dihedral_group(m)) {
        const auto d = ensembles::make_structure(spec, 3, 3);
        const auto pi = partitions::dihedral_partition(g);
        const auto all = enumerate_mn(pi, d, MnConstraint::All);
        const auto pm = enumerate_mn(pi, d, MnConstraint::PropertyP);
        std::set<std::vector<std::pair<int, int>>> pm_cells;
        for (const auto& p : pm) pm_cells.insert(p.cells);
        CHECK(pm_cells.size() <= all.size());
        for (const auto& p : all) {
          bool property = true;
          for (const auto& block : pi.blocks())
            for (const auto& x : block)
              for (const auto& z : block)
                if (x.circle == z.circle && p.at(x) != p.at(z)) property = false;
          CHECK(property == (pm_cells.count(p.cells) == 1));
        }
      }
}

TEST_CASE("exact expectations of entry products") {
  const auto ind = ensembles::make_structure(StructureSpec::independent(), 2, 2);
  const EntryFactor a{0, 0, false};
  const EntryFactor ac{0, 0, true};
  const EntryFactor b{0, 1, false};
  CHECK(expect_product(ind, model(ModelKind::GaussianReal, 2), {a, a, a, a}) == 12);
  CHECK(expect_product(ind, model(ModelKind::GaussianReal, 2), {a, a, b, b}) == 4);
  CHECK(expect_product(ind, model(ModelKind::GaussianReal, 2), {a, b}) == 0);
  CHECK(expect_product(ind, model(ModelKind::GaussianComplex, 2), {a, ac, a, ac}) == 8);
  CHECK(expect_product(ind, model(ModelKind::GaussianComplex, 2), {a, a}) == 0);
  CHECK(expect_product(ind, model(ModelKind::Rademacher, 2), {a, a, a, a}) == 4);
  CHECK(expect_product(ind, model(ModelKind::Rademacher, 2), {a, a, a}) == 0);

  const auto cb = ensembles::make_structure(StructureSpec::column_block(2), 2, 2);
  const auto corr = model(ModelKind::ClassCorrelated, 3, oracle::ratio(1, 2));
  CHECK(expect_product(cb, corr, {a, b}) == oracle::ratio(3, 2));
  // E(X^2 Y^2) = s^4 (1 + 2 rho^2)
  CHECK(expect_product(cb, corr, {a, a, b, b}) == 9 * oracle::ratio(3, 2));
  CHECK(expect_product(cb, model(ModelKind::ClassConstant, 3), {a, b, a, b}) == 27);
}

TEST_CASE("joint cumulants vanish on partitions that are not connected") {
  for (const auto& spec : {StructureSpec::independent(), StructureSpec::column_block(2)}) {
    const auto d = ensembles::make_structure(spec, 2, 2);
    for (const auto& m : all_models()) {
      for (const std::vector<int>& lengths : {std::vector<int>{2, 2}, std::vector<int>{4, 2}}) {
        const int points = lengths[0] + lengths[1];
        for (const auto& sp : partitions::enumerate_set_partitions(points)) {
          const CirclePartition pi(lengths, sp);
          if (partitions::is_connected(pi)) continue;
          for (const auto& p : enumerate_mn(pi, d, MnConstraint::All)) {
            CHECK(joint_cumulant_of_products(d, m, {circle_factors(p, 1), circle_factors(p, 2)}) == 0);
          }
        }
      }
    }
  }
}

TEST_CASE("U_n(2): documented closed-form values") {
  const int n = 4;
  const auto ind = ensembles::make_structure(StructureSpec::independent(), 4, 4);
  CHECK(un_exact_m1(ind, model(ModelKind::GaussianReal, 1), n, 1, 2).value == 2);
  CHECK(un_exact_m1(ind, model(ModelKind::Rademacher, 1), n, 1, 2).value == 0);
  CHECK(un_exact_m1(ind, model(ModelKind::GaussianComplex, 1), n, 1, 2).value == 1);
  const auto cb = ensembles::make_structure(StructureSpec::column_block(2), 4, 4);
  // 8 classes, 4 ordered pairs each, covariance 2 sigma^4, over n^2 = 16
  CHECK(un_exact_m1(cb, model(ModelKind::ClassConstant, 1), n, 1, 2).value == 4);
  // mu^{k - 2} prefactor
  CHECK(un_exact_m1(ind, model(ModelKind::GaussianReal, 1), n, 2, 4).value == 8);

  ExperimentConfig cfg = small_config(8, 100, 1);
  CHECK(un_exact_m1(cfg, 2).value == 2);
  CHECK(un_exact_m1(cfg, 2).method == UnMethod::ExactM1);
}

TEST_CASE("U_n(2): brute force equals the closed form on built-in structures") {
  for (const auto& spec : builtin_specs())
    for (int s = 1; s <= 4; ++s)
      for (int t : {1, 3, 4})
        for (const auto& m : all_models()) {
          const auto d = ensembles::make_structure(spec, s, t);
          if (m.kind == ModelKind::ClassCorrelated) ensembles::validate_model(m, d);
          const auto exact = un_exact_m1(d, m, 3, 1, 2);
          const auto brute = un_bruteforce(1, d, m, 3, 1, 2);
          CHECK(exact.value == brute.value);
          CHECK(brute.method == UnMethod::BruteForce);
        }
  const auto d = ensembles::make_structure(StructureSpec::independent(), 7, 3);
  CHECK_THROWS_AS(un_bruteforce(1, d, model(ModelKind::GaussianReal), 3, 1, 2), SizeLimitError);
  CHECK_THROWS_AS(un_bruteforce(3, ensembles::make_structure(StructureSpec::independent(), 2, 2),
                                model(ModelKind::GaussianReal), 3, 1, 2),
                  SizeLimitError);
}

TEST_CASE("U_n(4): brute force equals the literal pair-expectation sum") {
  for (const auto& spec : {StructureSpec::independent(), StructureSpec::column_block(2), StructureSpec::row_pair(),
                           StructureSpec::duplicate_patch(2, 2)})
    for (const auto& m : all_models()) {
      const auto d = ensembles::make_structure(spec, 3, 3);
      const auto brute = un_bruteforce(2, d, m, 3, 1, 4);
      CHECK(brute.m == 2);
      CHECK(brute.value == un4_literal(d, m, 3));
    }
}

TEST_CASE("expansion over partitions reproduces exact trace covariances") {
  const auto ind = ensembles::make_structure(StructureSpec::independent(), 2, 2);
  CHECK(covariance_by_expansion(ind, model(ModelKind::GaussianReal, 1), 2, 1, 1) == 2);
  CHECK(covariance_by_expansion(ind, model(ModelKind::GaussianComplex, 1), 2, 1, 1) == 1);

  for (const auto& spec : {StructureSpec::independent(), StructureSpec::column_block(2), StructureSpec::row_pair()}) {
    const auto d = ensembles::make_structure(spec, 2, 2);
    for (const auto& [k1, k2] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}}) {
      CHECK(covariance_by_expansion(d, model(ModelKind::Rademacher, 1), 2, k1, k2) ==
            sign_covariance(d, false, 2, k1, k2));
      CHECK(covariance_by_expansion(d, model(ModelKind::ClassConstant, 1, 0, Marginal::Rademacher), 2, k1, k2) ==
            sign_covariance(d, true, 2, k1, k2));
    }
    // Var(tr W) is U_n(2) exactly
    for (const auto& m : all_models())
      CHECK(covariance_by_expansion(d, m, 2, 1, 1) == un_exact_m1(d, m, 2, 1, 2).value);
  }
}

TEST_CASE("simulation is a pure function of the config") {
  auto cfg = small_config(12, 120, 99);
  cfg.gamma_orders = {1, 2};
  cfg.structure = StructureSpec::duplicate_patch(2, 2);
  cfg.model = model(ModelKind::ClassCorrelated, 1, oracle::ratio(1, 4));
  const auto a = simulate(cfg);
  cfg.threads = 4;
  const auto b = simulate(cfg);
  CHECK(a.values == b.values);
  CHECK(a.names == std::vector<std::string>{"tr(W^1)", "tr(W^2)", "tr(Gamma_1)", "tr(Gamma_2)"});
  CHECK(a.requested == 120);
  CHECK(a.aborted == 0);

  cfg.replicates = 240;
  const auto doubled = simulate(cfg);
  CHECK(doubled.values.topRows(120) == a.values);

  cfg.seed = 100;
  CHECK_FALSE(simulate(cfg).values.topRows(120) == a.values);
}

TEST_CASE("clt table: variance of the linear statistic and Gaussian cumulants") {
  auto cfg = small_config(16, 400, 5);
  cfg.powers = {1, 2};
  const auto table = run_clt_experiment(cfg);
  CHECK(table.kind == "clt");
  const auto& var = row(table, "var tr(W^1)");
  REQUIRE(var.reference.has_value());
  CHECK(*var.reference == doctest::Approx(2.0));
  CHECK(var.verdict == "pass");
  CHECK(row(table, "c3 std tr(W^1)").verdict == "pass");
  CHECK(row(table, "c4 std tr(W^2)").verdict == "pass");
  CHECK(row(table, "cov tr(W^1) tr(W^2)").verdict == "info");
  CHECK(table.passed());

  auto few = cfg;
  few.replicates = 50;
  CHECK_THROWS_AS(run_clt_experiment(few), ConfigError);
}

TEST_CASE("covdiag: off-diagonal vanishing and the exact first diagonal") {
  auto cfg = small_config(32, 600, 3);
  cfg.powers = {};
  cfg.gamma_orders = {1, 2};
  const auto table = covariance_diag_check(cfg);
  CHECK(row(table, "cov tr(Gamma_1) tr(Gamma_2)").verdict == "pass");
  const auto& diag = row(table, "cov tr(Gamma_1) tr(Gamma_1)");
  CHECK(diag.verdict == "pass");
  CHECK(*diag.reference == doctest::Approx(2.0));
  CHECK(row(table, "cov tr(Gamma_2) tr(Gamma_2)").verdict == "predicted-diagonal only");
  CHECK(table.passed());

  // scaling sigma^2 by 4 keeps the verdict pattern; rows are (1,1), (1,2), (2,2)
  auto scaled = cfg;
  scaled.model.variance = 4;
  const auto st = covariance_diag_check(scaled);
  REQUIRE(st.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < st.rows.size(); ++i) {
    CHECK(st.rows[i].verdict == table.rows[i].verdict);
    CHECK(st.rows[i].estimate == doctest::Approx(table.rows[i].estimate * std::pow(4.0, static_cast<double>(2 + i))).epsilon(1e-9));
  }

  auto tiny = small_config(4, 200, 8);
  tiny.powers = {};
  tiny.gamma_orders = {2};
  const auto tt = covariance_diag_check(tiny);
  CHECK(row(tt, "cov tr(Gamma_2) tr(Gamma_2)").verdict == "info");
  CHECK(row(tt, "cov tr(Gamma_2) tr(Gamma_2)").reference.has_value());

  auto bad = cfg;
  bad.gamma_orders = {5};
  CHECK_THROWS_AS(covariance_diag_check(bad), ConfigError);
}

TEST_CASE("covdiag: a structure violating the growth hypothesis is flagged, not failed") {
  auto cfg = small_config(32, 300, 4);
  cfg.powers = {};
  cfg.gamma_orders = {1, 2};
  cfg.structure = StructureSpec::column_block(2);
  cfg.model = model(ModelKind::ClassConstant);
  const auto table = covariance_diag_check(cfg);
  CHECK(row(table, "cov tr(Gamma_1) tr(Gamma_2)").verdict == "unpredicted");
  bool flagged = false;
  for (const auto& note : table.notes) flagged |= note == "diagonalization hypothesis (b): VIOLATED";
  CHECK(flagged);
}

TEST_CASE("moment check: limit values and the exact first moment") {
  auto cfg = small_config(64, 100, 2);
  cfg.powers = {1, 2, 3};
  const auto table = mp_moment_check(cfg);
  CHECK(*row(table, "moment 3").reference == 5.0);
  CHECK(*row(table, "moment 2").reference == 2.0);
  CHECK(row(table, "moment 1 exact").verdict == "pass");
  CHECK(row(table, "moment 1").verdict == "pass");
  CHECK(row(table, "moment 2").verdict == "pass");

  auto bad = cfg;
  bad.powers = {7};
  CHECK_THROWS_AS(mp_moment_check(bad), ConfigError);
}

TEST_CASE("hypothesis report follows the structure family") {
  auto cfg = small_config(64, 100, 1);
  CHECK(hypothesis_report(cfg).diagonal_hypothesis == ensembles::Hypothesis::Satisfied);
  cfg.structure = StructureSpec::column_block(2);
  CHECK(hypothesis_report(cfg).diagonal_hypothesis == ensembles::Hypothesis::Violated);
  cfg.structure = StructureSpec::custom("whatever.txt");
  CHECK(hypothesis_report(cfg).gaussian_hypothesis == ensembles::Hypothesis::NotAssessable);
}
