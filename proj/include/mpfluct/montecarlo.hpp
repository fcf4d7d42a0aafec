#pragma once

#include "mpfluct/cumulants.hpp"
#include "mpfluct/ensembles.hpp"
#include "mpfluct/partitions.hpp"
#include "mpfluct/rational.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mpfluct::montecarlo {

struct ExperimentConfig {
  int n = 64;
  int s = 0;  // 0 means floor(kappa * n)
  int t = 0;  // 0 means floor(mu * n)
  Rational kappa = 1;
  Rational mu = 1;
  ensembles::StructureSpec structure;
  ensembles::EntryModel model;  // model.variance is sigma^2
  std::vector<int> powers{1, 2};
  std::vector<int> gamma_orders;
  std::vector<int> cumulant_orders{3, 4};
  int replicates = 1000;
  std::uint64_t seed = 1;
  int threads = 1;  // hint only
  std::vector<int> growth_ns;  // empty means {n/4, n/2, n}
  double moment_tolerance = 0.02;
  double covariance_tolerance = 0.0;  // absolute floor for off-diagonal checks

  int rows() const;
  int cols() const;
  Rational y() const { return kappa / mu; }
  const Rational& sigma2() const { return model.variance; }
  /// Throws ConfigError for inconsistent settings.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Assignment P of grid cells to the points of the circles. cells[f] holds
/// the 0-based (p, q) of the flat point f (circle by circle, 1-based
/// positions mapped to consecutive offsets).
struct MultiIndex {
  std::vector<int> lengths;
  std::vector<std::pair<int, int>> cells;

  std::pair<int, int> at(partitions::CircleIndex x) const;
};

/// Calls `visit` on every multi-index over circles of the given (even)
/// lengths that satisfies the consistency condition: on each circle the
/// points 2r-1 and 2r share a column and 2r, 2r+1 share a row.
void for_each_multi_index(const std::vector<int>& lengths, int s, int t,
                          const std::function<void(const MultiIndex&)>& visit);

/// Partition of the circle points induced by P through the dependence
/// structure.
partitions::CirclePartition induced_partition(const MultiIndex& p, const ensembles::DependenceStructure& d);

enum class MnConstraint { All, PropertyP };

inline constexpr int kMaxMnGrid = 36;
inline constexpr int kMaxMnPoints = 8;

/// M_n(pi), or its subset where same-circle equivalent points carry equal
/// cells. Throws SizeLimitError unless s*t <= 36 and pi has at most 8 points.
std::vector<MultiIndex> enumerate_mn(const partitions::CirclePartition& pi, const ensembles::DependenceStructure& d,
                                     MnConstraint constraint);

/// One factor a(p, q) or its conjugate inside a product of entries.
struct EntryFactor {
  int p = 0;
  int q = 0;
  bool conjugate = false;
};

/// Exact E(prod factors) under the entry model.
Rational expect_product(const ensembles::DependenceStructure& d, const ensembles::EntryModel& model,
                        const std::vector<EntryFactor>& factors);

/// Exact joint cumulant of the products prod(groups[i]), i = 1..j.
Rational joint_cumulant_of_products(const ensembles::DependenceStructure& d, const ensembles::EntryModel& model,
                                    const std::vector<std::vector<EntryFactor>>& groups);

/// Factors a(P_{i,1}) conj(a(P_{i,2})) a(P_{i,3}) ... of circle i (1-based).
std::vector<EntryFactor> circle_factors(const MultiIndex& p, int circle);

enum class UnMethod { ExactM1, BruteForce, MonteCarlo };
const char* un_method_name(UnMethod m);

struct UnValue {
  int m = 1;
  Rational value;
  UnMethod method = UnMethod::ExactM1;
  int k_total = 2;
};

/// Closed-form U_n(2) from the model's covariance of squared moduli.
UnValue un_exact_m1(const ExperimentConfig& cfg, int k_total);
UnValue un_exact_m1(const ensembles::DependenceStructure& d, const ensembles::EntryModel& model, int n,
                    const Rational& mu, int k_total);

inline constexpr int kMaxBruteForceM = 2;
inline constexpr int kMaxBruteForceSide = 6;

/// U_n(2m) by enumerating M_n(pi_g) for every dihedral g. Throws
/// SizeLimitError unless m <= 2 and s, t <= 6.
UnValue un_bruteforce(int m, const ExperimentConfig& cfg, int k_total);
UnValue un_bruteforce(int m, const ensembles::DependenceStructure& d, const ensembles::EntryModel& model, int n,
                      const Rational& mu, int k_total);

/// Cov(tr W^{k1}, tr W^{k2}) summed over all partitions of the circle
/// points and all P in M_n(pi), exactly. Tiny instances only.
Rational covariance_by_expansion(const ensembles::DependenceStructure& d, const ensembles::EntryModel& model, int n,
                                 int k1, int k2);

/// Per-replicate statistics: one column per requested trace power, then one
/// per Gamma order.
struct ReplicateTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // R_kept x names.size()
  int aborted = 0;
  int requested = 0;
};

/// Simulates cfg.replicates replicates; replicate r draws its matrix with
/// the seed derived from (cfg.seed, r). Output is independent of the
/// thread count. Throws NumericError if more than 1% of replicates abort.
ReplicateTable simulate(const ExperimentConfig& cfg);

struct ResultRow {
  std::string statistic;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> reference;
  std::string verdict;  // pass, fail, info, or a qualified note
};

struct ResultTable {
  std::string kind;
  std::vector<ResultRow> rows;
  std::vector<std::string> notes;
  int aborted = 0;

  bool passed() const;
};

/// Means, covariances and standardized higher cumulants of the replicate
/// statistics.
ResultTable run_clt_experiment(const ExperimentConfig& cfg);
ResultTable clt_table(const ExperimentConfig& cfg, const ReplicateTable& data);

/// Off-diagonal covariances of tr Gamma_j must vanish; the j = 1 diagonal is
/// compared with the exact U_n(2).
ResultTable covariance_diag_check(const ExperimentConfig& cfg);
ResultTable covariance_diag_table(const ExperimentConfig& cfg, const ReplicateTable& data);

/// Mean of (1/s) tr W^k against the limit moment formula.
ResultTable mp_moment_check(const ExperimentConfig& cfg);

/// Growth flags for the configured structure across cfg.growth_ns; custom
/// structures are reported as not assessable.
ensembles::GrowthReport hypothesis_report(const ExperimentConfig& cfg);

}  // namespace mpfluct::montecarlo
