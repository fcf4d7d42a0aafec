#pragma once

#include "mpfluct/rational.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mpfluct::ensembles {

inline constexpr std::int64_t kMaxExhaustiveGrid = 1'000'000;

enum class StructureKind { Independent, ColumnBlock, RowPair, DuplicatePatch, Custom };

/// Recipe for a dependence structure, independent of the grid size.
struct StructureSpec {
  StructureKind kind = StructureKind::Independent;
  int block = 2;         // column_block(b)
  int patch_width = 2;   // duplicate_patch(w, h): w columns
  int patch_height = 2;  //                        h rows
  std::string file;      // custom(file)

  static StructureSpec independent() { return {}; }
  static StructureSpec column_block(int b);
  static StructureSpec row_pair();
  static StructureSpec duplicate_patch(int w, int h);
  static StructureSpec custom(std::string path);

  /// "independent", "column_block(2)", "duplicate_patch(2,2)", ...
  std::string name() const;
  friend bool operator==(const StructureSpec&, const StructureSpec&) = default;
};

const char* kind_name(StructureKind kind);
StructureKind parse_structure_kind(const std::string& name);

/// Equivalence relation on [s] x [t]. Indices are 0-based; class ids are
/// dense and numbered in row-major order of first appearance.
class DependenceStructure {
 public:
  /// Canonicalizes arbitrary row-major labels.
  static DependenceStructure from_labels(int s, int t, const std::vector<std::int64_t>& labels,
                                         StructureSpec provenance = StructureSpec::custom(""));

  int s() const { return s_; }
  int t() const { return t_; }
  const StructureSpec& provenance() const { return provenance_; }
  int class_count() const { return static_cast<int>(class_sizes_.size()); }
  int class_of(int p, int q) const { return class_of_[index(p, q)]; }
  int class_size(int c) const { return class_sizes_[static_cast<std::size_t>(c)]; }
  /// Position of (p, q) among the members of its class, row-major.
  int within_class_index(int p, int q) const { return within_[index(p, q)]; }
  bool equivalent(int p, int q, int p2, int q2) const { return class_of(p, q) == class_of(p2, q2); }
  /// Row-major flat indices p * t + q of the members of class c.
  std::vector<int> members(int c) const;
  const std::vector<int>& class_labels() const { return class_of_; }

 private:
  std::size_t index(int p, int q) const { return static_cast<std::size_t>(p) * static_cast<std::size_t>(t_) + static_cast<std::size_t>(q); }

  int s_ = 0;
  int t_ = 0;
  StructureSpec provenance_;
  std::vector<int> class_of_;
  std::vector<int> class_sizes_;
  std::vector<int> within_;
};

/// Builds a built-in structure on an s x t grid. A custom spec loads its
/// file, which must describe exactly an s x t grid.
DependenceStructure make_structure(const StructureSpec& spec, int s, int t);

/// Custom relation: lines "p q class_id" with 1-based p, q; blank lines and
/// '#' comments are skipped. Throws ConfigError pointing at the offending
/// line, or when some grid cell is missing.
DependenceStructure parse_custom_structure(std::istream& in, const std::string& source);
DependenceStructure load_custom_structure(const std::string& path);

struct BetaStats {
  std::int64_t beta0 = 0;
  std::int64_t beta1 = 0;
  std::int64_t beta2 = 0;
  std::int64_t beta3 = 0;
  friend bool operator==(const BetaStats&, const BetaStats&) = default;
};

/// Exact beta statistics from per-row and per-column class counts.
/// Throws SizeLimitError when s * t exceeds 10^6.
BetaStats beta_stats(const DependenceStructure& d);

enum class Hypothesis { Satisfied, Violated, NotAssessable };
const char* hypothesis_name(Hypothesis h);

struct GrowthRow {
  int n = 0;
  int s = 0;
  int t = 0;
  BetaStats betas;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  /// Least-squares slopes of log(1 + beta_i) against log n.
  double slope[4] = {0, 0, 0, 0};
  Hypothesis moments_hypothesis = Hypothesis::NotAssessable;  // beta0, beta1 sub-quadratic, beta3 sub-polynomial
  Hypothesis gaussian_hypothesis = Hypothesis::NotAssessable;  // beta2 sub-polynomial
  Hypothesis diagonal_hypothesis = Hypothesis::NotAssessable;  // additionally beta0 beta2^eta = o(n^2)

  /// "n,beta0,beta1,beta2,beta3" with one row per n.
  std::string to_csv() const;
};

inline constexpr double kSubPolynomialSlope = 0.25;
inline constexpr double kSubQuadraticSlope = 1.75;

struct GridSize {
  int n = 0;
  int s = 0;
  int t = 0;
};

/// Tabulates beta statistics across sizes and flags whether the fitted
/// growth rates look compatible with the limit theorem hypotheses. Advisory
/// only. Fewer than three sizes leave every flag NotAssessable.
GrowthReport growth_report(const std::vector<GridSize>& dims,
                           const std::function<DependenceStructure(int s, int t)>& family);

enum class ModelKind { GaussianReal, GaussianComplex, Rademacher, ClassConstant, ClassCorrelated };
const char* model_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Law of one entry, used by class_constant for its shared draw.
enum class Marginal { GaussianReal, GaussianComplex, Rademacher };
const char* marginal_name(Marginal m);
Marginal parse_marginal(const std::string& name);

struct EntryModel {
  ModelKind kind = ModelKind::GaussianReal;
  Rational variance = 1;
  Rational rho = 0;  // class_correlated only
  Marginal marginal = Marginal::GaussianReal;  // class_constant only

  bool is_real() const;
  friend bool operator==(const EntryModel&, const EntryModel&) = default;
};

/// Throws DomainError for a nonpositive variance, |rho| > 1, or a rho that
/// makes the class covariance indefinite for the given structure.
void validate_model(const EntryModel& model, const DependenceStructure& d);

/// Entries are functions of (seed, class id, within-class index) only, so
/// distinct classes draw from disjoint counter ranges.
Eigen::MatrixXcd sample_matrix(const DependenceStructure& d, const EntryModel& model, std::uint64_t seed);
/// Same draws as sample_matrix for real models. Throws DomainError for
/// complex models.
Eigen::MatrixXd sample_matrix_real(const DependenceStructure& d, const EntryModel& model, std::uint64_t seed);

}  // namespace mpfluct::ensembles
