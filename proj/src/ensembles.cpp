#include "mpfluct/ensembles.hpp"

#include "mpfluct/errors.hpp"
#include "mpfluct/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace mpfluct::ensembles {

StructureSpec StructureSpec::column_block(int b) {
  if (b < 1) throw DomainError("column_block width must be positive");
  StructureSpec spec;
  spec.kind = StructureKind::ColumnBlock;
  spec.block = b;
  return spec;
}

StructureSpec StructureSpec::row_pair() {
  StructureSpec spec;
  spec.kind = StructureKind::RowPair;
  return spec;
}

StructureSpec StructureSpec::duplicate_patch(int w, int h) {
  if (w < 1 || h < 1) throw DomainError("duplicate_patch dimensions must be positive");
  StructureSpec spec;
  spec.kind = StructureKind::DuplicatePatch;
  spec.patch_width = w;
  spec.patch_height = h;
  return spec;
}

StructureSpec StructureSpec::custom(std::string path) {
  StructureSpec spec;
  spec.kind = StructureKind::Custom;
  spec.file = std::move(path);
  return spec;
}

std::string StructureSpec::name() const {
  switch (kind) {
    case StructureKind::Independent: return "independent";
    case StructureKind::ColumnBlock: return "column_block(" + std::to_string(block) + ")";
    case StructureKind::RowPair: return "row_pair";
    case StructureKind::DuplicatePatch:
      return "duplicate_patch(" + std::to_string(patch_width) + "," + std::to_string(patch_height) + ")";
    case StructureKind::Custom: return "custom(" + file + ")";
  }
  return "unknown";
}

const char* kind_name(StructureKind kind) {
  switch (kind) {
    case StructureKind::Independent: return "independent";
    case StructureKind::ColumnBlock: return "column_block";
    case StructureKind::RowPair: return "row_pair";
    case StructureKind::DuplicatePatch: return "duplicate_patch";
    case StructureKind::Custom: return "custom";
  }
  return "unknown";
}

StructureKind parse_structure_kind(const std::string& name) {
  for (auto kind : {StructureKind::Independent, StructureKind::ColumnBlock, StructureKind::RowPair,
                    StructureKind::DuplicatePatch, StructureKind::Custom}) {
    if (name == kind_name(kind)) return kind;
  }
  throw DomainError("unknown structure kind '" + name + "'");
}

DependenceStructure DependenceStructure::from_labels(int s, int t, const std::vector<std::int64_t>& labels,
                                                     StructureSpec provenance) {
  if (s < 1 || t < 1) throw DomainError("grid dimensions must be positive");
  const auto cells = static_cast<std::size_t>(s) * static_cast<std::size_t>(t);
  if (labels.size() != cells) throw DomainError("label count does not match the grid");
  DependenceStructure d;
  d.s_ = s;
  d.t_ = t;
  d.provenance_ = std::move(provenance);
  d.class_of_.resize(cells);
  d.within_.resize(cells);
  std::unordered_map<std::int64_t, int> ids;
  for (std::size_t i = 0; i < cells; ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(d.class_sizes_.size()));
    if (inserted) d.class_sizes_.push_back(0);
    const int c = it->second;
    d.class_of_[i] = c;
    d.within_[i] = d.class_sizes_[static_cast<std::size_t>(c)]++;
  }
  return d;
}

std::vector<int> DependenceStructure::members(int c) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(class_size(c)));
  for (std::size_t i = 0; i < class_of_.size(); ++i) {
    if (class_of_[i] == c) out.push_back(static_cast<int>(i));
  }
  return out;
}

DependenceStructure make_structure(const StructureSpec& spec, int s, int t) {
  if (s < 1 || t < 1) throw DomainError("grid dimensions must be positive");
  if (spec.kind == StructureKind::Custom) {
    auto d = load_custom_structure(spec.file);
    if (d.s() != s || d.t() != t) {
      throw ConfigError(spec.file, "custom relation covers " + std::to_string(d.s()) + "x" + std::to_string(d.t()) +
                                       " but the experiment needs " + std::to_string(s) + "x" + std::to_string(t));
    }
    return d;
  }
  std::vector<std::int64_t> labels(static_cast<std::size_t>(s) * static_cast<std::size_t>(t));
  const std::int64_t wide = t;
  for (int p = 0; p < s; ++p) {
    for (int q = 0; q < t; ++q) {
      std::int64_t label = 0;
      switch (spec.kind) {
        case StructureKind::Independent: label = p * wide + q; break;
        case StructureKind::ColumnBlock: label = p * wide + q / spec.block; break;
        case StructureKind::RowPair: label = (p / 2) * wide + q; break;
        case StructureKind::DuplicatePatch:
          label = (p / spec.patch_height) * wide + q / spec.patch_width;
          break;
        case StructureKind::Custom: break;
      }
      labels[static_cast<std::size_t>(p) * static_cast<std::size_t>(t) + static_cast<std::size_t>(q)] = label;
    }
  }
  return DependenceStructure::from_labels(s, t, labels, spec);
}

DependenceStructure parse_custom_structure(std::istream& in, const std::string& source) {
  struct Entry {
    int p;
    int q;
    std::int64_t label;
    int line;
  };
  std::vector<Entry> entries;
  std::string text;
  int line_no = 0;
  int s = 0;
  int t = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream fields(text);
    long long p = 0;
    long long q = 0;
    long long label = 0;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!(fields >> p >> q >> label)) throw ConfigError(where, "expected 'p q class_id'");
    std::string extra;
    if (fields >> extra) throw ConfigError(where, "unexpected trailing field '" + extra + "'");
    if (p < 1 || q < 1 || p > 65536 || q > 65536) throw ConfigError(where, "indices must lie in [1, 65536]");
    entries.push_back({static_cast<int>(p), static_cast<int>(q), label, line_no});
    s = std::max(s, static_cast<int>(p));
    t = std::max(t, static_cast<int>(q));
  }
  if (entries.empty()) throw ConfigError(source, "custom relation is empty");
  const auto cells = static_cast<std::size_t>(s) * static_cast<std::size_t>(t);
  if (static_cast<std::int64_t>(cells) > kMaxExhaustiveGrid) throw ConfigError(source, "custom grid too large");
  std::vector<std::int64_t> labels(cells);
  std::vector<bool> seen(cells, false);
  for (const auto& e : entries) {
    const auto i = static_cast<std::size_t>(e.p - 1) * static_cast<std::size_t>(t) + static_cast<std::size_t>(e.q - 1);
    if (seen[i]) {
      throw ConfigError(source + ":" + std::to_string(e.line),
                        "cell (" + std::to_string(e.p) + ", " + std::to_string(e.q) + ") assigned twice");
    }
    seen[i] = true;
    labels[i] = e.label;
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (!seen[i]) {
      throw ConfigError(source, "cell (" + std::to_string(i / static_cast<std::size_t>(t) + 1) + ", " +
                                    std::to_string(i % static_cast<std::size_t>(t) + 1) + ") has no class");
    }
  }
  return DependenceStructure::from_labels(s, t, labels, StructureSpec::custom(source));
}

DependenceStructure load_custom_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open custom relation file");
  return parse_custom_structure(in, path);
}

BetaStats beta_stats(const DependenceStructure& d) {
  const int s = d.s();
  const int t = d.t();
  if (static_cast<std::int64_t>(s) * t > kMaxExhaustiveGrid) {
    throw SizeLimitError("beta statistics limited to grids with at most 10^6 cells");
  }
  BetaStats out;
  for (int c = 0; c < d.class_count(); ++c) out.beta2 = std::max<std::int64_t>(out.beta2, d.class_size(c));

  // Occurrences of each class within one row (or column), via a scratch
  // counter reset after every line.
  std::vector<std::int64_t> count(static_cast<std::size_t>(d.class_count()), 0);
  std::int64_t pairs_rows = 0;
  std::int64_t pairs_cols = 0;
  for (int p = 0; p < s; ++p) {
    std::int64_t mass = 0;
    for (int q = 0; q < t; ++q) {
      const auto c = static_cast<std::size_t>(d.class_of(p, q));
      pairs_rows += 2 * count[c]++;
      out.beta3 = std::max(out.beta3, count[c]);
      mass += d.class_size(static_cast<int>(c));
    }
    out.beta1 = std::max(out.beta1, mass);
    for (int q = 0; q < t; ++q) count[static_cast<std::size_t>(d.class_of(p, q))] = 0;
  }
  for (int q = 0; q < t; ++q) {
    std::int64_t mass = 0;
    for (int p = 0; p < s; ++p) {
      const auto c = static_cast<std::size_t>(d.class_of(p, q));
      pairs_cols += 2 * count[c]++;
      out.beta3 = std::max(out.beta3, count[c]);
      mass += d.class_size(static_cast<int>(c));
    }
    out.beta1 = std::max(out.beta1, mass);
    for (int p = 0; p < s; ++p) count[static_cast<std::size_t>(d.class_of(p, q))] = 0;
  }
  out.beta0 = std::max(pairs_rows, pairs_cols);
  return out;
}

const char* hypothesis_name(Hypothesis h) {
  switch (h) {
    case Hypothesis::Satisfied: return "satisfied";
    case Hypothesis::Violated: return "VIOLATED";
    case Hypothesis::NotAssessable: return "not assessable";
  }
  return "unknown";
}

std::string GrowthReport::to_csv() const {
  std::ostringstream out;
  out << "n,beta0,beta1,beta2,beta3\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.betas.beta0 << ',' << row.betas.beta1 << ',' << row.betas.beta2 << ','
        << row.betas.beta3 << '\n';
  }
  return out.str();
}

namespace {

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double nx = static_cast<double>(xs.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= nx;
  my /= nx;
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

Hypothesis flag(bool ok) { return ok ? Hypothesis::Satisfied : Hypothesis::Violated; }

}  // namespace

GrowthReport growth_report(const std::vector<GridSize>& dims,
                           const std::function<DependenceStructure(int s, int t)>& family) {
  GrowthReport report;
  for (const auto& g : dims) report.rows.push_back({g.n, g.s, g.t, beta_stats(family(g.s, g.t))});
  std::sort(report.rows.begin(), report.rows.end(), [](const GrowthRow& a, const GrowthRow& b) { return a.n < b.n; });

  std::vector<double> xs;
  for (const auto& row : report.rows) xs.push_back(std::log(static_cast<double>(row.n)));
  if (xs.size() < 3 || xs.front() == xs.back()) return report;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> ys;
    for (const auto& row : report.rows) {
      const std::int64_t b[4] = {row.betas.beta0, row.betas.beta1, row.betas.beta2, row.betas.beta3};
      ys.push_back(std::log1p(static_cast<double>(b[i])));
    }
    report.slope[i] = loglog_slope(xs, ys);
  }
  report.moments_hypothesis = flag(report.slope[0] <= kSubQuadraticSlope && report.slope[1] <= kSubQuadraticSlope &&
                                   report.slope[3] <= kSubPolynomialSlope);
  report.gaussian_hypothesis = flag(report.slope[2] <= kSubPolynomialSlope);
  report.diagonal_hypothesis =
      flag(report.gaussian_hypothesis == Hypothesis::Satisfied && report.slope[0] <= kSubQuadraticSlope);
  return report;
}

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::GaussianReal: return "gaussian_real";
    case ModelKind::GaussianComplex: return "gaussian_complex";
    case ModelKind::Rademacher: return "rademacher";
    case ModelKind::ClassConstant: return "class_constant";
    case ModelKind::ClassCorrelated: return "class_correlated";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto kind : {ModelKind::GaussianReal, ModelKind::GaussianComplex, ModelKind::Rademacher,
                    ModelKind::ClassConstant, ModelKind::ClassCorrelated}) {
    if (name == model_name(kind)) return kind;
  }
  throw DomainError("unknown entry model '" + name + "'");
}

const char* marginal_name(Marginal m) {
  switch (m) {
    case Marginal::GaussianReal: return "gaussian_real";
    case Marginal::GaussianComplex: return "gaussian_complex";
    case Marginal::Rademacher: return "rademacher";
  }
  return "unknown";
}

Marginal parse_marginal(const std::string& name) {
  for (auto m : {Marginal::GaussianReal, Marginal::GaussianComplex, Marginal::Rademacher}) {
    if (name == marginal_name(m)) return m;
  }
  throw DomainError("unknown marginal '" + name + "'");
}

bool EntryModel::is_real() const {
  switch (kind) {
    case ModelKind::GaussianComplex: return false;
    case ModelKind::ClassConstant: return marginal != Marginal::GaussianComplex;
    default: return true;
  }
}

void validate_model(const EntryModel& model, const DependenceStructure& d) {
  if (model.variance <= 0) throw DomainError("entry variance must be positive");
  if (model.kind != ModelKind::ClassCorrelated) return;
  if (abs(model.rho) > 1) throw DomainError("class_correlated requires |rho| <= 1");
  int largest = 0;
  for (int c = 0; c < d.class_count(); ++c) largest = std::max(largest, d.class_size(c));
  if (1 + (largest - 1) * model.rho < 0) {
    throw DomainError("rho = " + to_string(model.rho) + " is not a valid correlation for classes of size " +
                      std::to_string(largest));
  }
}

namespace {

using Complex = std::complex<double>;

Complex draw(Marginal law, const random::EntryStream& stream, double sigma) {
  switch (law) {
    case Marginal::GaussianReal: return {sigma * stream.normals(0).first, 0.0};
    case Marginal::GaussianComplex: {
      const auto [re, im] = stream.normals(0);
      const double half = sigma / std::sqrt(2.0);
      return {half * re, half * im};
    }
    case Marginal::Rademacher: return {(stream.bits(0)[0] & 1U) ? sigma : -sigma, 0.0};
  }
  return {};
}

template <typename Sink>
void fill(const DependenceStructure& d, const EntryModel& model, std::uint64_t seed, Sink&& sink) {
  validate_model(model, d);
  const double sigma = std::sqrt(to_double(model.variance));
  const int s = d.s();
  const int t = d.t();
  switch (model.kind) {
    case ModelKind::GaussianReal:
    case ModelKind::GaussianComplex:
    case ModelKind::Rademacher: {
      const Marginal law = model.kind == ModelKind::GaussianReal      ? Marginal::GaussianReal
                           : model.kind == ModelKind::GaussianComplex ? Marginal::GaussianComplex
                                                                      : Marginal::Rademacher;
      for (int p = 0; p < s; ++p) {
        for (int q = 0; q < t; ++q) {
          const random::EntryStream stream(seed, static_cast<std::uint64_t>(d.class_of(p, q)),
                                           static_cast<std::uint32_t>(d.within_class_index(p, q)));
          sink(p, q, draw(law, stream, sigma));
        }
      }
      return;
    }
    case ModelKind::ClassConstant: {
      std::vector<Complex> shared(static_cast<std::size_t>(d.class_count()));
      for (int c = 0; c < d.class_count(); ++c) {
        shared[static_cast<std::size_t>(c)] = draw(model.marginal, random::EntryStream(seed, static_cast<std::uint64_t>(c), 0), sigma);
      }
      for (int p = 0; p < s; ++p) {
        for (int q = 0; q < t; ++q) sink(p, q, shared[static_cast<std::size_t>(d.class_of(p, q))]);
      }
      return;
    }
    case ModelKind::ClassCorrelated: {
      // a = sigma (sqrt(1 - rho) (Z - mean Z) + sqrt(1 + (c - 1) rho) mean Z)
      // has unit-variance marginals and pairwise correlation rho.
      const double rho = to_double(model.rho);
      std::vector<double> z(static_cast<std::size_t>(s) * static_cast<std::size_t>(t));
      std::vector<double> mean(static_cast<std::size_t>(d.class_count()), 0.0);
      for (int p = 0; p < s; ++p) {
        for (int q = 0; q < t; ++q) {
          const random::EntryStream stream(seed, static_cast<std::uint64_t>(d.class_of(p, q)),
                                           static_cast<std::uint32_t>(d.within_class_index(p, q)));
          const double value = stream.normals(0).first;
          z[static_cast<std::size_t>(p) * static_cast<std::size_t>(t) + static_cast<std::size_t>(q)] = value;
          mean[static_cast<std::size_t>(d.class_of(p, q))] += value;
        }
      }
      for (int c = 0; c < d.class_count(); ++c) mean[static_cast<std::size_t>(c)] /= d.class_size(c);
      const double spread = std::sqrt(std::max(0.0, 1.0 - rho));
      for (int p = 0; p < s; ++p) {
        for (int q = 0; q < t; ++q) {
          const int c = d.class_of(p, q);
          const double common = std::sqrt(std::max(0.0, 1.0 + (d.class_size(c) - 1) * rho));
          const double m = mean[static_cast<std::size_t>(c)];
          const double value = z[static_cast<std::size_t>(p) * static_cast<std::size_t>(t) + static_cast<std::size_t>(q)];
          sink(p, q, Complex(sigma * (spread * (value - m) + common * m), 0.0));
        }
      }
      return;
    }
  }
}

}  // namespace

Eigen::MatrixXcd sample_matrix(const DependenceStructure& d, const EntryModel& model, std::uint64_t seed) {
  Eigen::MatrixXcd y(d.s(), d.t());
  fill(d, model, seed, [&](int p, int q, Complex v) { y(p, q) = v; });
  return y;
}

Eigen::MatrixXd sample_matrix_real(const DependenceStructure& d, const EntryModel& model, std::uint64_t seed) {
  if (!model.is_real()) throw DomainError("sample_matrix_real needs a real entry model");
  Eigen::MatrixXd y(d.s(), d.t());
  fill(d, model, seed, [&](int p, int q, Complex v) { y(p, q) = v.real(); });
  return y;
}

}  // namespace mpfluct::ensembles
