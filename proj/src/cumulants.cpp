#include "mpfluct/cumulants.hpp"

#include <cmath>

namespace mpfluct::cumulants {

namespace {

double plug_in(const Eigen::MatrixXd& samples, std::span<const int> which, Eigen::Index begin, Eigen::Index end) {
  const int order = static_cast<int>(which.size());
  MomentTable<double> table(order);
  const double count = static_cast<double>(end - begin);
  const std::uint32_t full = (1U << order);
  if (order == 1) return samples.col(which[0]).segment(begin, end - begin).mean();

  // Cumulants of order >= 2 are shift invariant; centring first keeps the
  // alternating sum well conditioned (and exactly zero for constant data).
  std::vector<double> centre(which.size());
  for (std::size_t i = 0; i < which.size(); ++i) {
    const auto col = samples.col(which[i]).segment(begin, end - begin);
    const double first = col(0);
    centre[i] = first + (col.array() - first).mean();
    if ((col.array() == first).all()) centre[i] = first;
  }
  std::vector<double> sums(full, 0.0);
  std::vector<double> products(full, 1.0);
  for (Eigen::Index r = begin; r < end; ++r) {
    products[0] = 1.0;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      // lowest set bit extends a smaller subset by one factor
      const int bit = __builtin_ctz(mask);
      products[mask] = products[mask & (mask - 1)] *
                       (samples(r, which[static_cast<std::size_t>(bit)]) - centre[static_cast<std::size_t>(bit)]);
      sums[mask] += products[mask];
    }
  }
  for (std::uint32_t mask = 1; mask < full; ++mask) table[mask] = sums[mask] / count;
  return cumulant_from_moments(table);
}

}  // namespace

CumulantEstimate estimate_joint_cumulant(const Eigen::MatrixXd& samples, std::span<const int> which) {
  const auto rows = samples.rows();
  if (rows < 2) throw InsufficientDataError("joint cumulant estimate needs at least two replicates");
  if (which.empty() || static_cast<int>(which.size()) > kMaxEstimatedOrder)
    throw DomainError("estimated cumulant order must lie in [1, " + std::to_string(kMaxEstimatedOrder) + "]");
  for (int c : which)
    if (c < 0 || c >= samples.cols()) throw DomainError("cumulant column index out of range");

  CumulantEstimate out;
  out.order = static_cast<int>(which.size());
  out.replicate_count = static_cast<int>(rows);
  out.value = plug_in(samples, which, 0, rows);

  const auto batches = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(rows))));
  std::vector<double> batch_values;
  batch_values.reserve(static_cast<std::size_t>(batches));
  for (Eigen::Index b = 0; b < batches; ++b) {
    const Eigen::Index begin = b * rows / batches;
    const Eigen::Index end = (b + 1) * rows / batches;
    if (end > begin) batch_values.push_back(plug_in(samples, which, begin, end));
  }
  const double nb = static_cast<double>(batch_values.size());
  if (nb >= 2) {
    double mean = 0.0;
    for (double v : batch_values) mean += v;
    mean /= nb;
    double ss = 0.0;
    for (double v : batch_values) ss += (v - mean) * (v - mean);
    out.std_error = std::sqrt(ss / (nb - 1.0) / nb);
  }
  return out;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& samples) {
  Eigen::MatrixXd out = samples;
  const double r = static_cast<double>(samples.rows());
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    const double mean = samples.col(c).mean();
    out.col(c).array() -= mean;
    const double var = r > 1 ? out.col(c).squaredNorm() / (r - 1.0) : 0.0;
    if (var > 0) out.col(c) /= std::sqrt(var);
  }
  return out;
}

}  // namespace mpfluct::cumulants
