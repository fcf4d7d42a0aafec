#pragma once

#include "mpfluct/errors.hpp"
#include "mpfluct/partitions.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mpfluct::cumulants {

inline constexpr int kMaxCumulantOrder = 8;
inline constexpr int kMaxEstimatedOrder = 6;

/// Mixed moments E(prod_{i in S} X_i) for every nonempty S of [j], keyed by
/// bitmask (bit i set means X_{i+1} is in S).
template <typename Scalar>
class MomentTable {
 public:
  explicit MomentTable(int order) : order_(order) {
    if (order < 1 || order > kMaxCumulantOrder)
      throw DomainError("moment table order must lie in [1, " + std::to_string(kMaxCumulantOrder) + "]");
    moments_.assign(std::size_t{1} << order, Scalar(0));
  }
  int order() const { return order_; }
  const Scalar& operator[](std::uint32_t subset) const { return moments_.at(subset); }
  Scalar& operator[](std::uint32_t subset) { return moments_.at(subset); }

 private:
  int order_;
  std::vector<Scalar> moments_;
};

/// Moment-cumulant formula:
/// sum over partitions pi of [j] of (-1)^{#pi-1} (#pi-1)! prod_blocks E(prod X_i).
template <typename Scalar>
Scalar cumulant_from_moments(const MomentTable<Scalar>& table) {
  const int j = table.order();
  Scalar total(0);
  for (const auto& pi : partitions::enumerate_set_partitions(j)) {
    const int blocks = pi.block_count();
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(blocks), 0);
    for (int i = 0; i < j; ++i) masks[static_cast<std::size_t>(pi.block_of(i))] |= (1U << i);
    Scalar term(1);
    for (auto mask : masks) term *= table[mask];
    long coeff = 1;
    for (int f = 2; f < blocks; ++f) coeff *= f;
    if ((blocks - 1) % 2 == 1) coeff = -coeff;
    total += Scalar(coeff) * term;
  }
  return total;
}

struct CumulantEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int order = 0;
  int replicate_count = 0;
};

/// Plug-in joint cumulant of the columns listed in `which` (repeats allowed)
/// over the rows of `samples`. The standard error comes from batch means over
/// ceil(sqrt(R)) contiguous batches.
CumulantEstimate estimate_joint_cumulant(const Eigen::MatrixXd& samples, std::span<const int> which);

/// Columns centred by their sample mean and scaled by their sample standard
/// deviation; zero-variance columns are only centred.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& samples);

}  // namespace mpfluct::cumulants
