#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace mpfluct::partitions {

inline constexpr int kMaxSetPartitionSize = 12;
inline constexpr int kMaxNhppGroundSize = 24;

/// A partition of {0, ..., n-1}, stored as a restricted-growth string:
/// label[0] == 0 and label[i] <= 1 + max(label[0..i-1]). Blocks are
/// therefore numbered by their least element, which makes equality of
/// partitions a plain vector comparison.
class SetPartition {
 public:
  SetPartition() = default;

  /// Canonicalizes arbitrary labels (equal labels means same block).
  template <typename Label>
  static SetPartition from_labels(std::span<const Label> labels);
  static SetPartition from_labels(const std::vector<int>& labels) {
    return from_labels(std::span<const int>(labels));
  }
  /// Blocks over 0-based elements. Throws DomainError unless the blocks are
  /// nonempty, disjoint and cover {0, ..., ground_size-1}.
  static SetPartition from_blocks(int ground_size, const std::vector<std::vector<int>>& blocks);

  int ground_size() const { return static_cast<int>(labels_.size()); }
  int block_count() const { return block_count_; }
  int block_of(int element) const { return labels_[static_cast<std::size_t>(element)]; }
  bool same_block(int a, int b) const { return block_of(a) == block_of(b); }
  const std::vector<int>& labels() const { return labels_; }

  /// Blocks sorted by least element, elements ascending.
  std::vector<std::vector<int>> blocks() const;
  std::vector<int> block_sizes() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;
  friend auto operator<=>(const SetPartition& a, const SetPartition& b) { return a.labels_ <=> b.labels_; }

 private:
  std::vector<int> labels_;
  int block_count_ = 0;
};

template <typename Label>
SetPartition SetPartition::from_labels(std::span<const Label> labels) {
  SetPartition out;
  out.labels_.assign(labels.size(), -1);
  std::vector<std::pair<Label, int>> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int id = -1;
    for (const auto& [label, assigned] : seen) {
      if (label == labels[i]) {
        id = assigned;
        break;
      }
    }
    if (id < 0) {
      id = static_cast<int>(seen.size());
      seen.emplace_back(labels[i], id);
    }
    out.labels_[i] = id;
  }
  out.block_count_ = static_cast<int>(seen.size());
  return out;
}

/// Every partition of {0, ..., n-1} exactly once, in lexicographic order of
/// the restricted-growth strings. Throws SizeLimitError unless 1 <= n <= 12.
std::vector<SetPartition> enumerate_set_partitions(int n);

/// Point (i, l) on the multi-circle index set, both 1-based.
struct CircleIndex {
  int circle = 1;
  int position = 1;
  friend auto operator<=>(const CircleIndex&, const CircleIndex&) = default;
};

/// A partition of M = {(i, l) : i = 1..j, l = 1..2k_i}. Points are flattened
/// circle by circle, so (i, l) maps to offset(i) + l - 1.
class CirclePartition {
 public:
  CirclePartition() = default;
  CirclePartition(std::vector<int> circle_lengths, SetPartition partition);
  static CirclePartition from_blocks(std::vector<int> circle_lengths,
                                     const std::vector<std::vector<CircleIndex>>& blocks);

  const std::vector<int>& circle_lengths() const { return lengths_; }
  int circle_count() const { return static_cast<int>(lengths_.size()); }
  int circle_length(int circle) const { return lengths_[static_cast<std::size_t>(circle - 1)]; }
  int ground_size() const { return partition_.ground_size(); }
  const SetPartition& partition() const { return partition_; }

  /// Positions are reduced cyclically, so position 2k_i + 1 names (i, 1).
  int flat(CircleIndex x) const;
  CircleIndex unflat(int flat_index) const;

  bool equivalent(CircleIndex a, CircleIndex b) const {
    return partition_.same_block(flat(a), flat(b));
  }
  std::vector<std::vector<CircleIndex>> blocks() const;

  friend bool operator==(const CirclePartition&, const CirclePartition&) = default;

 private:
  std::vector<int> lengths_;
  std::vector<int> offsets_;
  SetPartition partition_;
};

/// True iff q lies in the cyclic open interval ]l, r[ on a circle of the
/// given length (positions 1-based). ]l, l+1[ is empty.
bool in_open_interval(int l, int r, int q, int length);

enum class PartitionType { PP1, PP2, Other };

struct CircleClassification {
  bool connected = false;
  std::set<CircleIndex> connectors;
  std::set<CircleIndex> simple_connectors;
  bool crossing = false;
  PartitionType type = PartitionType::Other;
};

bool is_connected(const CirclePartition& pi);
std::set<CircleIndex> connectors(const CirclePartition& pi);
std::set<CircleIndex> simple_connectors(const CirclePartition& pi);
bool is_crossing(const CirclePartition& pi);
PartitionType partition_type(const CirclePartition& pi);
CircleClassification classify_circle_partition(const CirclePartition& pi);

/// Removes the same-circle 2-block {(i, l), (i, l+1)} and relabels the
/// circle (the wrap-around block l = 2k_i uses the rotated relabeling).
/// Throws ClassificationError if that block is not a 2-block of pi.
CirclePartition eliminate_neighbor_pair(const CirclePartition& pi, int circle, int position);

/// Repeatedly eliminates the lowest-indexed nearest-neighbour same-circle
/// 2-block until only connectors remain. Requires a PP1 or PP2 partition on
/// two circles; throws ClassificationError if the reduction gets stuck.
CirclePartition reduce_to_hat(const CirclePartition& pi);

/// Number of same-circle 2-blocks whose initial point is even. Throws
/// InvariantError when an initial point is ill-defined.
int even_count(const CirclePartition& pi);

/// Partition of [2k] (positions 1-based) into 2-blocks and open connectors
/// satisfying the non-crossing half pair condition. The constructor rejects
/// anything else with DomainError.
class HalfPairPartition {
 public:
  HalfPairPartition(int ground_size, std::vector<std::pair<int, int>> pairs, std::vector<int> open_connectors);

  int ground_size() const { return ground_size_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const std::vector<int>& open_connectors() const { return open_; }
  bool is_open_connector(int position) const;
  /// Partner of a paired position, nullopt for open connectors.
  std::optional<int> partner(int position) const;

  friend bool operator==(const HalfPairPartition&, const HalfPairPartition&) = default;
  friend auto operator<=>(const HalfPairPartition& a, const HalfPairPartition& b) {
    if (auto c = a.ground_size_ <=> b.ground_size_; c != 0) return c;
    if (auto c = a.open_ <=> b.open_; c != 0) return c;
    return a.pairs_ <=> b.pairs_;
  }

 private:
  struct Unchecked {};
  HalfPairPartition(Unchecked, int ground_size, std::vector<std::pair<int, int>> pairs,
                    std::vector<int> open_connectors);
  friend std::vector<HalfPairPartition> enumerate_nhpp(int k, int m, int j);

  int ground_size_;
  std::vector<std::pair<int, int>> pairs_;  // (a, b) with a < b, sorted
  std::vector<int> open_;                   // sorted
};

/// Literal check of the non-crossing half pair definition, including the
/// parity-mixing requirement on every 2-block and that blocks cover [n].
bool is_noncrossing_half_pair(int ground_size, const std::vector<std::pair<int, int>>& pairs,
                              const std::vector<int>& open_connectors);

/// Initial point of the 2-block {l, r}: the endpoint from which the open
/// interval to the other endpoint holds no open connector.
int initial_point(const HalfPairPartition& pi, int l, int r);
int even_count(const HalfPairPartition& pi);

/// NHPP of [2k] with 2m open connectors and even count j, in canonical
/// order. Count equals C(k, j) C(k, m + j).
std::vector<HalfPairPartition> enumerate_nhpp(int k, int m, int j);
std::uint64_t nhpp_count(int k, int m, int j);

enum class Dot : std::uint8_t { White, Black };

/// Two-colouring of [2k]; colors()[l-1] is the dot at position l.
class DotStructure {
 public:
  explicit DotStructure(std::vector<Dot> colors);
  int k() const { return static_cast<int>(colors_.size() / 2); }
  const std::vector<Dot>& colors() const { return colors_; }
  Dot at(int position) const { return colors_[static_cast<std::size_t>(position - 1)]; }
  /// Black dots on odd positions.
  int j() const;
  /// White dots on even positions minus j; may be negative for colourings
  /// that belong to no D_{j,m,k}.
  int m() const;

  friend bool operator==(const DotStructure&, const DotStructure&) = default;

 private:
  std::vector<Dot> colors_;
};

/// All elements of D_{j,m,k}.
std::vector<DotStructure> enumerate_dot_structures(int j, int m, int k);

/// Colours black the far endpoint l' of every pair whose initial point is l.
DotStructure dot_bijection(const HalfPairPartition& pi);
/// Matches every black dot with the first available white dot going
/// counter-clockwise, skipping one extra white dot per black dot passed.
/// Throws BijectionError if no consistent matching exists.
HalfPairPartition dot_bijection_inverse(const DotStructure& d);

/// Permutation of [2m] stored 1-based: image(r) = g(r).
class DihedralElement {
 public:
  DihedralElement(int m, std::vector<int> images);
  static DihedralElement identity(int m);
  int m() const { return m_; }
  int image(int r) const { return images_[static_cast<std::size_t>(r - 1)]; }
  const std::vector<int>& images() const { return images_; }
  /// (a * b)(r) = a(b(r)).
  friend DihedralElement operator*(const DihedralElement& a, const DihedralElement& b);
  DihedralElement inverse() const;

  friend bool operator==(const DihedralElement&, const DihedralElement&) = default;
  friend auto operator<=>(const DihedralElement& a, const DihedralElement& b) { return a.images_ <=> b.images_; }

 private:
  int m_;
  std::vector<int> images_;
};

/// D_{4m}: generated by the 2m-cycle and the reflection r -> 2m + 1 - r.
/// For m = 1 this is {id} by convention. Sorted by image vector.
std::vector<DihedralElement> dihedral_group(int m);

/// {(1, r), (2, g(r))} pair partition on circles (2m, 2m); for m = 1 the
/// single 4-block.
CirclePartition dihedral_partition(const DihedralElement& g);

/// The g with dihedral_partition(g) == pi, if any.
std::optional<DihedralElement> match_dihedral(const CirclePartition& pi);

/// sum_i #NHPP_{[2k1]}^{2m,i} * #NHPP_{[2k2]}^{2m,j-i}.
std::uint64_t a_coefficient(int k1, int k2, int m, int j);

}  // namespace mpfluct::partitions
