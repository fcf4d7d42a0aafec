#include "mpfluct/partitions.hpp"

#include "mpfluct/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>

namespace mpfluct::partitions {

namespace {

int cyclic(int position, int length) { return ((position - 1) % length + length) % length + 1; }

}  // namespace

// ---------------------------------------------------------------------------
// SetPartition

SetPartition SetPartition::from_blocks(int ground_size, const std::vector<std::vector<int>>& blocks) {
  if (ground_size < 0) throw DomainError("negative ground size");
  std::vector<int> labels(static_cast<std::size_t>(ground_size), -1);
  int id = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw DomainError("empty block");
    for (int x : block) {
      if (x < 0 || x >= ground_size) throw DomainError("block element " + std::to_string(x) + " out of range");
      auto& slot = labels[static_cast<std::size_t>(x)];
      if (slot != -1) throw DomainError("element " + std::to_string(x) + " appears in two blocks");
      slot = id;
    }
    ++id;
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end())
    throw DomainError("blocks do not cover the ground set");
  return from_labels(labels);
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(block_count_));
  for (int i = 0; i < ground_size(); ++i) out[static_cast<std::size_t>(labels_[static_cast<std::size_t>(i)])].push_back(i);
  return out;
}

std::vector<int> SetPartition::block_sizes() const {
  std::vector<int> out(static_cast<std::size_t>(block_count_), 0);
  for (int label : labels_) ++out[static_cast<std::size_t>(label)];
  return out;
}

std::vector<SetPartition> enumerate_set_partitions(int n) {
  if (n < 1 || n > kMaxSetPartitionSize)
    throw SizeLimitError("set partition enumeration needs 1 <= n <= " + std::to_string(kMaxSetPartitionSize) +
                         ", got " + std::to_string(n));
  std::vector<SetPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> extend = [&](int pos, int max_label) {
    if (pos == n) {
      out.push_back(SetPartition::from_labels(rgs));
      return;
    }
    for (int label = 0; label <= max_label + 1; ++label) {
      rgs[static_cast<std::size_t>(pos)] = label;
      extend(pos + 1, std::max(max_label, label));
    }
  };
  extend(1, 0);
  return out;
}

// ---------------------------------------------------------------------------
// CirclePartition

CirclePartition::CirclePartition(std::vector<int> circle_lengths, SetPartition partition)
    : lengths_(std::move(circle_lengths)), partition_(std::move(partition)) {
  if (lengths_.empty()) throw DomainError("circle partition needs at least one circle");
  int total = 0;
  offsets_.reserve(lengths_.size());
  for (int len : lengths_) {
    if (len <= 0 || len % 2 != 0) throw DomainError("circle lengths must be even and positive");
    offsets_.push_back(total);
    total += len;
  }
  if (partition_.ground_size() != total)
    throw DomainError("partition ground size " + std::to_string(partition_.ground_size()) +
                      " does not match total circle length " + std::to_string(total));
}

CirclePartition CirclePartition::from_blocks(std::vector<int> circle_lengths,
                                             const std::vector<std::vector<CircleIndex>>& blocks) {
  int total = std::accumulate(circle_lengths.begin(), circle_lengths.end(), 0);
  CirclePartition shape(circle_lengths, SetPartition::from_labels(std::vector<int>(static_cast<std::size_t>(total), 0)));
  std::vector<std::vector<int>> flat_blocks;
  flat_blocks.reserve(blocks.size());
  for (const auto& block : blocks) {
    std::vector<int> fb;
    for (const auto& x : block) {
      if (x.circle < 1 || x.circle > shape.circle_count()) throw DomainError("circle index out of range");
      if (x.position < 1 || x.position > shape.circle_length(x.circle))
        throw DomainError("position out of range on circle " + std::to_string(x.circle));
      fb.push_back(shape.flat(x));
    }
    flat_blocks.push_back(std::move(fb));
  }
  return {std::move(circle_lengths), SetPartition::from_blocks(total, flat_blocks)};
}

int CirclePartition::flat(CircleIndex x) const {
  const int len = circle_length(x.circle);
  return offsets_[static_cast<std::size_t>(x.circle - 1)] + cyclic(x.position, len) - 1;
}

CircleIndex CirclePartition::unflat(int flat_index) const {
  int circle = 0;
  while (circle + 1 < circle_count() && offsets_[static_cast<std::size_t>(circle + 1)] <= flat_index) ++circle;
  return {circle + 1, flat_index - offsets_[static_cast<std::size_t>(circle)] + 1};
}

std::vector<std::vector<CircleIndex>> CirclePartition::blocks() const {
  std::vector<std::vector<CircleIndex>> out;
  for (const auto& block : partition_.blocks()) {
    std::vector<CircleIndex> b;
    b.reserve(block.size());
    for (int x : block) b.push_back(unflat(x));
    out.push_back(std::move(b));
  }
  return out;
}

bool in_open_interval(int l, int r, int q, int length) {
  const int dr = ((r - l) % length + length) % length;
  const int dq = ((q - l) % length + length) % length;
  return dq > 0 && dq < dr;
}

// ---------------------------------------------------------------------------
// Classification

bool is_connected(const CirclePartition& pi) {
  const int j = pi.circle_count();
  // A single circle admits no bipartition, and is reported as not connected.
  if (j < 2) return false;
  std::vector<int> parent(static_cast<std::size_t>(j));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const auto& block : pi.partition().blocks()) {
    const int first = pi.unflat(block.front()).circle - 1;
    for (int x : block) parent[static_cast<std::size_t>(find(pi.unflat(x).circle - 1))] = find(first);
  }
  const int root = find(0);
  for (int c = 1; c < j; ++c)
    if (find(c) != root) return false;
  return true;
}

std::set<CircleIndex> connectors(const CirclePartition& pi) {
  std::set<CircleIndex> out;
  for (const auto& block : pi.blocks()) {
    const bool mixed = std::any_of(block.begin(), block.end(),
                                   [&](const CircleIndex& x) { return x.circle != block.front().circle; });
    if (mixed) out.insert(block.begin(), block.end());
  }
  return out;
}

std::set<CircleIndex> simple_connectors(const CirclePartition& pi) {
  std::set<CircleIndex> out;
  for (const auto& block : pi.blocks()) {
    for (const auto& x : block) {
      bool other_circle = false;
      bool same_circle = false;
      for (const auto& y : block) {
        if (y == x) continue;
        if (y.circle != x.circle) other_circle = true;
        else same_circle = true;
      }
      if (other_circle && !same_circle) out.insert(x);
    }
  }
  return out;
}

bool is_crossing(const CirclePartition& pi) {
  const auto conn = connectors(pi);
  for (int i = 1; i <= pi.circle_count(); ++i) {
    const int len = pi.circle_length(i);
    for (int l1 = 1; l1 <= len; ++l1) {
      for (int l2 = l1 + 1; l2 <= len; ++l2) {
        if (!pi.equivalent({i, l1}, {i, l2})) continue;
        for (int m1 = 1; m1 <= len; ++m1) {
          if (!in_open_interval(l1, l2, m1, len)) continue;
          for (int m2 = 1; m2 <= len; ++m2) {
            if (!in_open_interval(l2, l1, m2, len)) continue;
            if (pi.equivalent({i, m1}, {i, m2})) return true;
            if (conn.contains({i, m1}) && conn.contains({i, m2})) return true;
          }
        }
      }
    }
  }
  return false;
}

PartitionType partition_type(const CirclePartition& pi) {
  if (!is_connected(pi)) return PartitionType::Other;
  const auto blocks = pi.blocks();
  if (std::all_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.size() == 2; })) return PartitionType::PP1;

  if (pi.circle_count() != 2) return PartitionType::Other;
  const int k = pi.ground_size() / 2;
  if (static_cast<int>(blocks.size()) != k - 1) return PartitionType::Other;
  int four_blocks = 0;
  for (const auto& b : blocks) {
    if (b.size() == 4) {
      ++four_blocks;
      const auto on_first = std::count_if(b.begin(), b.end(), [](const CircleIndex& x) { return x.circle == 1; });
      if (on_first != 2) return PartitionType::Other;
    } else if (b.size() == 2) {
      if (b[0].circle != b[1].circle) return PartitionType::Other;
    } else {
      return PartitionType::Other;
    }
  }
  return four_blocks == 1 ? PartitionType::PP2 : PartitionType::Other;
}

CircleClassification classify_circle_partition(const CirclePartition& pi) {
  CircleClassification out;
  out.connected = is_connected(pi);
  out.connectors = connectors(pi);
  out.simple_connectors = simple_connectors(pi);
  out.crossing = is_crossing(pi);
  out.type = partition_type(pi);
  return out;
}

// ---------------------------------------------------------------------------
// Nearest-neighbour elimination

CirclePartition eliminate_neighbor_pair(const CirclePartition& pi, int circle, int position) {
  if (circle < 1 || circle > pi.circle_count()) throw DomainError("circle out of range");
  const int len = pi.circle_length(circle);
  if (position < 1 || position > len) throw DomainError("position out of range");
  const int next = cyclic(position + 1, len);
  const auto& part = pi.partition();
  const int a = pi.flat({circle, position});
  const int b = pi.flat({circle, next});
  const auto sizes = part.block_sizes();
  if (a == b || !part.same_block(a, b) || sizes[static_cast<std::size_t>(part.block_of(a))] != 2)
    throw ClassificationError("{(" + std::to_string(circle) + "," + std::to_string(position) + "),(" +
                              std::to_string(circle) + "," + std::to_string(next) + ")} is not a 2-block");
  if (len == 2) throw ClassificationError("elimination would empty circle " + std::to_string(circle));

  auto lengths = pi.circle_lengths();
  lengths[static_cast<std::size_t>(circle - 1)] = len - 2;
  const int new_total = pi.ground_size() - 2;
  std::vector<int> labels(static_cast<std::size_t>(new_total), -1);
  CirclePartition shape(lengths, SetPartition::from_labels(std::vector<int>(static_cast<std::size_t>(new_total), 0)));

  for (int x = 0; x < pi.ground_size(); ++x) {
    if (x == a || x == b) continue;
    CircleIndex old = pi.unflat(x);
    CircleIndex now = old;
    if (old.circle == circle) {
      if (position != len) {
        now.position = old.position < position ? old.position : old.position - 2;
      } else {
        now.position = old.position == 2 ? len - 2 : old.position - 2;
      }
    }
    labels[static_cast<std::size_t>(shape.flat(now))] = part.block_of(x);
  }
  return {std::move(lengths), SetPartition::from_labels(labels)};
}

CirclePartition reduce_to_hat(const CirclePartition& pi) {
  if (pi.circle_count() != 2) throw ClassificationError("reduction needs exactly two circles");
  const auto type = partition_type(pi);
  if (type == PartitionType::Other) throw ClassificationError("reduction needs a PP1 or PP2 partition");

  CirclePartition current = pi;
  while (true) {
    const auto conn = connectors(current);
    if (static_cast<int>(conn.size()) == current.ground_size()) break;
    const auto sizes = current.partition().block_sizes();
    bool eliminated = false;
    for (int i = 1; i <= 2 && !eliminated; ++i) {
      const int len = current.circle_length(i);
      for (int l = 1; l <= len; ++l) {
        const int a = current.flat({i, l});
        const int b = current.flat({i, l + 1});
        if (a != b && current.partition().same_block(a, b) &&
            sizes[static_cast<std::size_t>(current.partition().block_of(a))] == 2) {
          current = eliminate_neighbor_pair(current, i, l);
          eliminated = true;
          break;
        }
      }
    }
    if (!eliminated) throw ClassificationError("no nearest-neighbour pair left before reaching the connectors");
  }
  if (current.circle_length(1) != current.circle_length(2))
    throw ClassificationError("reduced circles have unequal length");
  return current;
}

int even_count(const CirclePartition& pi) {
  const auto conn = connectors(pi);
  int count = 0;
  for (const auto& block : pi.blocks()) {
    if (block.size() != 2 || block[0].circle != block[1].circle) continue;
    const int i = block[0].circle;
    const int len = pi.circle_length(i);
    const int l = block[0].position;
    const int r = block[1].position;
    auto clear = [&](int from, int to) {
      for (int q = 1; q <= len; ++q)
        if (in_open_interval(from, to, q, len) && conn.contains({i, q})) return false;
      return true;
    };
    const bool from_l = clear(l, r);
    const bool from_r = clear(r, l);
    if (from_l == from_r)
      throw InvariantError("initial point of {(" + std::to_string(i) + "," + std::to_string(l) + "),(" +
                           std::to_string(i) + "," + std::to_string(r) + ")} is ill-defined");
    const int gamma = from_l ? l : r;
    if (gamma % 2 == 0) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Half pair partitions

bool is_noncrossing_half_pair(int n, const std::vector<std::pair<int, int>>& pairs,
                              const std::vector<int>& open_connectors) {
  if (n < 1) return false;
  // block id per position: pairs get 0.., open connectors -1 - index
  std::vector<int> block(static_cast<std::size_t>(n) + 1, 0);
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  auto mark = [&](int x, int id) {
    if (x < 1 || x > n || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = true;
    block[static_cast<std::size_t>(x)] = id;
    return true;
  };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [a, b] = pairs[p];
    if (a == b) return false;
    if (!mark(a, static_cast<int>(p)) || !mark(b, static_cast<int>(p))) return false;
    if ((a + b) % 2 == 0) return false;
  }
  for (std::size_t o = 0; o < open_connectors.size(); ++o)
    if (!mark(open_connectors[o], -1 - static_cast<int>(o))) return false;
  for (int x = 1; x <= n; ++x)
    if (!seen[static_cast<std::size_t>(x)]) return false;

  for (const auto& [l, r] : pairs) {
    for (int q = 1; q <= n; ++q) {
      if (!in_open_interval(l, r, q, n)) continue;
      for (int qq = 1; qq <= n; ++qq) {
        if (!in_open_interval(r, l, qq, n)) continue;
        if (block[static_cast<std::size_t>(q)] == block[static_cast<std::size_t>(qq)]) return false;
        if (block[static_cast<std::size_t>(q)] < 0 && block[static_cast<std::size_t>(qq)] < 0) return false;
      }
    }
  }
  return true;
}

HalfPairPartition::HalfPairPartition(Unchecked, int ground_size, std::vector<std::pair<int, int>> pairs,
                                     std::vector<int> open_connectors)
    : ground_size_(ground_size), pairs_(std::move(pairs)), open_(std::move(open_connectors)) {
  for (auto& [a, b] : pairs_)
    if (a > b) std::swap(a, b);
  std::sort(pairs_.begin(), pairs_.end());
  std::sort(open_.begin(), open_.end());
}

HalfPairPartition::HalfPairPartition(int ground_size, std::vector<std::pair<int, int>> pairs,
                                     std::vector<int> open_connectors)
    : HalfPairPartition(Unchecked{}, ground_size, std::move(pairs), std::move(open_connectors)) {
  if (!is_noncrossing_half_pair(ground_size_, pairs_, open_))
    throw DomainError("not a non-crossing half pair partition of [" + std::to_string(ground_size_) + "]");
}

bool HalfPairPartition::is_open_connector(int position) const {
  return std::binary_search(open_.begin(), open_.end(), position);
}

std::optional<int> HalfPairPartition::partner(int position) const {
  for (const auto& [a, b] : pairs_) {
    if (a == position) return b;
    if (b == position) return a;
  }
  return std::nullopt;
}

int initial_point(const HalfPairPartition& pi, int l, int r) {
  const int n = pi.ground_size();
  auto clear = [&](int from, int to) {
    for (int q : pi.open_connectors())
      if (in_open_interval(from, to, q, n)) return false;
    return true;
  };
  const bool from_l = clear(l, r);
  const bool from_r = clear(r, l);
  if (from_l == from_r)
    throw InvariantError("initial point of {" + std::to_string(l) + "," + std::to_string(r) + "} is ill-defined");
  return from_l ? l : r;
}

int even_count(const HalfPairPartition& pi) {
  int count = 0;
  for (const auto& [a, b] : pi.pairs())
    if (initial_point(pi, a, b) % 2 == 0) ++count;
  return count;
}

namespace {

// All non-crossing perfect matchings of seq (in the given linear order).
// Each matching lists pairs (first, second) with first preceding second.
void noncrossing_matchings(const std::vector<int>& seq, std::size_t begin, std::size_t end,
                           std::vector<std::pair<int, int>>& current,
                           const std::function<void()>& emit) {
  if (begin == end) {
    emit();
    return;
  }
  // seq[begin] pairs with seq[partner]; the inside and the rest are matched independently.
  for (std::size_t partner = begin + 1; partner < end; partner += 2) {
    current.emplace_back(seq[begin], seq[partner]);
    noncrossing_matchings(seq, begin + 1, partner, current, [&] {
      noncrossing_matchings(seq, partner + 1, end, current, emit);
    });
    current.pop_back();
  }
}

}  // namespace

std::vector<HalfPairPartition> enumerate_nhpp(int k, int m, int j) {
  if (k < 1 || m < 1 || m > k || j < 0 || j > k - m)
    throw DomainError("enumerate_nhpp needs k >= 1, 1 <= m <= k, 0 <= j <= k - m");
  const int n = 2 * k;
  if (n > kMaxNhppGroundSize)
    throw SizeLimitError("NHPP enumeration limited to ground size " + std::to_string(kMaxNhppGroundSize));

  // Open connectors split the circle into gaps. A 2-block must have all open
  // connectors on one side, so both ends lie in one gap, and the blocks of a
  // gap form a non-crossing perfect matching of it.
  std::vector<HalfPairPartition> out;
  std::vector<int> conn(static_cast<std::size_t>(2 * m));
  std::function<void(int, int)> choose = [&](int idx, int start) {
    if (idx == 2 * m) {
      std::vector<std::vector<int>> gaps;
      for (int g = 0; g < 2 * m; ++g) {
        const int from = conn[static_cast<std::size_t>(g)];
        const int to = g + 1 < 2 * m ? conn[static_cast<std::size_t>(g + 1)] : conn[0] + n;
        std::vector<int> gap;
        for (int x = from + 1; x < to; ++x) gap.push_back(cyclic(x, n));
        if (gap.size() % 2 != 0) return;
        gaps.push_back(std::move(gap));
      }
      std::vector<std::pair<int, int>> pairs;
      std::function<void(std::size_t)> per_gap = [&](std::size_t g) {
        if (g == gaps.size()) {
          int even = 0;
          for (const auto& pr : pairs)
            if (pr.first % 2 == 0) ++even;  // first in gap order is the initial point
          if (even == j) out.push_back(HalfPairPartition(HalfPairPartition::Unchecked{}, n, pairs, conn));
          return;
        }
        noncrossing_matchings(gaps[g], 0, gaps[g].size(), pairs, [&] { per_gap(g + 1); });
      };
      per_gap(0);
      return;
    }
    for (int x = start; x <= n - (2 * m - idx) + 1; ++x) {
      conn[static_cast<std::size_t>(idx)] = x;
      choose(idx + 1, x + 1);
    }
  };
  choose(0, 1);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t nhpp_count(int k, int m, int j) { return enumerate_nhpp(k, m, j).size(); }

// ---------------------------------------------------------------------------
// Dot structures

DotStructure::DotStructure(std::vector<Dot> colors) : colors_(std::move(colors)) {
  if (colors_.empty() || colors_.size() % 2 != 0) throw DomainError("dot structure needs 2k > 0 dots");
}

int DotStructure::j() const {
  int count = 0;
  for (std::size_t i = 0; i < colors_.size(); i += 2)
    if (colors_[i] == Dot::Black) ++count;
  return count;
}

int DotStructure::m() const {
  int white_even = 0;
  for (std::size_t i = 1; i < colors_.size(); i += 2)
    if (colors_[i] == Dot::White) ++white_even;
  return white_even - j();
}

std::vector<DotStructure> enumerate_dot_structures(int j, int m, int k) {
  if (k < 1 || m < 0 || m > k || j < 0 || j > k - m) throw DomainError("D_{j,m,k} needs 0 <= m <= k, 0 <= j <= k - m");
  const int black_even = k - (m + j);
  std::vector<DotStructure> out;
  std::vector<Dot> colors(static_cast<std::size_t>(2 * k), Dot::White);
  // choose `count` black dots among positions start, start + 2, ... (0-based parity class)
  std::function<void(int, int, int, const std::function<void()>&)> pick =
      [&](int parity, int from, int count, const std::function<void()>& done) {
        if (count == 0) {
          done();
          return;
        }
        for (int idx = from; idx < k; ++idx) {
          if (k - idx < count) break;
          colors[static_cast<std::size_t>(2 * idx + parity)] = Dot::Black;
          pick(parity, idx + 1, count - 1, done);
          colors[static_cast<std::size_t>(2 * idx + parity)] = Dot::White;
        }
      };
  pick(0, 0, j, [&] { pick(1, 0, black_even, [&] { out.emplace_back(colors); }); });
  return out;
}

DotStructure dot_bijection(const HalfPairPartition& pi) {
  std::vector<Dot> colors(static_cast<std::size_t>(pi.ground_size()), Dot::White);
  for (const auto& [a, b] : pi.pairs()) {
    const int gamma = initial_point(pi, a, b);
    const int far = gamma == a ? b : a;
    colors[static_cast<std::size_t>(far - 1)] = Dot::Black;
  }
  return DotStructure(std::move(colors));
}

HalfPairPartition dot_bijection_inverse(const DotStructure& d) {
  const int n = 2 * d.k();
  if (d.m() < 1) throw BijectionError("dot structure has no open connectors (m = " + std::to_string(d.m()) + ")");
  std::vector<int> partner(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::pair<int, int>> pairs;
  for (int b = 1; b <= n; ++b) {
    if (d.at(b) != Dot::Black) continue;
    int skip = 0;
    int found = 0;
    for (int step = 1; step < n; ++step) {
      const int q = cyclic(b - step, n);
      if (d.at(q) == Dot::Black) {
        ++skip;
      } else if (skip == 0) {
        found = q;
        break;
      } else {
        --skip;
      }
    }
    if (found == 0) throw BijectionError("black dot " + std::to_string(b) + " has no available white dot");
    if (partner[static_cast<std::size_t>(found)] != 0)
      throw BijectionError("white dot " + std::to_string(found) + " matched twice");
    partner[static_cast<std::size_t>(found)] = b;
    partner[static_cast<std::size_t>(b)] = found;
    pairs.emplace_back(found, b);
  }
  std::vector<int> open;
  for (int x = 1; x <= n; ++x)
    if (partner[static_cast<std::size_t>(x)] == 0) open.push_back(x);
  try {
    HalfPairPartition pi(n, std::move(pairs), std::move(open));
    if (!(dot_bijection(pi) == d)) throw BijectionError("matching does not reproduce the dot structure");
    return pi;
  } catch (const DomainError& e) {
    throw BijectionError(std::string("matching is not a non-crossing half pair partition: ") + e.what());
  } catch (const InvariantError& e) {
    throw BijectionError(std::string("matching has an ill-defined initial point: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Dihedral group

namespace {

bool is_dihedral_permutation(int m, const std::vector<int>& images) {
  const int n = 2 * m;
  if (m == 1) return images == std::vector<int>{1, 2};
  for (int c = 0; c < n; ++c) {
    bool rotation = true;
    bool reflection = true;
    for (int r = 1; r <= n; ++r) {
      const int img = images[static_cast<std::size_t>(r - 1)];
      if (img != cyclic(r + c, n)) rotation = false;
      if (img != cyclic(c + 1 - r, n)) reflection = false;
    }
    if (rotation || reflection) return true;
  }
  return false;
}

}  // namespace

DihedralElement::DihedralElement(int m, std::vector<int> images) : m_(m), images_(std::move(images)) {
  if (m < 1 || static_cast<int>(images_.size()) != 2 * m) throw DomainError("dihedral element needs 2m images");
  std::vector<int> sorted = images_;
  std::sort(sorted.begin(), sorted.end());
  for (int r = 1; r <= 2 * m; ++r)
    if (sorted[static_cast<std::size_t>(r - 1)] != r) throw DomainError("dihedral element is not a permutation");
  if (!is_dihedral_permutation(m, images_)) throw DomainError("permutation is not in D_{4m}");
}

DihedralElement DihedralElement::identity(int m) {
  std::vector<int> id(static_cast<std::size_t>(2 * m));
  std::iota(id.begin(), id.end(), 1);
  return {m, std::move(id)};
}

DihedralElement operator*(const DihedralElement& a, const DihedralElement& b) {
  if (a.m() != b.m()) throw DomainError("composing dihedral elements of different order");
  std::vector<int> out(a.images().size());
  for (int r = 1; r <= 2 * a.m(); ++r) out[static_cast<std::size_t>(r - 1)] = a.image(b.image(r));
  return {a.m(), std::move(out)};
}

DihedralElement DihedralElement::inverse() const {
  std::vector<int> out(images_.size());
  for (int r = 1; r <= 2 * m_; ++r) out[static_cast<std::size_t>(image(r) - 1)] = r;
  return {m_, std::move(out)};
}

std::vector<DihedralElement> dihedral_group(int m) {
  if (m < 1) throw DomainError("dihedral_group needs m >= 1");
  if (m == 1) return {DihedralElement::identity(1)};
  const int n = 2 * m;
  std::vector<int> cycle(static_cast<std::size_t>(n));
  std::vector<int> flip(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    cycle[static_cast<std::size_t>(r - 1)] = cyclic(r + 1, n);
    flip[static_cast<std::size_t>(r - 1)] = n + 1 - r;
  }
  const std::vector<DihedralElement> generators{DihedralElement(m, cycle), DihedralElement(m, flip)};
  std::set<DihedralElement> group{DihedralElement::identity(m)};
  std::vector<DihedralElement> frontier{DihedralElement::identity(m)};
  while (!frontier.empty()) {
    std::vector<DihedralElement> next;
    for (const auto& g : frontier) {
      for (const auto& s : generators) {
        auto h = s * g;
        if (group.insert(h).second) next.push_back(h);
      }
    }
    frontier = std::move(next);
  }
  return {group.begin(), group.end()};
}

CirclePartition dihedral_partition(const DihedralElement& g) {
  const int m = g.m();
  if (m == 1) return CirclePartition::from_blocks({2, 2}, {{{1, 1}, {1, 2}, {2, 1}, {2, 2}}});
  std::vector<std::vector<CircleIndex>> blocks;
  for (int r = 1; r <= 2 * m; ++r) blocks.push_back({{1, r}, {2, g.image(r)}});
  return CirclePartition::from_blocks({2 * m, 2 * m}, blocks);
}

std::optional<DihedralElement> match_dihedral(const CirclePartition& pi) {
  if (pi.circle_count() != 2 || pi.circle_length(1) != pi.circle_length(2)) return std::nullopt;
  const int m = pi.circle_length(1) / 2;
  for (const auto& g : dihedral_group(m))
    if (dihedral_partition(g) == pi) return g;
  return std::nullopt;
}

std::uint64_t a_coefficient(int k1, int k2, int m, int j) {
  if (m < 1 || m > std::min(k1, k2) || j < 0 || j > k1 + k2 - 2 * m)
    throw DomainError("a_coefficient needs 1 <= m <= min(k1, k2) and 0 <= j <= k1 + k2 - 2m");
  std::uint64_t total = 0;
  for (int i = std::max(0, j - (k2 - m)); i <= std::min(j, k1 - m); ++i)
    total += nhpp_count(k1, m, i) * nhpp_count(k2, m, j - i);
  return total;
}

}  // namespace mpfluct::partitions
