#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace treepca {

// Ordered leaf labels. Index 0 is the root leaf; the remaining N leaves carry
// indices 1..N. Splits are stored as bitmasks so at most 64 leaves in total.
class LeafSet {
 public:
  static constexpr std::size_t kMaxLeaves = 64;

  explicit LeafSet(std::vector<std::string> labels);

  // Leaves "0", "1", ..., "n" (the paper-style labelling with N = n).
  static std::shared_ptr<const LeafSet> numbered(int n);

  int n() const { return static_cast<int>(labels_.size()) - 1; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> index_of(const std::string& label) const;

  // Bits 1..N set.
  std::uint64_t full_mask() const { return full_mask_; }

  bool operator==(const LeafSet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::uint64_t full_mask_ = 0;
};

using LeafSetPtr = std::shared_ptr<const LeafSet>;

bool same_leaves(const LeafSetPtr& a, const LeafSetPtr& b);

// One side of a bipartition: the leaves NOT on the root's side. Bit i set
// means leaf i is on that side. Bit 0 is never set and the side is never the
// full {1..N} (that edge is the root leaf's own pendant).
class Split {
 public:
  constexpr Split() = default;
  constexpr explicit Split(std::uint64_t mask) : mask_(mask) {}

  // Builds a split from either side of the bipartition; a side containing
  // the root is complemented. Throws InvalidLeafSet on degenerate input.
  static Split from_indices(std::span<const int> side, const LeafSet& leaves);
  static Split from_indices(std::initializer_list<int> side, const LeafSet& leaves) {
    return from_indices(std::span<const int>(side.begin(), side.size()), leaves);
  }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool is_pendant() const { return std::popcount(mask_) == 1; }
  constexpr bool contains(int leaf) const { return (mask_ >> leaf) & 1U; }
  constexpr bool contains(Split other) const { return (mask_ & other.mask_) == other.mask_; }

  bool is_valid(const LeafSet& leaves) const;

  std::vector<int> indices() const;
  // "{2,3}" using leaf indices, or "{B,C}" with labels.
  std::string to_string() const;
  std::string to_string(const LeafSet& leaves) const;

  constexpr auto operator<=>(const Split&) const = default;

 private:
  std::uint64_t mask_ = 0;
};

// Two splits can coexist in one tree iff one of the four side intersections
// is empty. With root-excluded sides the complement-complement intersection
// always holds the root, so this reduces to disjoint-or-nested.
constexpr bool compatible(Split a, Split b) {
  const std::uint64_t both = a.mask() & b.mask();
  return both == 0 || both == a.mask() || both == b.mask();
}

// Every bipartition X_e | X_e^c of the leaf set, as the root-excluded side.
// Includes the root pendant {1..N}, so the count is 2^N - 1.
std::vector<std::uint64_t> all_bipartition_sides(const LeafSet& leaves);

// Internal splits (2 <= |side| <= N-1).
std::vector<Split> all_internal_splits(const LeafSet& leaves);

}  // namespace treepca

template <>
struct std::hash<treepca::Split> {
  std::size_t operator()(const treepca::Split& s) const noexcept { return std::hash<std::uint64_t>{}(s.mask()); }
};
