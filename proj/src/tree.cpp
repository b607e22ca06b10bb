#include "treepca/tree.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "treepca/errors.hpp"

namespace treepca {

// ---------------------------------------------------------------------------
// LeafSet / Split
// ---------------------------------------------------------------------------

LeafSet::LeafSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw InvalidLeafSet("leaf set needs at least two leaves, got " + std::to_string(labels_.size()));
  }
  if (labels_.size() > kMaxLeaves) {
    throw InvalidLeafSet("leaf set has " + std::to_string(labels_.size()) + " leaves; at most " +
                         std::to_string(kMaxLeaves) + " are supported");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) throw DuplicateTaxon("duplicate leaf label '" + label + "'");
  }
  const auto n = labels_.size() - 1;
  full_mask_ = (n == 63) ? ~std::uint64_t{1} : (((std::uint64_t{1} << n) - 1) << 1);
}

std::shared_ptr<const LeafSet> LeafSet::numbered(int n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) labels.push_back(std::to_string(i));
  return std::make_shared<const LeafSet>(std::move(labels));
}

std::optional<int> LeafSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

bool same_leaves(const LeafSetPtr& a, const LeafSetPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

Split Split::from_indices(std::span<const int> side, const LeafSet& leaves) {
  std::uint64_t mask = 0;
  for (int i : side) {
    if (i < 0 || i > leaves.n()) throw InvalidLeafSet("leaf index " + std::to_string(i) + " out of range");
    mask |= std::uint64_t{1} << i;
  }
  if (mask & 1U) mask = (~mask) & leaves.full_mask();
  Split s(mask);
  if (!s.is_valid(leaves)) throw InvalidLeafSet("degenerate split " + s.to_string());
  return s;
}

bool Split::is_valid(const LeafSet& leaves) const {
  return mask_ != 0 && (mask_ & 1U) == 0 && (mask_ & ~leaves.full_mask()) == 0 && mask_ != leaves.full_mask();
}

std::vector<int> Split::indices() const {
  std::vector<int> out;
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::string Split::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int i : indices()) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

std::string Split::to_string(const LeafSet& leaves) const {
  std::string out = "{";
  bool first = true;
  for (int i : indices()) {
    if (!first) out += ',';
    out += leaves.label(i);
    first = false;
  }
  return out + "}";
}

std::vector<std::uint64_t> all_bipartition_sides(const LeafSet& leaves) {
  std::vector<std::uint64_t> out;
  const int n = leaves.n();
  if (n > 24) throw InvalidLeafSet("bipartition enumeration limited to N <= 24");
  const std::uint64_t count = std::uint64_t{1} << n;
  out.reserve(count - 1);
  for (std::uint64_t sub = 1; sub < count; ++sub) out.push_back(sub << 1);
  return out;
}

std::vector<Split> all_internal_splits(const LeafSet& leaves) {
  std::vector<Split> out;
  for (std::uint64_t side : all_bipartition_sides(leaves)) {
    const int size = std::popcount(side);
    if (size >= 2 && size <= leaves.n() - 1) out.emplace_back(side);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PhyloTree
// ---------------------------------------------------------------------------

PendantMode parse_pendant_mode(const std::string& text) {
  if (text == "ignore") return PendantMode::ignore;
  if (text == "include") return PendantMode::include;
  throw ParameterOutOfRange("pendant mode must be 'include' or 'ignore', got '" + text + "'");
}

std::string to_string(PendantMode mode) { return mode == PendantMode::include ? "include" : "ignore"; }

TopologyId::TopologyId(std::vector<Split> splits) : splits_(std::move(splits)) {
  std::sort(splits_.begin(), splits_.end());
  splits_.erase(std::unique(splits_.begin(), splits_.end()), splits_.end());
}

std::string TopologyId::to_string(const LeafSet& leaves) const {
  if (splits_.empty()) return "star";
  std::string out;
  for (std::size_t k = 0; k < splits_.size(); ++k) {
    if (k) out += ' ';
    bool first = true;
    for (int i : splits_[k].indices()) {
      if (!first) out += '+';
      out += leaves.label(i);
      first = false;
    }
  }
  return out;
}

namespace {

bool by_mask(const Edge& a, const Edge& b) { return a.split < b.split; }

}  // namespace

PhyloTree PhyloTree::validated(LeafSetPtr leaves, std::vector<Edge> edges) {
  if (!leaves) throw InvalidLeafSet("tree has no leaf set");
  for (const auto& e : edges) {
    if (!e.split.is_valid(*leaves)) throw InvalidLeafSet("split " + e.split.to_string() + " is not valid for this leaf set");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw NonPositiveLength("split " + e.split.to_string(*leaves) + " has non-positive length " +
                              std::to_string(e.length));
    }
  }
  std::sort(edges.begin(), edges.end(), by_mask);
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].split == edges[i - 1].split) throw DuplicateSplit("split " + edges[i].split.to_string(*leaves) + " appears twice");
  }
  std::size_t internal = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!edges[i].split.is_pendant()) ++internal;
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      if (!compatible(edges[i].split, edges[j].split)) {
        throw IncompatibleSplits("splits " + edges[i].split.to_string(*leaves) + " and " +
                                 edges[j].split.to_string(*leaves) + " are incompatible");
      }
    }
  }
  // Pairwise compatibility already bounds this; kept as a cheap invariant check.
  if (leaves->n() >= 2 && internal > static_cast<std::size_t>(leaves->n() - 2)) {
    throw IncompatibleSplits("more than N-2 internal splits");
  }
  return PhyloTree(std::move(leaves), std::move(edges));
}

PhyloTree PhyloTree::from_trusted(LeafSetPtr leaves, std::vector<Edge> edges) {
  std::erase_if(edges, [](const Edge& e) { return !(e.length > 0.0); });
  std::sort(edges.begin(), edges.end(), by_mask);
  return PhyloTree(std::move(leaves), std::move(edges));
}

PhyloTree PhyloTree::star(LeafSetPtr leaves, std::span<const double> pendants) {
  std::vector<Edge> edges;
  if (!pendants.empty()) {
    if (static_cast<int>(pendants.size()) != leaves->n()) throw InvalidLeafSet("star tree needs one pendant length per non-root leaf");
    for (int i = 1; i <= leaves->n(); ++i) edges.push_back({Split(std::uint64_t{1} << i), pendants[static_cast<std::size_t>(i - 1)]});
  }
  return validated(std::move(leaves), std::move(edges));
}

double PhyloTree::length(Split s) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), s, [](const Edge& e, Split v) { return e.split < v; });
  return (it != edges_.end() && it->split == s) ? it->length : 0.0;
}

bool PhyloTree::contains(Split s) const { return length(s) > 0.0; }

std::vector<Edge> PhyloTree::internal_edges() const {
  std::vector<Edge> out;
  for (const auto& e : edges_) {
    if (!e.split.is_pendant()) out.push_back(e);
  }
  return out;
}

std::size_t PhyloTree::internal_count() const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.split.is_pendant(); }));
}

bool PhyloTree::is_fully_resolved() const { return n() >= 2 && internal_count() == static_cast<std::size_t>(n() - 2); }

TopologyId PhyloTree::topology() const {
  std::vector<Split> splits;
  for (const auto& e : edges_) {
    if (!e.split.is_pendant()) splits.push_back(e.split);
  }
  return TopologyId(std::move(splits));
}

PhyloTree PhyloTree::without_pendants() const {
  PhyloTree out;
  out.leaves_ = leaves_;
  out.edges_.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (!e.split.is_pendant()) out.edges_.push_back(e);
  }
  return out;
}

bool PhyloTree::equals(const PhyloTree& other, double tolerance) const {
  if (!same_leaves(leaves_, other.leaves_) || edges_.size() != other.edges_.size()) return false;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].split != other.edges_[i].split) return false;
    if (std::abs(edges_[i].length - other.edges_[i].length) > tolerance) return false;
  }
  return true;
}

double squared_norm(const PhyloTree& tree, PendantMode mode) {
  double sum = 0.0;
  for (const auto& e : tree.edges()) {
    if (mode == PendantMode::ignore && e.split.is_pendant()) continue;
    sum += e.length * e.length;
  }
  return sum;
}

double norm(const PhyloTree& tree, PendantMode mode) { return std::sqrt(squared_norm(tree, mode)); }

double total_internal_length(const PhyloTree& tree) {
  double sum = 0.0;
  for (const auto& e : tree.edges()) {
    if (!e.split.is_pendant()) sum += e.length;
  }
  return sum;
}

}  // namespace treepca
