#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqident {

// Hard limit on graph size. Everything downstream enumerates joint
// configurations, so larger graphs are rejected at construction.
inline constexpr int kMaxNodes = 24;

// A set of node indices backed by a 64-bit mask. Iteration is in ascending
// index order.
class NodeSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = int;
    using difference_type = std::ptrdiff_t;
    using pointer = const int*;
    using reference = int;

    iterator() = default;
    explicit iterator(std::uint64_t rest) : rest_(rest) {}
    int operator*() const { return std::countr_zero(rest_); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    iterator operator++(int) {
      auto old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr NodeSet() = default;
  NodeSet(std::initializer_list<int> nodes) {
    for (int v : nodes) insert(v);
  }
  explicit NodeSet(std::span<const int> nodes) {
    for (int v : nodes) insert(v);
  }
  static constexpr NodeSet from_bits(std::uint64_t bits) {
    NodeSet s;
    s.bits_ = bits;
    return s;
  }

  bool contains(int v) const { return v >= 0 && v < 64 && ((bits_ >> v) & 1U) != 0; }
  void insert(int v) { bits_ |= std::uint64_t{1} << v; }
  void erase(int v) { bits_ &= ~(std::uint64_t{1} << v); }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint64_t bits() const { return bits_; }
  // Largest index + 1, or 0 for the empty set.
  int extent() const { return 64 - std::countl_zero(bits_); }
  bool is_subset_of(NodeSet other) const { return (bits_ & ~other.bits_) == 0; }
  bool intersects(NodeSet other) const { return (bits_ & other.bits_) != 0; }
  std::vector<int> to_vector() const { return {begin(), end()}; }

  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

  friend NodeSet operator|(NodeSet a, NodeSet b) { return from_bits(a.bits_ | b.bits_); }
  friend NodeSet operator&(NodeSet a, NodeSet b) { return from_bits(a.bits_ & b.bits_); }
  friend NodeSet operator-(NodeSet a, NodeSet b) { return from_bits(a.bits_ & ~b.bits_); }
  NodeSet& operator|=(NodeSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  bool operator==(const NodeSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

using Arc = std::pair<int, int>;

// Immutable directed acyclic graph with labelled nodes 0..n-1.
class Dag {
 public:
  Dag() = default;

  // Validates labels and edges: CycleDetected, UnknownLabel, DuplicateEdge,
  // DuplicateLabel, TooManyNodes.
  static Dag build(std::vector<std::string> labels,
                   const std::vector<std::pair<std::string, std::string>>& edges);
  static Dag from_arcs(std::vector<std::string> labels, std::vector<Arc> arcs);

  int size() const noexcept { return static_cast<int>(labels_.size()); }
  NodeSet all() const { return NodeSet::from_bits(size() == 0 ? 0 : (~std::uint64_t{0} >> (64 - size()))); }

  const std::string& label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<int> find(std::string_view label) const;
  // Throws UnknownLabel.
  int index_of(std::string_view label) const;
  NodeSet set_of(std::initializer_list<std::string_view> labels) const;
  NodeSet set_of(std::span<const std::string> labels) const;

  NodeSet parents(int v) const { return parents_.at(static_cast<std::size_t>(v)); }
  NodeSet children(int v) const { return children_.at(static_cast<std::size_t>(v)); }
  bool has_arc(int from, int to) const { return children(from).contains(to); }
  // Sorted lexicographically by (parent, child).
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const std::vector<int>& topological_order() const noexcept { return topo_; }

  bool operator==(const Dag& other) const {
    return labels_ == other.labels_ && arcs_ == other.arcs_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
  std::vector<Arc> arcs_;
  std::vector<int> topo_;
};

struct MoralGraph {
  NodeSet nodes;
  // Indexed by Dag node; rows of nodes outside `nodes` are empty.
  std::vector<NodeSet> adjacency;

  bool adjacent(int a, int b) const { return adjacency.at(static_cast<std::size_t>(a)).contains(b); }
  // Unordered edges as (smaller, larger), sorted.
  std::vector<Arc> edges() const;
};

struct SeparationVerdict {
  bool separated = true;
  // Moral-graph path from a node of the second query set to a node of the
  // first, avoiding the conditioning set. Empty iff separated.
  std::vector<int> witness;
};

NodeSet ancestors(const Dag& g, NodeSet seed);

MoralGraph ancestral_moral_graph(const Dag& g, NodeSet seed);

// Moralisation criterion: x and y are separated by z iff every path between
// them in the moral graph of An(x ∪ y ∪ z) meets z. The witness is the
// breadth-first shortest avoiding path, ties broken by smallest node index.
SeparationVerdict d_separated(const Dag& g, NodeSet x, NodeSet y, NodeSet z);

// "a - b - c" using node labels.
std::string render_path(const Dag& g, std::span<const int> path);
std::string render_set(const Dag& g, NodeSet s);

}  // namespace seqident
