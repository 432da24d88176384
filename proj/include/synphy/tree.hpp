#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synphy/rational.hpp"

namespace synphy {

/// Unordered bipartition of a leaf-label set, as induced by deleting one
/// tree edge. Canonical form: both sides sorted, and the side containing
/// the lexicographically smallest label stored first.
class Split {
 public:
  Split(std::vector<std::string> side_a, std::vector<std::string> side_b);

  const std::vector<std::string>& first() const { return a_; }
  const std::vector<std::string>& second() const { return b_; }

  /// Both sides have >= 2 labels.
  bool is_internal() const { return a_.size() >= 2 && b_.size() >= 2; }

  std::string to_string() const;  // "A,B | C,D"

  friend bool operator==(const Split& x, const Split& y) = default;
  friend auto operator<=>(const Split& x, const Split& y) = default;

 private:
  std::vector<std::string> a_, b_;
};

/// Leaf-labeled tree; unrooted when root() is unset, rooted otherwise.
/// Nodes are dense indices; leaves are the degree-1 nodes and carry unique
/// labels. Immutable by convention once built.
class PhyloTree {
 public:
  struct Edge {
    int u = -1, v = -1;
    std::optional<Rational> length;
  };

  int add_node(std::string label = {});
  int add_edge(int u, int v, std::optional<Rational> length = {});
  void relabel(int v, std::string label) { labels_[v] = std::move(label); }

  /// Insert a new node in the middle of edge e and return it. The original
  /// edge keeps its length on the u side; the new half is unset.
  int subdivide_edge(int e);

  int n_nodes() const { return static_cast<int>(labels_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::string& label(int v) const { return labels_[v]; }
  const std::vector<Edge>& edges() const { return edges_; }
  Edge& edge(int e) { return edges_[e]; }
  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const int> incident_edges(int v) const;
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }
  int neighbor_via(int v, int e) const;  // other endpoint of edge e

  std::optional<int> root() const { return root_; }
  void set_root(int v) { root_ = v; }
  void clear_root() { root_ = std::nullopt; }

  bool is_leaf(int v) const { return degree(v) == 1; }
  std::vector<int> leaves() const;               // node indices, ascending
  std::vector<std::string> leaf_labels() const;  // in node-index order
  int n_leaves() const;
  int leaf_by_label(const std::string& label) const;  // -1 if absent

  /// Connected, acyclic, unique nonempty leaf labels. Throws on violation.
  void validate() const;

  /// Every internal node has degree 3, allowing one degree-2 node when it
  /// is the designated root.
  bool is_binary() const;
  /// Root set, of degree 2, all other internal nodes of degree 3.
  bool is_rooted_binary() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;  // node -> incident edge indices
  std::optional<int> root_;
};

/// Parse a Newick string ("((A,B),(C,D));", lengths as ":0.25" or ":1/4").
/// The outermost node becomes the root; a top-level trifurcation therefore
/// yields an unrooted-style tree whose root has degree 3. Labels may be
/// single-quoted. Errors carry the character position.
PhyloTree parse_newick(std::string_view text);

/// Canonical Newick: children ordered by their smallest descendant leaf
/// label. Unrooted trees are written from the internal node adjacent to the
/// overall smallest leaf. Lengths are emitted as terminating decimals when
/// exact, otherwise as "a/b"; decimal=true forces 7-digit decimals.
std::string emit_newick(const PhyloTree& t, bool decimal = false);

/// One split per tree edge (the two edges at a degree-2 root induce the
/// same split and are reported once). Sorted canonically.
std::vector<Split> splits(const PhyloTree& t);

/// Splits with both sides of size >= 2: one per internal edge.
std::vector<Split> internal_splits(const PhyloTree& t);

/// Number of distinct leaf-labeled unrooted binary topologies on n leaves:
/// (2n-4)! / ((n-2)! 2^(n-2)).
BigInt topology_count(int n_leaves);

/// All topology_count(n) unrooted binary trees on the given taxa, 3<=n<=8.
/// Deterministic order (sequential edge insertion).
std::vector<PhyloTree> enumerate_topologies(std::span<const std::string> taxa);

/// All (2n-3)!! rooted binary trees on the given taxa, 2<=n<=7.
std::vector<PhyloTree> enumerate_rooted_topologies(
    std::span<const std::string> taxa);

/// Robinson-Foulds distance: size of the symmetric difference of the
/// internal split sets. Leaf sets must match.
long long rf_distance(const PhyloTree& a, const PhyloTree& b);

/// Copy with any degree-2 root suppressed (its two edges merged; lengths
/// added when both are present).
PhyloTree unrooted_copy(const PhyloTree& t);

/// Copy rooted at a new degree-2 node subdividing edge e. When the edge has
/// a length, each half gets length/2; otherwise the halves are unset.
PhyloTree rooted_on_edge(const PhyloTree& t, int e);

}  // namespace synphy
