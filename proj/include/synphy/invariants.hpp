#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synphy/charmatrix.hpp"
#include "synphy/eigen_support.hpp"
#include "synphy/jcmodel.hpp"
#include "synphy/tree.hpp"

namespace synphy {

/// The joint leaf distribution rearranged along one split: rows indexed by
/// binary words over the row-side leaves (first leaf most significant),
/// columns likewise over the other side. Entries sum to 1.
struct FlatteningMatrix {
  Split split;
  std::vector<std::string> row_leaves, col_leaves;
  RationalMatrix m;
};

/// Which split side becomes the rows of a flattening.
enum class RowSide { ContainingFirstLeaf, First, Second };

/// One 3x3 minor of a flattening: row/column index triples and the exact
/// determinant value.
struct Minor3 {
  std::array<Eigen::Index, 3> rows, cols;
  Rational value;
};

struct SplitScore {
  Split split;
  Rational max_abs;
  Minor3 witness;  // first minor attaining max_abs in enumeration order
};

/// Outcome of evaluating the 3x3-minor invariants of a tree against a leaf
/// distribution. `accepted` is meaningful when `epsilon` is set: it holds
/// exactly when global_max < epsilon.
struct InvariantReport {
  std::string tree_newick;
  std::vector<SplitScore> per_split;
  Rational global_max;
  int global_split = -1;  // index into per_split of the witness
  std::optional<Rational> epsilon;
  bool accepted = false;

  /// Structured text form; decimal=true appends 7-digit decimals.
  std::string to_text(bool decimal = false) const;
};

/// Outcome frequencies over the matrix columns, restricted to the rows in
/// leaf_order. The matrix must be fully mapped; denominators equal the
/// column count.
LeafDistribution empirical_distribution(const CharacterMatrix& m,
                                        std::span<const std::string> leaf_order);

/// Same, with each column weighted; probabilities are weight sums over the
/// realizing columns divided by the total weight. Every column needs a
/// nonnegative weight and the total must be positive.
LeafDistribution weighted_empirical_distribution(
    const CharacterMatrix& m, std::span<const std::string> leaf_order,
    const std::map<std::string, Rational>& weights);

/// Rearrange P along a split of its leaf set.
FlatteningMatrix flatten(const LeafDistribution& P, const Split& s,
                         RowSide row_side = RowSide::ContainingFirstLeaf);

/// Visit every 3x3 minor of `m` in lexicographic (row-triple, col-triple)
/// order; the visitor returns false to stop early. No-op when the matrix
/// has fewer than 3 rows or columns.
void for_each_minor3(const RationalMatrix& m,
                     const std::function<bool(const Minor3&)>& visit);

/// All 3x3 minors, in enumeration order.
std::vector<Minor3> minors3(const RationalMatrix& m);

/// Max |3x3 minor| over the flattenings of every internal split of t,
/// with a witness per split. Requires n >= 4 (smaller trees have no
/// internal split, so all topologies are indistinguishable).
InvariantReport max_abs_minor(const LeafDistribution& P, const PhyloTree& t);

/// Acceptance test: accepted iff every minor is < epsilon in absolute
/// value. With quick=true the scan stops at the first violation instead of
/// completing the per-split maxima.
InvariantReport epsilon_test(const LeafDistribution& P, const PhyloTree& t,
                             const Rational& epsilon, bool quick = false);

/// Every unrooted topology on P's leaves (n <= 8) scored by max |minor|,
/// ascending; ties ordered by canonical Newick.
struct ScanEntry {
  PhyloTree tree;
  Rational max_abs;
};
std::vector<ScanEntry> rank_topology_scan(const LeafDistribution& P);

}  // namespace synphy
