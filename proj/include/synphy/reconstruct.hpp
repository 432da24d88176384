#pragma once

#include "synphy/distance.hpp"
#include "synphy/tree.hpp"

namespace synphy {

/// Saitou-Nei neighbor joining over exact rationals. Returns an unrooted
/// binary tree on the matrix taxa. Ties in the Q criterion are broken by
/// the smallest (row, col) pair; a negative pendant length is clamped to 0
/// with the deficit moved to its sibling. On an additive matrix the output
/// realizes the input metric exactly.
PhyloTree neighbor_joining(const DistanceMatrix& d);

/// Average-linkage clustering. Returns a rooted ultrametric tree (exact:
/// all root-to-leaf paths are equal rationals). Ties merge the smallest
/// (row, col) pair.
PhyloTree upgma(const DistanceMatrix& d);

/// Pairwise path-length metric of an edge-weighted tree, with taxa sorted
/// by label. Every edge must carry a length. This is the oracle side of
/// reconstruction tests: NJ on path_distance_matrix(t) must recover t.
DistanceMatrix path_distance_matrix(const PhyloTree& t);

}  // namespace synphy
