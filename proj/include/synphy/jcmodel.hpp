#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synphy/charmatrix.hpp"
#include "synphy/rational.hpp"
#include "synphy/tree.hpp"

namespace synphy {

/// Stochastic parameters of the two-state symmetric Markov model on a
/// rooted tree: root distribution (pi, 1-pi) and one flip probability per
/// edge, indexed like the tree's edge list.
struct JCParams {
  Rational pi;                      // P(root state = 0)
  std::vector<Rational> edge_flip;  // p_e, off-diagonal of the edge channel

  /// Checks pi and all p_e lie in [0,1] and every tree edge has a value.
  void validate(const PhyloTree& t) const;
};

/// Exact joint distribution over {0,1}^n outcomes at the leaves. Outcome
/// index packs leaf states with the first leaf of `leaf_order` as the most
/// significant bit.
struct LeafDistribution {
  std::vector<std::string> leaf_order;
  std::vector<Rational> probs;  // size 2^n

  int n_leaves() const { return static_cast<int>(leaf_order.size()); }
  Rational sum() const;

  /// Same distribution with leaves permuted to `new_order` (a permutation
  /// of leaf_order).
  LeafDistribution reordered(std::span<const std::string> new_order) const;

  /// Header "leaves a|b|c", then one "bitstring a/b" line per nonzero
  /// outcome. Probabilities must sum to 1 exactly on input.
  std::string serialize() const;
  static LeafDistribution parse(std::string_view text);
};

/// Number of stochastic parameters of the k-state model on an n-leaf
/// binary tree: (2n-3) k(k-1) + k-1; for k=2 this is 4n-5.
long long param_count(int n_leaves, int k_states);

/// Exact leaf distribution by literal enumeration of histories: for each
/// leaf outcome, the sum over all internal-state assignments of
/// pi_root * prod_e M^e. Exponential in the node count; n <= 20 or so.
LeafDistribution expected_distribution_histories(const PhyloTree& t,
                                                 const JCParams& p);

/// Same map evaluated by bottom-up conditional tables (pruning); agrees
/// exactly with the histories sum and scales to much larger trees.
LeafDistribution expected_distribution_pruning(const PhyloTree& t,
                                               const JCParams& p);

/// m i.i.d. site columns sampled from the model; rows are the leaves in
/// tree order, columns "s1".."sm". Deterministic in (seed, site, node) via
/// a counter-based generator, so any subset of sites can be regenerated
/// independently.
CharacterMatrix sample(const PhyloTree& t, const JCParams& p, long long m,
                       std::uint64_t seed);

/// Parameter file: one "root <pi>" line plus one "edge <child> <p_e>" line
/// per edge, where <child> is the child-side node's leaf label or its node
/// index. Values are rationals ("1/10") or decimals ("0.1"). '#' starts a
/// comment line.
JCParams parse_params(const PhyloTree& t, std::string_view text);
std::string format_params(const PhyloTree& t, const JCParams& p);

}  // namespace synphy
