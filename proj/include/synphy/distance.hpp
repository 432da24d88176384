#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synphy/charmatrix.hpp"
#include "synphy/eigen_support.hpp"
#include "synphy/rational.hpp"

namespace synphy {

/// How pairs with Unmapped cells enter the normalized distance.
///   SharedOnly    - mismatches / columns mapped for both (per-pair overlap)
///   PadAsMismatch - any comparison touching an Unmapped cell is a mismatch,
///                   normalized over all columns
///   PadAsMatch    - same, counted as a match
enum class MissingPolicy { SharedOnly, PadAsMismatch, PadAsMatch };

/// Symmetric pairwise dissimilarities with a zero diagonal.
struct DistanceMatrix {
  std::vector<std::string> labels;
  RationalMatrix entries;

  void validate() const;  // Error on asymmetry, nonzero diagonal, negatives
};

/// Count of positions where two equal-length binary vectors differ.
/// Unmapped cells are not allowed here; use distance_matrix for those.
long long hamming(std::span<const Cell> u, std::span<const Cell> v);

/// Pairwise normalized distances over the matrix rows. Under SharedOnly,
/// any pair whose mapped overlap is below min_overlap (or empty) is an
/// error naming the pair. The diagonal is zero under every policy.
DistanceMatrix distance_matrix(const CharacterMatrix& m, MissingPolicy policy,
                               long long min_overlap = 20);

/// Classic distance-matrix text: first line the taxon count, then one row
/// per taxon, name padded to 10 characters. Entries are 6-digit decimals,
/// or exact rationals with exact=true. Internal whitespace in names is
/// replaced by '_'.
std::string format_distance_matrix(const DistanceMatrix& d,
                                   bool lower_triangle = false,
                                   bool exact = false);

/// Reads both the square and lower-triangle layouts; "a/b" tokens are read
/// exactly, decimal tokens as their exact decimal value.
DistanceMatrix parse_distance_matrix(std::string_view text);

}  // namespace synphy
