#include "synphy/invariants.hpp"

#include <algorithm>
#include <set>

#include "synphy/error.hpp"

namespace synphy {

namespace {

const Rational kOne(1);

std::vector<size_t> row_indices_for(const CharacterMatrix& m,
                                    std::span<const std::string> leaf_order) {
  if (leaf_order.empty()) throw Error("empirical_distribution: no leaves");
  std::set<std::string> uniq(leaf_order.begin(), leaf_order.end());
  if (uniq.size() != leaf_order.size())
    throw Error("empirical_distribution: duplicate language in leaf order");
  std::vector<size_t> rows;
  for (const auto& l : leaf_order) rows.push_back(m.language_index(l));
  return rows;
}

void require_fully_mapped(const CharacterMatrix& m) {
  for (size_t li = 0; li < m.n_languages(); ++li)
    for (Cell c : m.row(li))
      if (c == Cell::Unmapped)
        throw Error(
            "empirical_distribution: matrix has Unmapped cells; apply "
            "fully_mapped() first");
}

size_t outcome_of_column(const CharacterMatrix& m,
                         const std::vector<size_t>& rows, size_t col) {
  size_t o = 0;
  for (size_t r : rows) o = (o << 1) | (m.at(r, col) == Cell::One ? 1u : 0u);
  return o;
}

}  // namespace

LeafDistribution empirical_distribution(const CharacterMatrix& m,
                                        std::span<const std::string> leaf_order) {
  std::vector<size_t> rows = row_indices_for(m, leaf_order);
  require_fully_mapped(m);
  const size_t ncols = m.n_parameters();
  if (ncols == 0) throw Error("empirical_distribution: matrix has no columns");
  if (leaf_order.size() > 20)
    throw Error("empirical_distribution: too many leaves (limit 20)");

  std::vector<long long> counts(size_t{1} << leaf_order.size(), 0);
  for (size_t c = 0; c < ncols; ++c) ++counts[outcome_of_column(m, rows, c)];

  LeafDistribution d;
  d.leaf_order.assign(leaf_order.begin(), leaf_order.end());
  d.probs.reserve(counts.size());
  for (long long k : counts)
    d.probs.emplace_back(k, static_cast<long long>(ncols));
  return d;
}

LeafDistribution weighted_empirical_distribution(
    const CharacterMatrix& m, std::span<const std::string> leaf_order,
    const std::map<std::string, Rational>& weights) {
  std::vector<size_t> rows = row_indices_for(m, leaf_order);
  require_fully_mapped(m);
  if (m.n_parameters() == 0)
    throw Error("empirical_distribution: matrix has no columns");
  if (leaf_order.size() > 20)
    throw Error("empirical_distribution: too many leaves (limit 20)");

  std::vector<Rational> mass(size_t{1} << leaf_order.size());
  Rational total;
  for (size_t c = 0; c < m.n_parameters(); ++c) {
    auto it = weights.find(m.parameters()[c]);
    if (it == weights.end())
      throw Error("weighted_empirical_distribution: missing weight for '" +
                  m.parameters()[c] + "'");
    if (it->second.sign() < 0)
      throw Error("weighted_empirical_distribution: negative weight for '" +
                  m.parameters()[c] + "'");
    mass[outcome_of_column(m, rows, c)] += it->second;
    total += it->second;
  }
  if (total.is_zero())
    throw Error("weighted_empirical_distribution: all weights are zero");

  LeafDistribution d;
  d.leaf_order.assign(leaf_order.begin(), leaf_order.end());
  d.probs.reserve(mass.size());
  for (Rational& v : mass) d.probs.push_back(v / total);
  return d;
}

FlatteningMatrix flatten(const LeafDistribution& P, const Split& s,
                         RowSide row_side) {
  const int n = P.n_leaves();
  // the split must partition P's leaves
  std::vector<std::string> sorted_leaves = P.leaf_order;
  std::sort(sorted_leaves.begin(), sorted_leaves.end());
  std::vector<std::string> merged(s.first().begin(), s.first().end());
  merged.insert(merged.end(), s.second().begin(), s.second().end());
  std::sort(merged.begin(), merged.end());
  if (merged != sorted_leaves)
    throw Error("flatten: split does not partition the distribution's leaves");

  const std::vector<std::string>* rows_set = &s.first();
  const std::vector<std::string>* cols_set = &s.second();
  bool first_is_rows = true;
  switch (row_side) {
    case RowSide::First:
      break;
    case RowSide::Second:
      first_is_rows = false;
      break;
    case RowSide::ContainingFirstLeaf:
      first_is_rows = std::find(s.first().begin(), s.first().end(),
                                P.leaf_order[0]) != s.first().end();
      break;
  }
  if (!first_is_rows) std::swap(rows_set, cols_set);

  FlatteningMatrix f{s, {}, {}, {}};
  // side orderings follow P's leaf order
  std::vector<int> row_pos, col_pos;  // bit positions within P's outcome index
  for (int k = 0; k < n; ++k) {
    const std::string& name = P.leaf_order[static_cast<size_t>(k)];
    if (std::find(rows_set->begin(), rows_set->end(), name) != rows_set->end()) {
      f.row_leaves.push_back(name);
      row_pos.push_back(n - 1 - k);
    } else {
      f.col_leaves.push_back(name);
      col_pos.push_back(n - 1 - k);
    }
  }

  const auto nrows = static_cast<Eigen::Index>(size_t{1} << f.row_leaves.size());
  const auto ncols = static_cast<Eigen::Index>(size_t{1} << f.col_leaves.size());
  f.m = RationalMatrix(nrows, ncols);
  const int r = static_cast<int>(f.row_leaves.size());
  const int c = static_cast<int>(f.col_leaves.size());
  for (size_t o = 0; o < P.probs.size(); ++o) {
    size_t row = 0, col = 0;
    for (int k = 0; k < r; ++k)
      row |= ((o >> row_pos[static_cast<size_t>(k)]) & 1u) << (r - 1 - k);
    for (int k = 0; k < c; ++k)
      col |= ((o >> col_pos[static_cast<size_t>(k)]) & 1u) << (c - 1 - k);
    f.m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
        P.probs[o];
  }
  return f;
}

void for_each_minor3(const RationalMatrix& m,
                     const std::function<bool(const Minor3&)>& visit) {
  const Eigen::Index R = m.rows(), C = m.cols();
  if (R < 3 || C < 3) return;
  for (Eigen::Index r0 = 0; r0 < R - 2; ++r0)
    for (Eigen::Index r1 = r0 + 1; r1 < R - 1; ++r1)
      for (Eigen::Index r2 = r1 + 1; r2 < R; ++r2)
        for (Eigen::Index c0 = 0; c0 < C - 2; ++c0)
          for (Eigen::Index c1 = c0 + 1; c1 < C - 1; ++c1)
            for (Eigen::Index c2 = c1 + 1; c2 < C; ++c2) {
              Minor3 mi{{r0, r1, r2}, {c0, c1, c2},
                        det3(m, r0, r1, r2, c0, c1, c2)};
              if (!visit(mi)) return;
            }
}

std::vector<Minor3> minors3(const RationalMatrix& m) {
  std::vector<Minor3> out;
  for_each_minor3(m, [&out](const Minor3& mi) {
    out.push_back(mi);
    return true;
  });
  return out;
}

namespace {

void check_scan_inputs(const LeafDistribution& P, const PhyloTree& t) {
  std::vector<std::string> pl = P.leaf_order, tl = t.leaf_labels();
  std::sort(pl.begin(), pl.end());
  std::sort(tl.begin(), tl.end());
  if (pl != tl)
    throw Error("invariants: tree leaves do not match the distribution");
  if (P.n_leaves() < 4)
    throw Error(
        "invariants: need at least 4 leaves; smaller trees have no internal "
        "split, so every topology is invariant-indistinguishable");
}

InvariantReport scan(const LeafDistribution& P, const PhyloTree& t,
                     const std::optional<Rational>& epsilon, bool quick) {
  check_scan_inputs(P, t);
  InvariantReport rep;
  rep.tree_newick = emit_newick(t);
  rep.epsilon = epsilon;

  bool stopped = false;
  for (const Split& s : internal_splits(t)) {
    if (stopped) break;
    FlatteningMatrix f = flatten(P, s);
    SplitScore score{s, Rational(0), {}};
    bool first = true;
    for_each_minor3(f.m, [&](const Minor3& mi) {
      Rational a = mi.value.abs();
      if (first || a > score.max_abs) {
        score.max_abs = a;
        score.witness = mi;
        first = false;
      }
      if (quick && epsilon && !(a < *epsilon)) {
        stopped = true;  // one violating minor settles rejection
        return false;
      }
      return true;
    });
    rep.per_split.push_back(std::move(score));
  }

  for (size_t i = 0; i < rep.per_split.size(); ++i) {
    if (rep.global_split < 0 || rep.per_split[i].max_abs > rep.global_max) {
      rep.global_max = rep.per_split[i].max_abs;
      rep.global_split = static_cast<int>(i);
    }
  }
  if (epsilon) rep.accepted = rep.global_max < *epsilon;
  return rep;
}

}  // namespace

InvariantReport max_abs_minor(const LeafDistribution& P, const PhyloTree& t) {
  return scan(P, t, std::nullopt, false);
}

InvariantReport epsilon_test(const LeafDistribution& P, const PhyloTree& t,
                             const Rational& epsilon, bool quick) {
  if (!(epsilon > Rational(0)))
    throw Error("epsilon_test: epsilon must be positive");
  return scan(P, t, epsilon, quick);
}

std::vector<ScanEntry> rank_topology_scan(const LeafDistribution& P) {
  if (P.n_leaves() < 4 || P.n_leaves() > 8)
    throw Error("rank_topology_scan: supported for 4 to 8 leaves");
  std::vector<ScanEntry> out;
  for (PhyloTree& t : enumerate_topologies(P.leaf_order)) {
    Rational score = max_abs_minor(P, t).global_max;
    out.push_back({std::move(t), std::move(score)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScanEntry& a, const ScanEntry& b) {
                     if (a.max_abs != b.max_abs) return a.max_abs < b.max_abs;
                     return emit_newick(a.tree) < emit_newick(b.tree);
                   });
  return out;
}

std::string InvariantReport::to_text(bool decimal) const {
  auto value = [decimal](const Rational& r) {
    std::string s = r.to_string();
    if (decimal) s += " (" + r.to_decimal(7) + ")";
    return s;
  };
  std::string out = "tree: " + tree_newick + "\n";
  for (const SplitScore& s : per_split) {
    out += "split: " + s.split.to_string() + "\n";
    out += "  max |3x3 minor|: " + value(s.max_abs) + "\n";
    out += "  witness: rows " + std::to_string(s.witness.rows[0]) + "," +
           std::to_string(s.witness.rows[1]) + "," +
           std::to_string(s.witness.rows[2]) + " cols " +
           std::to_string(s.witness.cols[0]) + "," +
           std::to_string(s.witness.cols[1]) + "," +
           std::to_string(s.witness.cols[2]) + "\n";
  }
  out += "global max |3x3 minor|: " + value(global_max) + "\n";
  if (epsilon) {
    out += "epsilon: " + value(*epsilon) + "\n";
    out += std::string("result: ") + (accepted ? "accepted" : "rejected") + "\n";
  }
  return out;
}

}  // namespace synphy
