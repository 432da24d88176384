#include <doctest.h>

#include <random>

#include "synphy/error.hpp"
#include "synphy/reconstruct.hpp"
#include "testutil.hpp"

using namespace synphy;

namespace {

DistanceMatrix square(std::vector<std::string> labels,
                      std::vector<std::vector<long long>> num, long long den) {
  DistanceMatrix d;
  d.labels = std::move(labels);
  const auto n = static_cast<Eigen::Index>(d.labels.size());
  d.entries = RationalMatrix::Constant(n, n, Rational(0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d.entries(i, j) = Rational(num[static_cast<size_t>(i)][static_cast<size_t>(j)], den);
  return d;
}

Rational pendant_length(const PhyloTree& t, const std::string& leaf) {
  int v = t.leaf_by_label(leaf);
  REQUIRE(v >= 0);
  int e = t.incident_edges(v)[0];
  REQUIRE(t.edge(e).length.has_value());
  return *t.edge(e).length;
}

}  // namespace

TEST_CASE("neighbor joining recovers the generating quartet") {
  // tree ((A:1,B:2):1,(C:3,D:4)) -> additive path metric
  DistanceMatrix d = square({"A", "B", "C", "D"},
                            {{0, 3, 5, 6}, {3, 0, 6, 7}, {5, 6, 0, 7}, {6, 7, 7, 0}},
                            1);
  PhyloTree t = neighbor_joining(d);
  t.validate();
  CHECK(t.is_binary());
  auto is = internal_splits(t);
  REQUIRE(is.size() == 1);
  CHECK(is[0] == Split({"A", "B"}, {"C", "D"}));
  CHECK(pendant_length(t, "A") == Rational(1));
  CHECK(pendant_length(t, "B") == Rational(2));
  CHECK(pendant_length(t, "C") == Rational(3));
  CHECK(pendant_length(t, "D") == Rational(4));
  // full path metric equals the input exactly
  CHECK(path_distance_matrix(t).entries == d.entries);
}

TEST_CASE("neighbor joining on three taxa uses the closed form") {
  DistanceMatrix d =
      square({"A", "B", "C"}, {{0, 3, 4}, {3, 0, 5}, {4, 5, 0}}, 1);
  PhyloTree t = neighbor_joining(d);
  CHECK(t.n_leaves() == 3);
  CHECK(pendant_length(t, "A") == Rational(1));
  CHECK(pendant_length(t, "B") == Rational(2));
  CHECK(pendant_length(t, "C") == Rational(3));
}

TEST_CASE("neighbor joining on an equidistant matrix") {
  DistanceMatrix d = square(
      {"A", "B", "C", "D"},
      {{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}}, 1);
  PhyloTree t = neighbor_joining(d);
  // some resolution appears, with a zero-length internal edge
  bool found_internal = false;
  for (int e = 0; e < t.n_edges(); ++e) {
    if (t.is_leaf(t.edge(e).u) || t.is_leaf(t.edge(e).v)) continue;
    found_internal = true;
    CHECK(*t.edge(e).length == Rational(0));
  }
  CHECK(found_internal);
}

TEST_CASE("neighbor joining input validation") {
  DistanceMatrix two = square({"A", "B"}, {{0, 1}, {1, 0}}, 1);
  CHECK_THROWS_AS(neighbor_joining(two), Error);

  DistanceMatrix neg =
      square({"A", "B", "C"}, {{0, -1, 1}, {-1, 0, 1}, {1, 1, 0}}, 1);
  CHECK_THROWS_AS(neighbor_joining(neg), Error);

  DistanceMatrix asym =
      square({"A", "B", "C"}, {{0, 1, 1}, {2, 0, 1}, {1, 1, 0}}, 1);
  CHECK_THROWS_AS(neighbor_joining(asym), Error);
}

TEST_CASE("neighbor joining is consistent on random additive matrices") {
  std::mt19937_64 rng(53);
  for (int iter = 0; iter < 60; ++iter) {
    int n = 4 + static_cast<int>(rng() % 7);
    PhyloTree src = testutil::random_unrooted_tree(rng, testutil::letters(n));
    testutil::assign_random_lengths(rng, src);
    DistanceMatrix d = path_distance_matrix(src);
    PhyloTree out = neighbor_joining(d);
    CHECK(rf_distance(src, out) == 0);
    CHECK(path_distance_matrix(out).entries == d.entries);
  }
}

TEST_CASE("neighbor joining commutes with taxon permutation") {
  std::mt19937_64 rng(59);
  for (int iter = 0; iter < 15; ++iter) {
    int n = 5 + static_cast<int>(rng() % 4);
    PhyloTree src = testutil::random_unrooted_tree(rng, testutil::letters(n));
    testutil::assign_random_lengths(rng, src);
    DistanceMatrix d = path_distance_matrix(src);

    std::vector<Eigen::Index> perm(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    DistanceMatrix p;
    p.entries = RationalMatrix::Constant(n, n, Rational(0));
    for (Eigen::Index i = 0; i < n; ++i) {
      p.labels.push_back(d.labels[static_cast<size_t>(perm[static_cast<size_t>(i)])]);
      for (Eigen::Index j = 0; j < n; ++j)
        p.entries(i, j) =
            d.entries(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
    }
    CHECK(emit_newick(neighbor_joining(p)) == emit_newick(neighbor_joining(d)));
  }
}

TEST_CASE("upgma recovers ultrametric trees exactly") {
  std::mt19937_64 rng(61);
  for (int iter = 0; iter < 40; ++iter) {
    int n = 2 + static_cast<int>(rng() % 8);
    // random rooted topology with ultrametric heights
    PhyloTree t = testutil::random_rooted_tree(rng, testutil::letters(n));
    // heights bottom-up: parent height = max(children) + positive increment
    std::vector<int> order;
    std::vector<int> stack{*t.root()};
    std::vector<int> parent(static_cast<size_t>(t.n_nodes()), -1);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (int e : t.incident_edges(v)) {
        int w = t.neighbor_via(v, e);
        if (w == parent[static_cast<size_t>(v)]) continue;
        parent[static_cast<size_t>(w)] = v;
        stack.push_back(w);
      }
    }
    std::vector<Rational> height(static_cast<size_t>(t.n_nodes()), Rational(0));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int v = *it;
      if (t.is_leaf(v)) continue;
      Rational max_child(0);
      for (int e : t.incident_edges(v)) {
        int w = t.neighbor_via(v, e);
        if (w == parent[static_cast<size_t>(v)]) continue;
        if (height[static_cast<size_t>(w)] > max_child)
          max_child = height[static_cast<size_t>(w)];
      }
      height[static_cast<size_t>(v)] =
          max_child + Rational(1 + static_cast<long long>(rng() % 16), 8);
    }
    for (int e = 0; e < t.n_edges(); ++e) {
      int u = t.edge(e).u, v = t.edge(e).v;
      if (parent[static_cast<size_t>(u)] == v) std::swap(u, v);
      t.edge(e).length =
          height[static_cast<size_t>(u)] - height[static_cast<size_t>(v)];
    }
    DistanceMatrix d = path_distance_matrix(t);
    PhyloTree out = upgma(d);
    CHECK(out.is_rooted_binary());
    if (n >= 2) CHECK(path_distance_matrix(out).entries == d.entries);
    if (n >= 4) CHECK(rf_distance(out, t) == 0);
  }
}

TEST_CASE("upgma on two taxa splits the distance") {
  DistanceMatrix d = square({"A", "B"}, {{0, 2}, {2, 0}}, 5);  // 0.4
  PhyloTree t = upgma(d);
  CHECK(t.is_rooted_binary());
  CHECK(pendant_length(t, "A") == Rational(1, 5));
  CHECK(pendant_length(t, "B") == Rational(1, 5));
}

TEST_CASE("upgma output is ultrametric on arbitrary input") {
  std::mt19937_64 rng(67);
  for (int iter = 0; iter < 30; ++iter) {
    int n = 3 + static_cast<int>(rng() % 6);
    DistanceMatrix d;
    d.entries = RationalMatrix::Constant(n, n, Rational(0));
    for (int i = 0; i < n; ++i) d.labels.push_back("T" + std::to_string(i));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        Rational v(1 + static_cast<long long>(rng() % 64), 16);
        d.entries(i, j) = v;
        d.entries(j, i) = v;
      }
    PhyloTree t = upgma(d);
    DistanceMatrix paths = path_distance_matrix(t);
    // all leaves sit at the same exact distance from the root: check that
    // pairwise path midpoints agree with a single tree height
    int root = *t.root();
    std::vector<Rational> depth(static_cast<size_t>(t.n_nodes()), Rational(0));
    std::vector<int> stack{root};
    std::vector<char> seen(static_cast<size_t>(t.n_nodes()), 0);
    seen[static_cast<size_t>(root)] = 1;
    Rational leaf_depth;
    bool first = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : t.incident_edges(v)) {
        int w = t.neighbor_via(v, e);
        if (seen[static_cast<size_t>(w)]) continue;
        seen[static_cast<size_t>(w)] = 1;
        depth[static_cast<size_t>(w)] =
            depth[static_cast<size_t>(v)] + *t.edge(e).length;
        stack.push_back(w);
      }
    }
    for (int v = 0; v < t.n_nodes(); ++v) {
      if (!t.is_leaf(v)) continue;
      if (first) {
        leaf_depth = depth[static_cast<size_t>(v)];
        first = false;
      } else {
        CHECK(depth[static_cast<size_t>(v)] == leaf_depth);
      }
    }
    (void)paths;
  }
}

TEST_CASE("upgma tie-break merges the lowest index pair") {
  DistanceMatrix d = square(
      {"A", "B", "C", "D"},
      {{0, 2, 4, 4}, {2, 0, 4, 4}, {4, 4, 0, 2}, {4, 4, 2, 0}}, 1);
  PhyloTree t = upgma(d);
  // (A,B) at distance 2 merges before (C,D) on the tie; shape is balanced
  CHECK(emit_newick(t) == "((A:1,B:1):1,(C:1,D:1):1);");
}
