#include "synphy/reconstruct.hpp"

#include <algorithm>

#include "synphy/error.hpp"

namespace synphy {

namespace {

void check_input(const DistanceMatrix& d, size_t min_taxa) {
  if (d.labels.size() < min_taxa)
    throw Error("reconstruct: need at least " + std::to_string(min_taxa) +
                " taxa, got " + std::to_string(d.labels.size()));
  d.validate();
}

}  // namespace

PhyloTree neighbor_joining(const DistanceMatrix& d) {
  check_input(d, 3);
  const int n0 = static_cast<int>(d.labels.size());

  PhyloTree t;
  std::vector<int> active;  // tree node ids, in creation order
  for (int i = 0; i < n0; ++i) active.push_back(t.add_node(d.labels[i]));

  // D grows as new cluster nodes are created; indexed by tree node id
  std::vector<std::vector<Rational>> D(static_cast<size_t>(2 * n0),
                                       std::vector<Rational>(static_cast<size_t>(2 * n0)));
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j) D[i][j] = d.entries(i, j);

  while (active.size() > 3) {
    const int r = static_cast<int>(active.size());
    std::vector<Rational> rowsum(active.size());
    for (size_t i = 0; i < active.size(); ++i) {
      Rational s;
      for (size_t k = 0; k < active.size(); ++k) s += D[active[i]][active[k]];
      rowsum[i] = std::move(s);
    }
    // minimize Q(i,j) = (r-2) d(i,j) - S_i - S_j; first minimum in
    // lexicographic (i,j) order wins
    size_t bi = 0, bj = 1;
    Rational bestq;
    bool have = false;
    for (size_t i = 0; i < active.size(); ++i) {
      for (size_t j = i + 1; j < active.size(); ++j) {
        Rational q = Rational(r - 2) * D[active[i]][active[j]] - rowsum[i] -
                     rowsum[j];
        if (!have || q < bestq) {
          bestq = std::move(q);
          bi = i;
          bj = j;
          have = true;
        }
      }
    }
    const int a = active[bi], b = active[bj];
    Rational dij = D[a][b];
    Rational la = dij / Rational(2) +
                  (rowsum[bi] - rowsum[bj]) / Rational(2 * (r - 2));
    Rational lb = dij - la;
    if (la.sign() < 0) {
      lb += la;  // shift the deficit to the sibling
      la = Rational(0);
    } else if (lb.sign() < 0) {
      la += lb;
      lb = Rational(0);
    }
    int u = t.add_node();
    t.add_edge(u, a, la);
    t.add_edge(u, b, lb);
    for (size_t k = 0; k < active.size(); ++k) {
      if (k == bi || k == bj) continue;
      int c = active[k];
      Rational duc = (D[a][c] + D[b][c] - dij) / Rational(2);
      D[u][c] = duc;
      D[c][u] = std::move(duc);
    }
    active[bi] = u;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  // final star over the three remaining clusters
  const int a = active[0], b = active[1], c = active[2];
  int x = t.add_node();
  Rational la = (D[a][b] + D[a][c] - D[b][c]) / Rational(2);
  Rational lb = (D[a][b] + D[b][c] - D[a][c]) / Rational(2);
  Rational lc = (D[a][c] + D[b][c] - D[a][b]) / Rational(2);
  // the three-way split has no sibling to absorb a deficit; clamp only
  if (la.sign() < 0) la = Rational(0);
  if (lb.sign() < 0) lb = Rational(0);
  if (lc.sign() < 0) lc = Rational(0);
  t.add_edge(x, a, std::move(la));
  t.add_edge(x, b, std::move(lb));
  t.add_edge(x, c, std::move(lc));
  return t;
}

PhyloTree upgma(const DistanceMatrix& d) {
  check_input(d, 2);
  const int n0 = static_cast<int>(d.labels.size());

  PhyloTree t;
  struct Cluster {
    int node;
    long long size;
    Rational height;
  };
  std::vector<Cluster> active;
  for (int i = 0; i < n0; ++i)
    active.push_back({t.add_node(d.labels[i]), 1, Rational(0)});

  std::vector<std::vector<Rational>> D(static_cast<size_t>(2 * n0),
                                       std::vector<Rational>(static_cast<size_t>(2 * n0)));
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j) D[i][j] = d.entries(i, j);

  while (active.size() > 1) {
    size_t bi = 0, bj = 1;
    bool have = false;
    Rational best;
    for (size_t i = 0; i < active.size(); ++i) {
      for (size_t j = i + 1; j < active.size(); ++j) {
        const Rational& v = D[active[i].node][active[j].node];
        if (!have || v < best) {
          best = v;
          bi = i;
          bj = j;
          have = true;
        }
      }
    }
    const Cluster a = active[bi], b = active[bj];
    Rational h = best / Rational(2);
    int u = t.add_node();
    t.add_edge(u, a.node, h - a.height);
    t.add_edge(u, b.node, h - b.height);
    for (size_t k = 0; k < active.size(); ++k) {
      if (k == bi || k == bj) continue;
      int c = active[k].node;
      Rational duc = (Rational(a.size) * D[a.node][c] +
                      Rational(b.size) * D[b.node][c]) /
                     Rational(a.size + b.size);
      D[u][c] = duc;
      D[c][u] = std::move(duc);
    }
    active[bi] = {u, a.size + b.size, std::move(h)};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  t.set_root(active[0].node);
  return t;
}

DistanceMatrix path_distance_matrix(const PhyloTree& t) {
  std::vector<int> leaf_nodes = t.leaves();
  std::sort(leaf_nodes.begin(), leaf_nodes.end(), [&t](int a, int b) {
    return t.label(a) < t.label(b);
  });
  const auto n = static_cast<Eigen::Index>(leaf_nodes.size());

  DistanceMatrix d;
  for (int v : leaf_nodes) d.labels.push_back(t.label(v));
  d.entries = RationalMatrix::Constant(n, n, Rational(0));

  for (Eigen::Index i = 0; i < n; ++i) {
    // single-source path lengths by DFS
    std::vector<Rational> dist(static_cast<size_t>(t.n_nodes()));
    std::vector<char> seen(static_cast<size_t>(t.n_nodes()), 0);
    std::vector<int> stack{leaf_nodes[static_cast<size_t>(i)]};
    seen[static_cast<size_t>(leaf_nodes[static_cast<size_t>(i)])] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : t.incident_edges(v)) {
        int w = t.neighbor_via(v, e);
        if (seen[static_cast<size_t>(w)]) continue;
        if (!t.edge(e).length)
          throw Error("path_distance_matrix: edge without length");
        seen[static_cast<size_t>(w)] = 1;
        dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + *t.edge(e).length;
        stack.push_back(w);
      }
    }
    for (Eigen::Index j = 0; j < n; ++j)
      d.entries(i, j) = dist[static_cast<size_t>(leaf_nodes[static_cast<size_t>(j)])];
  }
  return d;
}

}  // namespace synphy
