#include "synphy/tree.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "synphy/error.hpp"

namespace synphy {

// ---------------------------------------------------------------------------
// Split

Split::Split(std::vector<std::string> side_a, std::vector<std::string> side_b)
    : a_(std::move(side_a)), b_(std::move(side_b)) {
  if (a_.empty() || b_.empty()) throw Error("Split: both sides must be nonempty");
  std::sort(a_.begin(), a_.end());
  std::sort(b_.begin(), b_.end());
  if (b_[0] < a_[0]) std::swap(a_, b_);
}

std::string Split::to_string() const {
  std::string s;
  for (size_t i = 0; i < a_.size(); ++i) {
    if (i) s += ',';
    s += a_[i];
  }
  s += " | ";
  for (size_t i = 0; i < b_.size(); ++i) {
    if (i) s += ',';
    s += b_[i];
  }
  return s;
}

// ---------------------------------------------------------------------------
// PhyloTree

int PhyloTree::add_node(std::string label) {
  labels_.push_back(std::move(label));
  adjacency_.emplace_back();
  return n_nodes() - 1;
}

int PhyloTree::add_edge(int u, int v, std::optional<Rational> length) {
  edges_.push_back({u, v, std::move(length)});
  int e = n_edges() - 1;
  adjacency_[u].push_back(e);
  adjacency_[v].push_back(e);
  return e;
}

int PhyloTree::subdivide_edge(int e) {
  int mid = add_node();
  int v = edges_[e].v;
  edges_[e].v = mid;
  auto& av = adjacency_[v];
  av.erase(std::find(av.begin(), av.end(), e));
  adjacency_[mid].push_back(e);
  add_edge(mid, v);
  return mid;
}

std::span<const int> PhyloTree::incident_edges(int v) const {
  return adjacency_[v];
}

int PhyloTree::neighbor_via(int v, int e) const {
  const Edge& ed = edges_[e];
  return ed.u == v ? ed.v : ed.u;
}

std::vector<int> PhyloTree::leaves() const {
  std::vector<int> out;
  for (int v = 0; v < n_nodes(); ++v)
    if (is_leaf(v)) out.push_back(v);
  return out;
}

std::vector<std::string> PhyloTree::leaf_labels() const {
  std::vector<std::string> out;
  for (int v : leaves()) out.push_back(labels_[v]);
  return out;
}

int PhyloTree::n_leaves() const { return static_cast<int>(leaves().size()); }

int PhyloTree::leaf_by_label(const std::string& label) const {
  for (int v = 0; v < n_nodes(); ++v)
    if (is_leaf(v) && labels_[v] == label) return v;
  return -1;
}

void PhyloTree::validate() const {
  if (n_nodes() == 0) throw Error("tree: empty");
  if (n_edges() != n_nodes() - 1)
    throw Error("tree: not a tree (wrong edge count)");
  std::vector<char> seen(n_nodes(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : adjacency_[v]) {
      int w = neighbor_via(v, e);
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != n_nodes())
    throw Error("tree: not connected");
  std::set<std::string> labels;
  for (int v = 0; v < n_nodes(); ++v) {
    if (!is_leaf(v)) continue;
    if (labels_[v].empty()) throw Error("tree: unlabeled leaf");
    if (!labels.insert(labels_[v]).second)
      throw Error("tree: duplicate leaf label '" + labels_[v] + "'");
  }
  for (const Edge& e : edges_)
    if (e.length && e.length->sign() < 0)
      throw Error("tree: negative branch length");
}

bool PhyloTree::is_binary() const {
  for (int v = 0; v < n_nodes(); ++v) {
    int d = degree(v);
    if (d == 1) continue;
    if (d == 2 && root_ && *root_ == v) continue;
    if (d != 3) return false;
  }
  return true;
}

bool PhyloTree::is_rooted_binary() const {
  if (!root_) return false;
  if (degree(*root_) != 2) return false;
  for (int v = 0; v < n_nodes(); ++v) {
    int d = degree(v);
    if (v == *root_ || d == 1) continue;
    if (d != 3) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Newick

namespace {

struct NewickParser {
  std::string_view text;
  size_t pos = 0;
  PhyloTree tree;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("newick: " + msg + " at position " + std::to_string(pos),
                     pos);
  }

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }

  std::string label() {
    skip_ws();
    if (pos < text.size() && text[pos] == '\'') {
      ++pos;
      std::string out;
      while (true) {
        if (pos >= text.size()) fail("unterminated quoted label");
        char c = text[pos++];
        if (c == '\'') {
          if (pos < text.size() && text[pos] == '\'') {  // doubled quote
            out += '\'';
            ++pos;
            continue;
          }
          return out;
        }
        out += c;
      }
    }
    static constexpr std::string_view kStop = "()[]':;,";
    std::string out;
    while (pos < text.size()) {
      char c = text[pos];
      if (kStop.find(c) != std::string_view::npos ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      out += c;
      ++pos;
    }
    return out;
  }

  std::optional<Rational> maybe_length() {
    skip_ws();
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '.' || text[pos] == '/' || text[pos] == '-' ||
            text[pos] == '+'))
      ++pos;
    if (start == pos) fail("missing branch length after ':'");
    try {
      return Rational::from_string(text.substr(start, pos - start));
    } catch (const Error& e) {
      fail(std::string("bad branch length: ") + e.what());
    }
  }

  int subtree() {
    if (peek() == '(') {
      ++pos;
      int node = tree.add_node();
      std::vector<std::pair<int, std::optional<Rational>>> children;
      while (true) {
        int child = subtree();
        auto len = maybe_length();
        children.emplace_back(child, std::move(len));
        char c = peek();
        if (c == ',') {
          ++pos;
          continue;
        }
        if (c == ')') {
          ++pos;
          break;
        }
        fail("expected ',' or ')'");
      }
      if (children.size() < 2) fail("internal node with a single child");
      for (auto& [child, len] : children)
        tree.add_edge(node, child, std::move(len));
      std::string name = label();  // optional internal label
      if (!name.empty()) tree.relabel(node, name);
      return node;
    }
    std::string name = label();
    if (name.empty()) fail("empty leaf label");
    return tree.add_node(name);
  }

  PhyloTree run() {
    int top = subtree();
    if (tree.n_nodes() == 1) fail("tree must have at least two nodes");
    (void)maybe_length();  // a root length carries no information
    skip_ws();
    if (pos >= text.size() || text[pos] != ';') fail("missing terminating ';'");
    ++pos;
    skip_ws();
    if (pos != text.size()) fail("trailing characters after ';'");
    tree.set_root(top);
    tree.validate();
    return std::move(tree);
  }
};

std::string format_length(const Rational& r, bool decimal) {
  if (decimal) return r.to_decimal(7);
  BigInt d = r.den();
  auto divide_out = [&d](long long f) {
    while ((d % BigInt(f)).is_zero() && !(d == BigInt(1))) d = d / BigInt(f);
  };
  divide_out(2);
  divide_out(5);
  if (d == BigInt(1)) {
    for (int k = 0; k <= 12; ++k) {
      Rational scaled = r * Rational(BigInt::pow10(static_cast<unsigned>(k)), BigInt(1));
      if (scaled.den() == BigInt(1)) return r.to_decimal(k);
    }
  }
  return r.to_string();
}

std::string smallest_leaf(const PhyloTree& t, int v, int from_e) {
  if (t.is_leaf(v)) return t.label(v);
  std::string best;
  for (int e : t.incident_edges(v)) {
    if (e == from_e) continue;
    std::string s = smallest_leaf(t, t.neighbor_via(v, e), e);
    if (best.empty() || s < best) best = s;
  }
  return best;
}

void emit_subtree(const PhyloTree& t, int v, int from_e, bool decimal,
                  std::string& out) {
  if (t.is_leaf(v)) {
    out += t.label(v);
    return;
  }
  std::vector<std::pair<std::string, int>> kids;  // (smallest leaf, edge)
  for (int e : t.incident_edges(v)) {
    if (e == from_e) continue;
    kids.emplace_back(smallest_leaf(t, t.neighbor_via(v, e), e), e);
  }
  std::sort(kids.begin(), kids.end());
  out += '(';
  for (size_t i = 0; i < kids.size(); ++i) {
    if (i) out += ',';
    int e = kids[i].second;
    emit_subtree(t, t.neighbor_via(v, e), e, decimal, out);
    if (t.edge(e).length) {
      out += ':';
      out += format_length(*t.edge(e).length, decimal);
    }
  }
  out += ')';
  if (!t.label(v).empty()) out += t.label(v);
}

void collect_side(const PhyloTree& t, int v, int from_e,
                  std::vector<std::string>& out) {
  if (t.is_leaf(v)) {
    out.push_back(t.label(v));
    return;
  }
  for (int e : t.incident_edges(v)) {
    if (e == from_e) continue;
    collect_side(t, t.neighbor_via(v, e), e, out);
  }
}

}  // namespace

PhyloTree parse_newick(std::string_view text) {
  NewickParser p{text, 0, PhyloTree{}};
  return p.run();
}

std::string emit_newick(const PhyloTree& t, bool decimal) {
  int start;
  if (t.root()) {
    start = *t.root();
  } else {
    int best_leaf = -1;
    for (int v = 0; v < t.n_nodes(); ++v) {
      if (!t.is_leaf(v)) continue;
      if (best_leaf < 0 || t.label(v) < t.label(best_leaf)) best_leaf = v;
    }
    if (best_leaf < 0) throw Error("emit_newick: tree has no leaves");
    start = t.neighbor_via(best_leaf, t.incident_edges(best_leaf)[0]);
  }
  std::string out;
  if (t.is_leaf(start)) {
    // a lone edge: write it as a cherry with the length split in half
    int e = t.incident_edges(start)[0];
    int other = t.neighbor_via(start, e);
    std::string la = t.label(start), lb = t.label(other);
    if (lb < la) std::swap(la, lb);
    std::string len;
    if (t.edge(e).length)
      len = ':' + format_length(*t.edge(e).length / Rational(2), decimal);
    return "(" + la + len + "," + lb + len + ");";
  }
  emit_subtree(t, start, -1, decimal, out);
  out += ';';
  return out;
}

std::vector<Split> splits(const PhyloTree& t) {
  std::vector<std::string> all = t.leaf_labels();
  std::sort(all.begin(), all.end());
  std::set<Split> uniq;
  for (int e = 0; e < t.n_edges(); ++e) {
    std::vector<std::string> side;
    collect_side(t, t.edge(e).v, e, side);
    std::sort(side.begin(), side.end());
    std::vector<std::string> other;
    std::set_difference(all.begin(), all.end(), side.begin(), side.end(),
                        std::back_inserter(other));
    if (side.empty() || other.empty()) continue;
    uniq.emplace(std::move(side), std::move(other));
  }
  return {uniq.begin(), uniq.end()};
}

std::vector<Split> internal_splits(const PhyloTree& t) {
  std::vector<Split> out;
  for (Split& s : splits(t))
    if (s.is_internal()) out.push_back(std::move(s));
  return out;
}

BigInt topology_count(int n_leaves) {
  if (n_leaves < 3) throw Error("topology_count: need n >= 3");
  auto factorial = [](int k) {
    BigInt r(1);
    for (int i = 2; i <= k; ++i) r *= BigInt(i);
    return r;
  };
  BigInt num = factorial(2 * n_leaves - 4);
  BigInt den =
      factorial(n_leaves - 2) * BigInt::pow2(static_cast<unsigned>(n_leaves - 2));
  return num / den;
}

std::vector<PhyloTree> enumerate_topologies(std::span<const std::string> taxa) {
  const int n = static_cast<int>(taxa.size());
  if (n < 3 || n > 8)
    throw Error("enumerate_topologies: supported for 3 <= n <= 8 taxa, got " +
                std::to_string(n));
  std::set<std::string> uniq(taxa.begin(), taxa.end());
  if (static_cast<int>(uniq.size()) != n)
    throw Error("enumerate_topologies: duplicate taxa");

  PhyloTree star;
  int center = star.add_node();
  for (int i = 0; i < 3; ++i) star.add_edge(center, star.add_node(taxa[i]));
  std::vector<PhyloTree> trees{std::move(star)};

  for (int k = 3; k < n; ++k) {
    std::vector<PhyloTree> next;
    next.reserve(trees.size() * static_cast<size_t>(2 * k - 3));
    for (const PhyloTree& t : trees) {
      for (int e = 0; e < t.n_edges(); ++e) {
        PhyloTree t2 = t;
        int mid = t2.subdivide_edge(e);
        t2.add_edge(mid, t2.add_node(taxa[k]));
        next.push_back(std::move(t2));
      }
    }
    trees = std::move(next);
  }
  return trees;
}

namespace {

// drop the marker leaf; its former neighbor becomes a degree-2 root
PhyloTree strip_leaf_as_root(const PhyloTree& t, int s) {
  PhyloTree out;
  std::vector<int> map(t.n_nodes(), -1);
  for (int v = 0; v < t.n_nodes(); ++v)
    if (v != s) map[v] = out.add_node(t.label(v));
  const int se = t.incident_edges(s)[0];
  for (int e = 0; e < t.n_edges(); ++e) {
    if (e == se) continue;
    out.add_edge(map[t.edge(e).u], map[t.edge(e).v], t.edge(e).length);
  }
  out.set_root(map[t.neighbor_via(s, se)]);
  return out;
}

}  // namespace

std::vector<PhyloTree> enumerate_rooted_topologies(
    std::span<const std::string> taxa) {
  const int n = static_cast<int>(taxa.size());
  if (n < 2 || n > 7)
    throw Error("enumerate_rooted_topologies: supported for 2 <= n <= 7 taxa");
  const std::string sentinel = "\x01root";
  std::vector<std::string> ext(taxa.begin(), taxa.end());
  ext.push_back(sentinel);
  std::vector<PhyloTree> rooted;
  for (const PhyloTree& t : enumerate_topologies(ext)) {
    int s = t.leaf_by_label(sentinel);
    rooted.push_back(strip_leaf_as_root(t, s));
  }
  return rooted;
}

long long rf_distance(const PhyloTree& a, const PhyloTree& b) {
  std::vector<std::string> la = a.leaf_labels(), lb = b.leaf_labels();
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) throw Error("rf_distance: leaf sets differ");
  std::vector<Split> sa = internal_splits(a), sb = internal_splits(b);
  std::set<Split> xa(sa.begin(), sa.end()), xb(sb.begin(), sb.end());
  long long d = 0;
  for (const Split& s : xa)
    if (!xb.contains(s)) ++d;
  for (const Split& s : xb)
    if (!xa.contains(s)) ++d;
  return d;
}

PhyloTree unrooted_copy(const PhyloTree& t) {
  if (!t.root() || t.degree(*t.root()) != 2) {
    PhyloTree c = t;
    c.clear_root();
    return c;
  }
  const int r = *t.root();
  PhyloTree out;
  std::vector<int> map(t.n_nodes(), -1);
  for (int v = 0; v < t.n_nodes(); ++v)
    if (v != r) map[v] = out.add_node(t.label(v));
  const auto inc = t.incident_edges(r);
  const int e1 = inc[0], e2 = inc[1];
  for (int e = 0; e < t.n_edges(); ++e) {
    if (e == e1 || e == e2) continue;
    out.add_edge(map[t.edge(e).u], map[t.edge(e).v], t.edge(e).length);
  }
  std::optional<Rational> merged;
  if (t.edge(e1).length && t.edge(e2).length)
    merged = *t.edge(e1).length + *t.edge(e2).length;
  out.add_edge(map[t.neighbor_via(r, e1)], map[t.neighbor_via(r, e2)], merged);
  return out;
}

PhyloTree rooted_on_edge(const PhyloTree& t, int e) {
  if (e < 0 || e >= t.n_edges()) throw Error("rooted_on_edge: bad edge index");
  if (t.root() && t.degree(*t.root()) == 2)
    throw Error("rooted_on_edge: tree already has a degree-2 root");
  PhyloTree out;
  for (int v = 0; v < t.n_nodes(); ++v) out.add_node(t.label(v));
  std::optional<Rational> half;
  if (t.edge(e).length) half = *t.edge(e).length / Rational(2);
  int mid = out.add_node();
  for (int i = 0; i < t.n_edges(); ++i) {
    if (i == e) continue;
    out.add_edge(t.edge(i).u, t.edge(i).v, t.edge(i).length);
  }
  out.add_edge(mid, t.edge(e).u, half);
  out.add_edge(mid, t.edge(e).v, half);
  out.set_root(mid);
  return out;
}

}  // namespace synphy
