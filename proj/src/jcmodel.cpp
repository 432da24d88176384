#include "synphy/jcmodel.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "synphy/error.hpp"

namespace synphy {

namespace {

const Rational kZero(0), kOne(1);

void require_rooted_binary(const PhyloTree& t) {
  if (!t.root()) throw Error("jcmodel: tree must be rooted");
  if (!t.is_rooted_binary())
    throw Error("jcmodel: tree must be rooted binary (degree-2 root, "
                "degree-3 internal nodes)");
}

bool in_unit_interval(const Rational& r) {
  return r.sign() >= 0 && r <= kOne;
}

// parent[] and child-edge structure of a rooted tree
struct Orientation {
  std::vector<int> parent_edge;        // node -> edge to parent, -1 at root
  std::vector<std::vector<int>> kids;  // node -> child node ids
  std::vector<int> order;              // preorder
};

Orientation orient(const PhyloTree& t) {
  Orientation o;
  o.parent_edge.assign(static_cast<size_t>(t.n_nodes()), -1);
  o.kids.resize(static_cast<size_t>(t.n_nodes()));
  std::vector<int> stack{*t.root()};
  std::vector<char> seen(static_cast<size_t>(t.n_nodes()), 0);
  seen[static_cast<size_t>(*t.root())] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    o.order.push_back(v);
    for (int e : t.incident_edges(v)) {
      int w = t.neighbor_via(v, e);
      if (seen[static_cast<size_t>(w)]) continue;
      seen[static_cast<size_t>(w)] = 1;
      o.parent_edge[static_cast<size_t>(w)] = e;
      o.kids[static_cast<size_t>(v)].push_back(w);
      stack.push_back(w);
    }
  }
  return o;
}

// channel entry M^e[from][to] with off-diagonal p
const Rational& channel(const Rational& p, const Rational& stay, int from,
                        int to) {
  return from == to ? stay : p;
}

}  // namespace

void JCParams::validate(const PhyloTree& t) const {
  if (!in_unit_interval(pi))
    throw Error("jcmodel: pi must lie in [0,1], got " + pi.to_string());
  if (edge_flip.size() != static_cast<size_t>(t.n_edges()))
    throw Error("jcmodel: expected " + std::to_string(t.n_edges()) +
                " edge parameters, got " + std::to_string(edge_flip.size()));
  for (size_t e = 0; e < edge_flip.size(); ++e)
    if (!in_unit_interval(edge_flip[e]))
      throw Error("jcmodel: edge parameter " + std::to_string(e) +
                  " outside [0,1]: " + edge_flip[e].to_string());
}

Rational LeafDistribution::sum() const {
  Rational s;
  for (const Rational& p : probs) s += p;
  return s;
}

LeafDistribution LeafDistribution::reordered(
    std::span<const std::string> new_order) const {
  if (new_order.size() != leaf_order.size())
    throw Error("LeafDistribution: reorder must be a permutation");
  const int n = n_leaves();
  std::vector<int> src_bit(new_order.size());
  for (size_t k = 0; k < new_order.size(); ++k) {
    auto it = std::find(leaf_order.begin(), leaf_order.end(), new_order[k]);
    if (it == leaf_order.end())
      throw Error("LeafDistribution: unknown leaf '" + std::string(new_order[k]) + "'");
    src_bit[k] = static_cast<int>(it - leaf_order.begin());
  }
  LeafDistribution out;
  out.leaf_order.assign(new_order.begin(), new_order.end());
  out.probs.assign(probs.size(), Rational(0));
  for (size_t o = 0; o < probs.size(); ++o) {
    size_t no = 0;
    for (int k = 0; k < n; ++k) {
      int bit = static_cast<int>(o >> (n - 1 - src_bit[k])) & 1;
      no |= static_cast<size_t>(bit) << (n - 1 - k);
    }
    out.probs[no] = probs[o];
  }
  return out;
}

std::string LeafDistribution::serialize() const {
  std::string out = "leaves ";
  for (size_t i = 0; i < leaf_order.size(); ++i) {
    if (i) out += '|';
    out += leaf_order[i];
  }
  out += '\n';
  const int n = n_leaves();
  for (size_t o = 0; o < probs.size(); ++o) {
    if (probs[o].is_zero()) continue;
    std::string bits(static_cast<size_t>(n), '0');
    for (int k = 0; k < n; ++k)
      if ((o >> (n - 1 - k)) & 1) bits[static_cast<size_t>(k)] = '1';
    out += bits + " " + probs[o].to_string() + "\n";
  }
  return out;
}

LeafDistribution LeafDistribution::parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  LeafDistribution d;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (d.leaf_order.empty()) {
      if (line.rfind("leaves ", 0) != 0)
        throw ParseError("distribution: expected 'leaves ...' header", line_no);
      std::string names = line.substr(7);
      size_t pos = 0;
      while (true) {
        size_t bar = names.find('|', pos);
        std::string name = names.substr(
            pos, bar == std::string::npos ? std::string::npos : bar - pos);
        if (name.empty())
          throw ParseError("distribution: empty leaf name", line_no);
        d.leaf_order.push_back(name);
        if (bar == std::string::npos) break;
        pos = bar + 1;
      }
      if (d.leaf_order.size() > 20)
        throw ParseError("distribution: too many leaves (limit 20)", line_no);
      d.probs.assign(size_t{1} << d.leaf_order.size(), Rational(0));
      continue;
    }
    std::istringstream ls(line);
    std::string bits, value;
    if (!(ls >> bits >> value))
      throw ParseError("distribution: expected 'bitstring value'", line_no);
    if (bits.size() != d.leaf_order.size())
      throw ParseError("distribution: bitstring length mismatch", line_no);
    size_t o = 0;
    for (char c : bits) {
      if (c != '0' && c != '1')
        throw ParseError("distribution: bad bitstring '" + bits + "'", line_no);
      o = (o << 1) | static_cast<size_t>(c - '0');
    }
    Rational p = Rational::from_string(value);
    if (p.sign() < 0)
      throw ParseError("distribution: negative probability", line_no);
    if (!d.probs[o].is_zero())
      throw ParseError("distribution: duplicate outcome " + bits, line_no);
    d.probs[o] = std::move(p);
  }
  if (d.leaf_order.empty()) throw ParseError("distribution: empty input", 0);
  if (!(d.sum() == kOne))
    throw Error("distribution: probabilities sum to " + d.sum().to_string() +
                ", expected 1");
  return d;
}

long long param_count(int n_leaves, int k_states) {
  if (n_leaves < 2) throw Error("param_count: need n >= 2 leaves");
  if (k_states < 2) throw Error("param_count: need k >= 2 states");
  const long long n = n_leaves, k = k_states;
  return (2 * n - 3) * k * (k - 1) + k - 1;
}

namespace {

// One recursion level per node, parents first, branching every node over
// its two states: each completed branch is exactly one history (a full
// state assignment), and `term` is its probability, the root prior times
// one channel factor per edge. Leaf states route the contribution to the
// matching outcome bucket.
struct HistorySum {
  const PhyloTree& t;
  const JCParams& p;
  const Orientation& o;
  const std::vector<Rational>& stay;
  const std::vector<int>& leaf_bit;  // node -> outcome bit shift, -1 inside
  std::vector<int>& state;
  std::vector<Rational>& probs;
  Rational pi1;

  void run(size_t idx, const Rational& term, size_t outcome) {
    if (idx == o.order.size()) {
      probs[outcome] += term;
      return;
    }
    const int v = o.order[idx];
    const int pe = o.parent_edge[static_cast<size_t>(v)];
    for (int s = 0; s < 2; ++s) {
      Rational part = term;
      if (pe < 0) {
        part *= s == 0 ? p.pi : pi1;
      } else {
        const int parent = t.neighbor_via(v, pe);
        part *= channel(p.edge_flip[static_cast<size_t>(pe)],
                        stay[static_cast<size_t>(pe)],
                        state[static_cast<size_t>(parent)], s);
      }
      if (part.is_zero()) continue;  // the whole branch contributes nothing
      state[static_cast<size_t>(v)] = s;
      const int bit = leaf_bit[static_cast<size_t>(v)];
      run(idx + 1, part,
          bit < 0 ? outcome : outcome | (size_t{1} << bit) * static_cast<size_t>(s));
    }
  }
};

}  // namespace

LeafDistribution expected_distribution_histories(const PhyloTree& t,
                                                 const JCParams& p) {
  require_rooted_binary(t);
  p.validate(t);
  const Orientation o = orient(t);

  std::vector<int> leaf_nodes = t.leaves();
  const int n = static_cast<int>(leaf_nodes.size());
  std::vector<int> leaf_bit(static_cast<size_t>(t.n_nodes()), -1);
  for (int k = 0; k < n; ++k)
    leaf_bit[static_cast<size_t>(leaf_nodes[static_cast<size_t>(k)])] =
        n - 1 - k;

  std::vector<Rational> stay(p.edge_flip.size());
  for (size_t e = 0; e < p.edge_flip.size(); ++e) stay[e] = kOne - p.edge_flip[e];

  LeafDistribution out;
  for (int v : leaf_nodes) out.leaf_order.push_back(t.label(v));
  out.probs.assign(size_t{1} << n, Rational(0));

  std::vector<int> state(static_cast<size_t>(t.n_nodes()), 0);
  HistorySum hs{t, p, o, stay, leaf_bit, state, out.probs, kOne - p.pi};
  hs.run(0, kOne, 0);
  return out;
}

LeafDistribution expected_distribution_pruning(const PhyloTree& t,
                                               const JCParams& p) {
  require_rooted_binary(t);
  p.validate(t);
  const Orientation o = orient(t);

  std::vector<Rational> stay(p.edge_flip.size());
  for (size_t e = 0; e < p.edge_flip.size(); ++e) stay[e] = kOne - p.edge_flip[e];

  // per node: leaves below (in subtree order) and the table
  // P(pattern | node state), indexed [pattern][state]
  struct Table {
    std::vector<std::string> leaves_below;
    std::vector<std::array<Rational, 2>> cond;
  };
  std::vector<Table> tab(static_cast<size_t>(t.n_nodes()));

  for (auto it = o.order.rbegin(); it != o.order.rend(); ++it) {
    int v = *it;
    Table& tv = tab[static_cast<size_t>(v)];
    if (t.is_leaf(v)) {
      tv.leaves_below = {t.label(v)};
      tv.cond.resize(2);
      tv.cond[0] = {kOne, kZero};  // pattern "0"
      tv.cond[1] = {kZero, kOne};  // pattern "1"
      continue;
    }
    // fold children left to right
    tv.cond = {{kOne, kOne}};  // empty pattern
    for (int c : o.kids[static_cast<size_t>(v)]) {
      Table& tc = tab[static_cast<size_t>(c)];
      const int e = o.parent_edge[static_cast<size_t>(c)];
      const Rational& flip = p.edge_flip[static_cast<size_t>(e)];
      const Rational& keep = stay[static_cast<size_t>(e)];
      // child message: P(pattern | parent state) through the edge channel
      std::vector<std::array<Rational, 2>> msg(tc.cond.size());
      for (size_t pat = 0; pat < tc.cond.size(); ++pat) {
        msg[pat][0] = keep * tc.cond[pat][0] + flip * tc.cond[pat][1];
        msg[pat][1] = flip * tc.cond[pat][0] + keep * tc.cond[pat][1];
      }
      std::vector<std::array<Rational, 2>> merged(tv.cond.size() * msg.size());
      for (size_t a = 0; a < tv.cond.size(); ++a)
        for (size_t b = 0; b < msg.size(); ++b)
          for (int s = 0; s < 2; ++s)
            merged[a * msg.size() + b][static_cast<size_t>(s)] =
                tv.cond[a][static_cast<size_t>(s)] * msg[b][static_cast<size_t>(s)];
      tv.cond = std::move(merged);
      tv.leaves_below.insert(tv.leaves_below.end(), tc.leaves_below.begin(),
                             tc.leaves_below.end());
      tc.cond.clear();  // free as we go
    }
  }

  const Table& root_tab = tab[static_cast<size_t>(*t.root())];
  LeafDistribution natural;
  natural.leaf_order = root_tab.leaves_below;
  natural.probs.resize(root_tab.cond.size());
  const Rational pi1 = kOne - p.pi;
  for (size_t pat = 0; pat < root_tab.cond.size(); ++pat)
    natural.probs[pat] = p.pi * root_tab.cond[pat][0] + pi1 * root_tab.cond[pat][1];

  // present leaves in node-index order, matching the histories evaluator
  LeafDistribution out = natural.reordered(t.leaf_labels());
  return out;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// uniform u64 keyed by (seed, site, node); counter-based, no state
std::uint64_t site_node_hash(std::uint64_t seed, std::uint64_t site,
                             std::uint64_t node) {
  return mix64(mix64(mix64(seed) ^ site) ^ (node * 0xD6E8FEB86659FD93ull));
}

// P(hash < threshold(p)) == floor(p * 2^64) / 2^64
bool bernoulli(const Rational& p, std::uint64_t h) {
  if (p.is_zero()) return false;
  if (p == kOne) return true;
  BigInt scaled = (p.num() * BigInt::pow2(64)) / p.den();
  std::uint64_t thr = scaled.to_uint64_saturating();
  return h < thr;
}

}  // namespace

CharacterMatrix sample(const PhyloTree& t, const JCParams& p, long long m,
                       std::uint64_t seed) {
  require_rooted_binary(t);
  p.validate(t);
  if (m < 1) throw Error("sample: need at least one site");
  const Orientation o = orient(t);

  std::vector<int> leaf_nodes = t.leaves();
  std::vector<std::string> langs;
  for (int v : leaf_nodes) langs.push_back(t.label(v));
  std::vector<std::string> params;
  params.reserve(static_cast<size_t>(m));
  for (long long s = 0; s < m; ++s) params.push_back("s" + std::to_string(s + 1));

  std::vector<Cell> cells(langs.size() * params.size(), Cell::Unmapped);
  std::vector<int> state(static_cast<size_t>(t.n_nodes()), 0);
  for (long long s = 0; s < m; ++s) {
    const auto site = static_cast<std::uint64_t>(s);
    int root = *t.root();
    state[static_cast<size_t>(root)] =
        bernoulli(p.pi, site_node_hash(seed, site, static_cast<std::uint64_t>(root)))
            ? 0
            : 1;
    for (int v : o.order) {
      for (int c : o.kids[static_cast<size_t>(v)]) {
        const int e = o.parent_edge[static_cast<size_t>(c)];
        bool flip = bernoulli(
            p.edge_flip[static_cast<size_t>(e)],
            site_node_hash(seed, site, static_cast<std::uint64_t>(c)));
        state[static_cast<size_t>(c)] = state[static_cast<size_t>(v)] ^ (flip ? 1 : 0);
      }
    }
    for (size_t k = 0; k < leaf_nodes.size(); ++k) {
      cells[k * params.size() + static_cast<size_t>(s)] =
          state[static_cast<size_t>(leaf_nodes[k])] ? Cell::One : Cell::Zero;
    }
  }
  return CharacterMatrix(std::move(langs), std::move(params), std::move(cells));
}

JCParams parse_params(const PhyloTree& t, std::string_view text) {
  require_rooted_binary(t);
  const Orientation o = orient(t);

  JCParams p;
  p.edge_flip.assign(static_cast<size_t>(t.n_edges()), Rational(-1));
  bool have_pi = false;

  std::istringstream is{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    if (kind == "root") {
      std::string value;
      if (!(ls >> value))
        throw ParseError("params: 'root' needs a value", line_no);
      if (have_pi) throw ParseError("params: duplicate 'root' line", line_no);
      p.pi = Rational::from_string(value);
      have_pi = true;
    } else if (kind == "edge") {
      std::string child, value;
      if (!(ls >> child >> value))
        throw ParseError("params: 'edge' needs a child and a value", line_no);
      int node = -1;
      for (int v = 0; v < t.n_nodes() && node < 0; ++v)
        if (!t.label(v).empty() && t.label(v) == child) node = v;
      if (node < 0 && !child.empty() && child.size() <= 9 &&
          std::all_of(child.begin(), child.end(),
                      [](char c) { return c >= '0' && c <= '9'; })) {
        int idx = std::stoi(child);
        if (idx >= 0 && idx < t.n_nodes()) node = idx;
      }
      if (node < 0)
        throw ParseError("params: unknown node '" + child + "'", line_no);
      int e = o.parent_edge[static_cast<size_t>(node)];
      if (e < 0)
        throw ParseError("params: '" + child + "' is the root, not a child",
                         line_no);
      if (!(p.edge_flip[static_cast<size_t>(e)] == Rational(-1)))
        throw ParseError("params: duplicate edge for '" + child + "'", line_no);
      p.edge_flip[static_cast<size_t>(e)] = Rational::from_string(value);
    } else {
      throw ParseError("params: expected 'root' or 'edge', got '" + kind + "'",
                       line_no);
    }
  }
  if (!have_pi) throw Error("params: missing 'root <pi>' line");
  for (int e = 0; e < t.n_edges(); ++e)
    if (p.edge_flip[static_cast<size_t>(e)] == Rational(-1)) {
      int child = o.parent_edge[static_cast<size_t>(t.edge(e).u)] == e
                      ? t.edge(e).u
                      : t.edge(e).v;
      std::string who = t.label(child).empty() ? std::to_string(child)
                                               : t.label(child);
      throw Error("params: missing edge parameter for child '" + who + "'");
    }
  p.validate(t);
  return p;
}

std::string format_params(const PhyloTree& t, const JCParams& p) {
  require_rooted_binary(t);
  const Orientation o = orient(t);
  std::string out = "root " + p.pi.to_string() + "\n";
  for (int v : o.order) {
    int e = o.parent_edge[static_cast<size_t>(v)];
    if (e < 0) continue;
    std::string who = t.label(v).empty() ? std::to_string(v) : t.label(v);
    out += "edge " + who + " " + p.edge_flip[static_cast<size_t>(e)].to_string() + "\n";
  }
  return out;
}

}  // namespace synphy
