// synphy: reconstruct trees from binary syntactic characters and test
// candidate topologies with exact-rational flattening invariants.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "synphy/charmatrix.hpp"
#include "synphy/distance.hpp"
#include "synphy/error.hpp"
#include "synphy/invariants.hpp"
#include "synphy/jcmodel.hpp"
#include "synphy/reconstruct.hpp"
#include "synphy/tree.hpp"

namespace {

using namespace synphy;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t c = s.find(',', pos);
    out.push_back(s.substr(pos, c == std::string::npos ? std::string::npos
                                                       : c - pos));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

PhyloTree load_tree(const std::string& arg) {
  // literal Newick if it looks like one, otherwise a path
  if (arg.find('(') != std::string::npos) return parse_newick(arg);
  return parse_newick(read_file(arg));
}

std::map<std::string, Rational> load_weights(const std::string& path) {
  std::map<std::string, Rational> w;
  std::istringstream is(read_file(path));
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t bar = line.find('|');
    if (bar == std::string::npos)
      throw ParseError("weights: line " + std::to_string(line_no) +
                           ": expected 'parameter|weight'",
                       line_no);
    std::string name = line.substr(0, bar);
    w[name] = Rational::from_string(line.substr(bar + 1));
  }
  return w;
}

struct IngestOpts {
  std::string format, in, out, out_format = "csv", langs;
};
struct DistOpts {
  std::string matrix, policy = "shared", out, langs;
  long long min_overlap = 20;
  bool lower = false, exact = false;
};
struct TreeOpts {
  std::string dist, method, out;
  bool decimal = false;
};
struct InvOpts {
  std::string matrix, langs, tree, weights, out = "-";
  std::string epsilon = "1/100";
  bool scan = false, decimal = false, quick = false;
};
struct SimOpts {
  std::string tree, params, out;
  long long sites = 0;
  std::uint64_t seed = 0;
  bool json = false;
};
struct ExpOpts {
  std::string tree, params, out, method = "pruning";
};

int run_ingest(const IngestOpts& o) {
  std::string text = read_file(o.in);
  CharacterMatrix m = o.format == "json" ? CharacterMatrix::parse_json(text)
                                         : CharacterMatrix::parse_csv(text);
  if (!o.langs.empty()) m = m.restricted(split_commas(o.langs));
  write_file(o.out, o.out_format == "json" ? m.to_json() : m.to_csv());
  return 0;
}

MissingPolicy policy_from(const std::string& s) {
  if (s == "shared") return MissingPolicy::SharedOnly;
  if (s == "pad-mismatch") return MissingPolicy::PadAsMismatch;
  if (s == "pad-match") return MissingPolicy::PadAsMatch;
  throw Error("unknown policy '" + s + "' (shared|pad-mismatch|pad-match)");
}

int run_dist(const DistOpts& o) {
  CharacterMatrix m = CharacterMatrix::parse_auto(read_file(o.matrix));
  if (!o.langs.empty()) m = m.restricted(split_commas(o.langs));
  DistanceMatrix d = distance_matrix(m, policy_from(o.policy), o.min_overlap);
  write_file(o.out, format_distance_matrix(d, o.lower, o.exact));
  return 0;
}

int run_tree(const TreeOpts& o) {
  DistanceMatrix d = parse_distance_matrix(read_file(o.dist));
  PhyloTree t;
  if (o.method == "nj") {
    t = neighbor_joining(d);
  } else if (o.method == "upgma") {
    t = upgma(d);
  } else {
    throw Error("unknown method '" + o.method + "' (nj|upgma)");
  }
  write_file(o.out, emit_newick(t, o.decimal) + "\n");
  return 0;
}

int run_invariants(const InvOpts& o) {
  CharacterMatrix m = CharacterMatrix::parse_auto(read_file(o.matrix));
  std::vector<std::string> langs = split_commas(o.langs);
  CharacterMatrix sub = m.restricted(langs).fully_mapped();

  LeafDistribution P =
      o.weights.empty()
          ? empirical_distribution(sub, langs)
          : weighted_empirical_distribution(sub, langs, load_weights(o.weights));

  if (o.scan) {
    std::ostringstream os;
    int rank = 0;
    for (const ScanEntry& e : rank_topology_scan(P)) {
      os << ++rank << ". " << e.max_abs.to_string();
      if (o.decimal) os << " (" << e.max_abs.to_decimal(7) << ")";
      os << " " << emit_newick(e.tree) << "\n";
    }
    write_file(o.out, os.str());
    return 0;
  }

  PhyloTree t = load_tree(o.tree);
  Rational eps = Rational::from_string(o.epsilon);
  InvariantReport rep = epsilon_test(P, t, eps, o.quick);
  write_file(o.out, rep.to_text(o.decimal));
  return rep.accepted ? 0 : 1;
}

int run_simulate(const SimOpts& o) {
  PhyloTree t = load_tree(o.tree);
  JCParams p = parse_params(t, read_file(o.params));
  CharacterMatrix m = sample(t, p, o.sites, o.seed);
  write_file(o.out, o.json ? m.to_json() : m.to_csv());
  return 0;
}

int run_expected(const ExpOpts& o) {
  PhyloTree t = load_tree(o.tree);
  JCParams p = parse_params(t, read_file(o.params));
  LeafDistribution d = o.method == "histories"
                           ? expected_distribution_histories(t, p)
                           : expected_distribution_pruning(t, p);
  write_file(o.out, d.serialize());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syntactic phylogenetics: distances, trees, and "
               "flattening-minor invariants"};
  app.require_subcommand(1);

  IngestOpts ingest;
  auto* cmd_ingest = app.add_subcommand(
      "ingest", "parse character data and write the canonical form");
  cmd_ingest->add_option("--format", ingest.format, "input format")
      ->required()
      ->check(CLI::IsMember({"csv", "json"}));
  cmd_ingest->add_option("--in", ingest.in, "input file")->required();
  cmd_ingest->add_option("--out", ingest.out, "output file")->required();
  cmd_ingest->add_option("--out-format", ingest.out_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd_ingest->add_option("--langs", ingest.langs,
                         "keep only these languages, in this order");

  DistOpts dist;
  auto* cmd_dist =
      app.add_subcommand("dist", "Hamming distance matrix from characters");
  cmd_dist->add_option("--matrix", dist.matrix, "character matrix file")
      ->required();
  cmd_dist->add_option("--policy", dist.policy,
                       "missing-data policy (shared|pad-mismatch|pad-match)");
  cmd_dist->add_option("--min-overlap", dist.min_overlap,
                       "minimum shared columns per pair (shared policy)");
  cmd_dist->add_option("--out", dist.out, "output file")->required();
  cmd_dist->add_flag("--lower", dist.lower, "write the lower triangle only");
  cmd_dist->add_flag("--exact", dist.exact, "write entries as exact rationals");
  cmd_dist->add_option("--langs", dist.langs,
                       "keep only these languages, in this order");

  TreeOpts tre;
  auto* cmd_tree =
      app.add_subcommand("tree", "reconstruct a tree from a distance matrix");
  cmd_tree->add_option("--dist", tre.dist, "distance matrix file")->required();
  cmd_tree->add_option("--method", tre.method, "nj or upgma")->required();
  cmd_tree->add_option("--out", tre.out, "output Newick file")->required();
  cmd_tree->add_flag("--decimal", tre.decimal, "decimal branch lengths");

  InvOpts inv;
  auto* cmd_inv = app.add_subcommand(
      "invariants", "test a candidate tree with 3x3 flattening minors");
  cmd_inv->add_option("--matrix", inv.matrix, "character matrix file")
      ->required();
  cmd_inv->add_option("--langs", inv.langs,
                      "comma-separated languages, in leaf order")
      ->required();
  cmd_inv->add_option("--tree", inv.tree, "Newick string or file");
  cmd_inv->add_option("--epsilon", inv.epsilon,
                      "acceptance threshold (rational or decimal)");
  cmd_inv->add_flag("--scan", inv.scan, "rank all topologies instead");
  cmd_inv->add_option("--weights", inv.weights,
                      "per-parameter weights file (parameter|weight lines)");
  cmd_inv->add_flag("--decimal", inv.decimal, "append 7-digit decimals");
  cmd_inv->add_flag("--quick", inv.quick,
                    "stop at the first minor exceeding epsilon");
  cmd_inv->add_option("--out", inv.out, "report file (default stdout)");

  SimOpts sim;
  auto* cmd_sim = app.add_subcommand(
      "simulate", "sample i.i.d. characters from the Markov model");
  cmd_sim->add_option("--tree", sim.tree, "rooted Newick string or file")
      ->required();
  cmd_sim->add_option("--params", sim.params, "parameter file")->required();
  cmd_sim->add_option("--sites", sim.sites, "number of characters")->required();
  cmd_sim->add_option("--seed", sim.seed, "random seed");
  cmd_sim->add_option("--out", sim.out, "output matrix file")->required();
  cmd_sim->add_flag("--json", sim.json, "write JSON instead of CSV");

  ExpOpts exp;
  auto* cmd_exp = app.add_subcommand(
      "expected", "exact model distribution at the leaves");
  cmd_exp->add_option("--tree", exp.tree, "rooted Newick string or file")
      ->required();
  cmd_exp->add_option("--params", exp.params, "parameter file")->required();
  cmd_exp->add_option("--out", exp.out, "output distribution file")->required();
  cmd_exp->add_option("--method", exp.method, "pruning (default) or histories")
      ->check(CLI::IsMember({"pruning", "histories"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_ingest->parsed()) return run_ingest(ingest);
    if (cmd_dist->parsed()) return run_dist(dist);
    if (cmd_tree->parsed()) return run_tree(tre);
    if (cmd_inv->parsed()) {
      if (!inv.scan && inv.tree.empty())
        throw Error("invariants: --tree is required unless --scan is given");
      return run_invariants(inv);
    }
    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_exp->parsed()) return run_expected(exp);
  } catch (const std::exception& e) {
    std::cerr << "synphy: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
