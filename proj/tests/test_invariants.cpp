#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "synphy/error.hpp"
#include "synphy/invariants.hpp"
#include "testutil.hpp"

using namespace synphy;

namespace {

const std::vector<std::string> kFive{"French", "Italian", "Latin", "Spanish",
                                     "Portuguese"};

// Appendix frequency table: outcome bits over (French, Italian, Latin,
// Spanish, Portuguese), counts out of 106.
const std::vector<std::pair<std::string, long long>> kLatinTable{
    {"00000", 31}, {"00001", 1}, {"00010", 1}, {"00100", 23},
    {"00101", 3},  {"00111", 2}, {"01000", 1}, {"01011", 1},
    {"01101", 1},  {"01111", 3}, {"10000", 5}, {"10010", 2},
    {"11000", 2},  {"11010", 1}, {"11011", 8}, {"11111", 21}};

LeafDistribution latin_distribution_from_fixture() {
  CharacterMatrix fixture = CharacterMatrix::parse_csv(
      testutil::read_file(testutil::data_path("latin5.csv")));
  return empirical_distribution(fixture.restricted(kFive).fully_mapped(), kFive);
}

size_t outcome_index(const std::string& bits) {
  size_t o = 0;
  for (char c : bits) o = (o << 1) | static_cast<size_t>(c - '0');
  return o;
}

// independent determinant oracle: Laplace expansion along the first row
Rational det_laplace(const RationalMatrix& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  Rational sum;
  for (Eigen::Index j = 0; j < n; ++j) {
    RationalMatrix sub(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        sub(r - 1, cc++) = m(r, c);
      }
    }
    Rational term = m(0, j) * det_laplace(sub);
    if (j % 2) term = -term;
    sum += term;
  }
  return sum;
}

RationalMatrix from_counts(std::vector<std::vector<long long>> rows,
                           long long den) {
  RationalMatrix m(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Rational(rows[i][j], den);
  return m;
}

}  // namespace

TEST_CASE("empirical_distribution basics") {
  CharacterMatrix m = CharacterMatrix::parse_csv("A|P1|0\nB|P1|1\nC|P1|0");
  std::vector<std::string> order{"A", "B", "C"};
  LeafDistribution d = empirical_distribution(m, order);
  CHECK(d.probs[outcome_index("010")] == Rational(1));
  CHECK(d.sum() == Rational(1));

  CharacterMatrix two =
      CharacterMatrix::parse_csv("A|P1|0\nA|P2|1\nB|P1|0\nB|P2|1");
  std::vector<std::string> ab{"A", "B"};
  LeafDistribution d2 = empirical_distribution(two, ab);
  CHECK(d2.probs[outcome_index("00")] == Rational(1, 2));
  CHECK(d2.probs[outcome_index("11")] == Rational(1, 2));
  CHECK(d2.probs[outcome_index("01")] == Rational(0));
}

TEST_CASE("empirical_distribution rejects unmapped cells and empty matrices") {
  CharacterMatrix holes = CharacterMatrix::parse_csv("A|P1|0\nB|P2|1");
  std::vector<std::string> ab{"A", "B"};
  CHECK_THROWS_WITH_AS(empirical_distribution(holes, ab),
                       doctest::Contains("fully_mapped"), Error);
  CharacterMatrix zero(std::vector<std::string>{"A", "B"}, {}, {});
  CHECK_THROWS_AS(empirical_distribution(zero, ab), Error);
  std::vector<std::string> unknown{"A", "Z"};
  CHECK_THROWS_AS(empirical_distribution(holes.fully_mapped(), unknown), Error);
}

TEST_CASE("empirical_distribution reproduces the Latin frequency table") {
  LeafDistribution d = latin_distribution_from_fixture();
  REQUIRE(d.probs.size() == 32);
  Rational total;
  for (const auto& [bits, count] : kLatinTable) {
    CHECK(d.probs[outcome_index(bits)] == Rational(count, 106));
    total += Rational(count, 106);
  }
  CHECK(total == Rational(1));
  CHECK(d.sum() == Rational(1));
  // all other outcomes are exactly zero
  std::map<size_t, bool> nonzero;
  for (const auto& [bits, count] : kLatinTable) nonzero[outcome_index(bits)] = true;
  for (size_t o = 0; o < 32; ++o)
    if (!nonzero.count(o)) CHECK(d.probs[o] == Rational(0));
}

TEST_CASE("weighted empirical distribution") {
  CharacterMatrix m = CharacterMatrix::parse_csv(
      "A|P1|0\nA|P2|1\nA|P3|1\nB|P1|0\nB|P2|1\nB|P3|1");
  std::vector<std::string> ab{"A", "B"};

  std::map<std::string, Rational> equal{{"P1", Rational(2)}, {"P2", Rational(2)},
                                        {"P3", Rational(2)}};
  CHECK(weighted_empirical_distribution(m, ab, equal).probs ==
        empirical_distribution(m, ab).probs);

  std::map<std::string, Rational> drop{{"P1", Rational(1)}, {"P2", Rational(0)},
                                       {"P3", Rational(0)}};
  LeafDistribution d = weighted_empirical_distribution(m, ab, drop);
  CHECK(d.probs[outcome_index("00")] == Rational(1));

  std::map<std::string, Rational> tilt{{"P1", Rational(3)}, {"P2", Rational(1)},
                                       {"P3", Rational(0)}};
  LeafDistribution d2 = weighted_empirical_distribution(m, ab, tilt);
  CHECK(d2.probs[outcome_index("00")] == Rational(3, 4));
  CHECK(d2.probs[outcome_index("11")] == Rational(1, 4));

  std::map<std::string, Rational> missing{{"P1", Rational(1)}};
  CHECK_THROWS_WITH_AS(weighted_empirical_distribution(m, ab, missing),
                       doctest::Contains("P2"), Error);
  std::map<std::string, Rational> zero{{"P1", Rational(0)}, {"P2", Rational(0)},
                                       {"P3", Rational(0)}};
  CHECK_THROWS_AS(weighted_empirical_distribution(m, ab, zero), Error);
  std::map<std::string, Rational> negative{{"P1", Rational(-1)},
                                           {"P2", Rational(1)},
                                           {"P3", Rational(1)}};
  CHECK_THROWS_AS(weighted_empirical_distribution(m, ab, negative), Error);
}

TEST_CASE("flatten reproduces the printed Latin matrices") {
  LeafDistribution P = latin_distribution_from_fixture();

  Split e1({"French", "Italian"}, {"Latin", "Spanish", "Portuguese"});
  FlatteningMatrix f1 = flatten(P, e1);
  CHECK(f1.row_leaves == std::vector<std::string>{"French", "Italian"});
  CHECK(f1.col_leaves ==
        std::vector<std::string>{"Latin", "Spanish", "Portuguese"});
  RationalMatrix expect1 = from_counts({{31, 1, 1, 0, 23, 3, 0, 2},
                                        {1, 0, 0, 1, 0, 1, 0, 3},
                                        {5, 0, 2, 0, 0, 0, 0, 0},
                                        {2, 0, 1, 8, 0, 0, 0, 21}},
                                       106);
  CHECK(f1.m == expect1);

  Split e2({"French", "Italian", "Latin"}, {"Spanish", "Portuguese"});
  FlatteningMatrix f2 = flatten(P, e2);
  CHECK(f2.m.rows() == 8);
  CHECK(f2.m.cols() == 4);
  RationalMatrix expect2 = from_counts({{31, 1, 1, 0},
                                        {23, 3, 0, 2},
                                        {1, 0, 0, 1},
                                        {0, 1, 0, 3},
                                        {5, 0, 2, 0},
                                        {0, 0, 0, 0},
                                        {2, 0, 1, 8},
                                        {0, 0, 0, 21}},
                                       106);
  CHECK(f2.m == expect2);
}

TEST_CASE("flatten is an arrangement bijection") {
  std::mt19937_64 rng(109);
  PhyloTree t = testutil::random_rooted_tree(rng, testutil::letters(5));
  JCParams p = testutil::random_params(rng, t);
  LeafDistribution P = expected_distribution_pruning(t, p);
  for (const Split& s : internal_splits(t)) {
    FlatteningMatrix f = flatten(P, s);
    Rational sum;
    std::vector<std::string> flat_entries, probs;
    for (Eigen::Index i = 0; i < f.m.rows(); ++i)
      for (Eigen::Index j = 0; j < f.m.cols(); ++j) {
        sum += f.m(i, j);
        flat_entries.push_back(f.m(i, j).to_string());
      }
    CHECK(sum == Rational(1));
    for (const Rational& v : P.probs) probs.push_back(v.to_string());
    std::sort(flat_entries.begin(), flat_entries.end());
    std::sort(probs.begin(), probs.end());
    CHECK(flat_entries == probs);
  }
}

TEST_CASE("flatten of a product distribution has rank 1") {
  // P = Q (x) R across {A,B} | {C,D}
  std::vector<Rational> q{Rational(1, 2), Rational(1, 6), Rational(1, 6),
                          Rational(1, 6)};
  std::vector<Rational> r{Rational(1, 10), Rational(2, 10), Rational(3, 10),
                          Rational(4, 10)};
  LeafDistribution P;
  P.leaf_order = {"A", "B", "C", "D"};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) P.probs.push_back(q[i] * r[j]);
  FlatteningMatrix f = flatten(P, Split({"A", "B"}, {"C", "D"}));
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = i + 1; j < 4; ++j)
      for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index l = k + 1; l < 4; ++l)
          CHECK(f.m(i, k) * f.m(j, l) - f.m(i, l) * f.m(j, k) == Rational(0));
}

TEST_CASE("flatten rejects a non-partitioning split") {
  LeafDistribution P;
  P.leaf_order = {"A", "B", "C"};
  P.probs.assign(8, Rational(1, 8));
  CHECK_THROWS_AS(flatten(P, Split({"A", "B"}, {"C", "Z"})), Error);
  CHECK_THROWS_AS(flatten(P, Split({"A"}, {"B"})), Error);
}

TEST_CASE("minors3 enumeration") {
  LeafDistribution P = latin_distribution_from_fixture();
  FlatteningMatrix f = flatten(
      P, Split({"French", "Italian"}, {"Latin", "Spanish", "Portuguese"}));
  std::vector<Minor3> ms = minors3(f.m);
  CHECK(ms.size() == 224);  // C(4,3) * C(8,3)
  CHECK(ms[0].rows == std::array<Eigen::Index, 3>{0, 1, 2});
  CHECK(ms[0].cols == std::array<Eigen::Index, 3>{0, 1, 2});
  CHECK(ms[1].cols == std::array<Eigen::Index, 3>{0, 1, 3});

  RationalMatrix wide(2, 8);
  wide.setConstant(Rational(1));
  CHECK(minors3(wide).empty());
}

TEST_CASE("det3 against the Laplace oracle") {
  std::mt19937_64 rng(113);
  std::uniform_int_distribution<long long> dn(-9, 9);
  for (int iter = 0; iter < 200; ++iter) {
    RationalMatrix m(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        m(i, j) = Rational(dn(rng), 1 + static_cast<long long>(rng() % 7));
    CHECK(det3(m, 0, 1, 2, 0, 1, 2) == det_laplace(m));
  }
}

TEST_CASE("minors of a rank-2 matrix vanish") {
  std::mt19937_64 rng(127);
  std::uniform_int_distribution<long long> dn(-5, 5);
  auto rand_vec = [&](Eigen::Index n) {
    RationalVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Rational(dn(rng), 3);
    return v;
  };
  for (int iter = 0; iter < 10; ++iter) {
    RationalVector a = rand_vec(5), b = rand_vec(5), c = rand_vec(6),
                   d = rand_vec(6);
    RationalMatrix m = a * c.transpose() + b * d.transpose();
    for (const Minor3& mi : minors3(m)) CHECK(mi.value == Rational(0));
  }
}

TEST_CASE("max_abs_minor reproduces the published maximum") {
  LeafDistribution P = latin_distribution_from_fixture();
  PhyloTree t = parse_newick(
      testutil::read_file(testutil::data_path("fig7.nwk")));
  InvariantReport rep = max_abs_minor(P, t);

  CHECK(rep.global_max == Rational(2415, 1191016));
  CHECK(rep.global_max.to_decimal() == "0.0020277");
  REQUIRE(rep.per_split.size() == 2);
  // per-split maxima, splits in canonical order: {French,Italian} first
  CHECK(rep.per_split[0].max_abs == Rational(2415, 1191016));
  CHECK(rep.per_split[1].max_abs == Rational(1470, 1191016));
  CHECK(rep.global_split == 0);
  CHECK(rep.per_split[0].witness.rows == std::array<Eigen::Index, 3>{0, 2, 3});
  CHECK(rep.per_split[0].witness.cols == std::array<Eigen::Index, 3>{0, 4, 7});
}

TEST_CASE("model distributions lie on the variety of their own tree") {
  std::mt19937_64 rng(131);
  for (int iter = 0; iter < 10; ++iter) {
    int n = 4 + static_cast<int>(rng() % 3);
    PhyloTree rooted = testutil::random_rooted_tree(rng, testutil::letters(n));
    JCParams p = testutil::random_params(rng, rooted);
    LeafDistribution P = expected_distribution_pruning(rooted, p);
    InvariantReport rep = max_abs_minor(P, rooted);
    CHECK(rep.global_max == Rational(0));
  }
}

TEST_CASE("the uniform distribution vanishes on every topology") {
  LeafDistribution P;
  P.leaf_order = testutil::letters(5);
  P.probs.assign(32, Rational(1, 32));
  for (const PhyloTree& t : enumerate_topologies(P.leaf_order))
    CHECK(max_abs_minor(P, t).global_max == Rational(0));
}

TEST_CASE("max_abs_minor input validation") {
  LeafDistribution P;
  P.leaf_order = testutil::letters(3);
  P.probs.assign(8, Rational(1, 8));
  PhyloTree t = parse_newick("(A,B,C);");
  CHECK_THROWS_WITH_AS(max_abs_minor(P, t),
                       doctest::Contains("indistinguishable"), Error);

  LeafDistribution P4;
  P4.leaf_order = testutil::letters(4);
  P4.probs.assign(16, Rational(1, 16));
  PhyloTree other = parse_newick("((A,B),(C,E));");
  CHECK_THROWS_AS(max_abs_minor(P4, other), Error);
}

TEST_CASE("max_abs_minor is invariant under consistent relabeling") {
  LeafDistribution P = latin_distribution_from_fixture();
  PhyloTree t = parse_newick("((French,Italian),Latin,(Spanish,Portuguese));");
  Rational base = max_abs_minor(P, t).global_max;

  LeafDistribution renamed = P;
  renamed.leaf_order = {"f", "i", "l", "s", "p"};
  PhyloTree t2 = parse_newick("((f,i),l,(s,p));");
  CHECK(max_abs_minor(renamed, t2).global_max == base);
}

TEST_CASE("transposing a flattening preserves the minor value multiset") {
  LeafDistribution P = latin_distribution_from_fixture();
  Split s({"French", "Italian"}, {"Latin", "Spanish", "Portuguese"});
  FlatteningMatrix a = flatten(P, s, RowSide::First);
  FlatteningMatrix b = flatten(P, s, RowSide::Second);
  CHECK(a.m.rows() == b.m.cols());

  auto abs_values = [](const RationalMatrix& m) {
    std::vector<std::string> v;
    for (const Minor3& mi : minors3(m)) v.push_back(mi.value.abs().to_string());
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(abs_values(a.m) == abs_values(b.m));
}

TEST_CASE("epsilon_test accept and reject") {
  LeafDistribution P = latin_distribution_from_fixture();
  PhyloTree t = parse_newick(
      testutil::read_file(testutil::data_path("fig7.nwk")));

  InvariantReport ok = epsilon_test(P, t, Rational(1, 100));
  CHECK(ok.accepted);
  CHECK(ok.epsilon == Rational(1, 100));

  InvariantReport bad = epsilon_test(P, t, Rational(1, 1000));
  CHECK(!bad.accepted);
  CHECK(bad.global_max == Rational(2415, 1191016));

  // quick mode settles rejection at the first violation
  InvariantReport quick = epsilon_test(P, t, Rational(1, 1000), true);
  CHECK(!quick.accepted);
  CHECK(quick.global_max >= Rational(1, 1000));

  CHECK_THROWS_AS(epsilon_test(P, t, Rational(0)), Error);

  std::mt19937_64 rng(137);
  PhyloTree rooted = testutil::random_rooted_tree(rng, testutil::letters(4));
  JCParams p = testutil::random_params(rng, rooted);
  LeafDistribution model = expected_distribution_pruning(rooted, p);
  CHECK(epsilon_test(model, rooted, Rational(1, 1000000000000LL)).accepted);
}

TEST_CASE("report text") {
  LeafDistribution P = latin_distribution_from_fixture();
  PhyloTree t = parse_newick(
      testutil::read_file(testutil::data_path("fig7.nwk")));
  InvariantReport rep = epsilon_test(P, t, Rational(1, 100));
  std::string text = rep.to_text(true);
  CHECK(text.find("2415/1191016") != std::string::npos);
  CHECK(text.find("0.0020277") != std::string::npos);
  CHECK(text.find("result: accepted") != std::string::npos);
  std::string plain = rep.to_text(false);
  CHECK(plain.find("0.0020277") == std::string::npos);
}

TEST_CASE("rank_topology_scan") {
  SUBCASE("the generating topology ranks first with score zero") {
    std::mt19937_64 rng(139);
    PhyloTree src = testutil::random_unrooted_tree(rng, testutil::letters(5));
    PhyloTree rooted = rooted_on_edge(src, 0);
    JCParams p = testutil::random_params(rng, rooted, 16, true);
    LeafDistribution P = expected_distribution_pruning(rooted, p);
    auto ranking = rank_topology_scan(P);
    REQUIRE(ranking.size() == 15);
    CHECK(ranking[0].max_abs == Rational(0));
    CHECK(rf_distance(ranking[0].tree, src) == 0);
    for (size_t i = 1; i < ranking.size(); ++i)
      CHECK(ranking[i].max_abs > Rational(0));
  }

  SUBCASE("uniform ties everything at zero") {
    LeafDistribution P;
    P.leaf_order = testutil::letters(4);
    P.probs.assign(16, Rational(1, 16));
    auto ranking = rank_topology_scan(P);
    REQUIRE(ranking.size() == 3);
    for (const auto& e : ranking) CHECK(e.max_abs == Rational(0));
  }

  SUBCASE("the Latin scan puts the reference topology at its published score") {
    LeafDistribution P = latin_distribution_from_fixture();
    auto ranking = rank_topology_scan(P);
    REQUIRE(ranking.size() == 15);
    PhyloTree fig = parse_newick(
        testutil::read_file(testutil::data_path("fig7.nwk")));
    bool found = false;
    for (const auto& e : ranking) {
      if (rf_distance(e.tree, fig) == 0) {
        CHECK(e.max_abs == Rational(2415, 1191016));
        found = true;
      }
    }
    CHECK(found);
  }
}
