#include <doctest.h>

#include <cstdio>

#include "synphy/charmatrix.hpp"
#include "synphy/distance.hpp"
#include "synphy/jcmodel.hpp"
#include "synphy/tree.hpp"
#include "testutil.hpp"

using namespace synphy;
using testutil::data_path;
using testutil::run_cli;
using testutil::temp_file;

TEST_CASE("ingest round trips the fixture") {
  std::string out = temp_file(".csv");
  auto r = run_cli("ingest --format csv --in " + data_path("latin5.csv") +
                   " --out " + out);
  CHECK(r.exit_code == 0);
  CharacterMatrix m = CharacterMatrix::parse_csv(testutil::read_file(out));
  CHECK(m.n_languages() == 6);
  CHECK(m.n_parameters() == 115);

  // json output of the same content parses back to the same matrix
  std::string out_json = temp_file(".json");
  auto r2 = run_cli("ingest --format csv --in " + data_path("latin5.csv") +
                    " --out " + out_json + " --out-format json");
  CHECK(r2.exit_code == 0);
  CHECK(CharacterMatrix::parse_json(testutil::read_file(out_json)) == m);
  std::remove(out.c_str());
  std::remove(out_json.c_str());
}

TEST_CASE("ingest diagnoses malformed input on stderr with exit 2") {
  std::string bad = temp_file(".csv");
  testutil::write_file(bad, "French|P1\n");
  auto r = run_cli("ingest --format csv --in " + bad + " --out /dev/null");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line 1") != std::string::npos);

  // declared JSON but given CSV
  auto r2 = run_cli("ingest --format json --in " + data_path("latin5.csv") +
                    " --out /dev/null");
  CHECK(r2.exit_code == 2);
  std::remove(bad.c_str());
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("ingest --format xml --in x --out y").exit_code == 2);
  CHECK(run_cli("tree --dist /nonexistent --method nj --out /dev/null").exit_code == 2);
}

TEST_CASE("dist produces the classic five-language matrix") {
  std::string out = temp_file(".dist");
  auto r = run_cli("dist --matrix " + data_path("latin5.csv") +
                   " --langs French,Italian,Latin,Spanish,Portuguese" +
                   " --policy shared --min-overlap 20 --out " + out);
  CHECK(r.exit_code == 0);
  DistanceMatrix d = parse_distance_matrix(testutil::read_file(out));
  CHECK(d.labels.size() == 5);
  CHECK(d.labels[0] == "French");
  // identical rows nowhere here; spot-check symmetry and range
  d.validate();
  std::remove(out.c_str());
}

TEST_CASE("dist rejects a pair below the overlap threshold") {
  // Romanian shares fewer than 60 mapped columns with the others
  auto r = run_cli("dist --matrix " + data_path("latin5.csv") +
                   " --policy shared --min-overlap 100 --out /dev/null");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("Romanian") != std::string::npos);
}

TEST_CASE("tree builds from a distance file end to end") {
  std::string dist = temp_file(".dist");
  std::string nwk = temp_file(".nwk");
  testutil::write_file(dist, "3\nA 0 1/2 1/2\nB 1/2 0 1/4\nC 1/2 1/4 0\n");
  auto r = run_cli("tree --dist " + dist + " --method nj --out " + nwk);
  CHECK(r.exit_code == 0);
  PhyloTree t = parse_newick(testutil::read_file(nwk));
  CHECK(t.n_leaves() == 3);

  auto r2 = run_cli("tree --dist " + dist + " --method upgma --out " + nwk);
  CHECK(r2.exit_code == 0);
  PhyloTree u = parse_newick(testutil::read_file(nwk));
  CHECK(u.is_rooted_binary());

  CHECK(run_cli("tree --dist " + dist + " --method banana --out " + nwk)
            .exit_code == 2);
  std::remove(dist.c_str());
  std::remove(nwk.c_str());
}

TEST_CASE("invariants accepts the Latin fixture at epsilon 0.01") {
  auto r = run_cli("invariants --matrix " + data_path("latin5.csv") +
                   " --langs French,Italian,Latin,Spanish,Portuguese"
                   " --tree \"((French,Italian),Latin,(Spanish,Portuguese));\""
                   " --epsilon 0.01 --decimal");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("2415/1191016") != std::string::npos);
  CHECK(r.out.find("0.0020277") != std::string::npos);
  CHECK(r.out.find("result: accepted") != std::string::npos);
}

TEST_CASE("invariants rejects at epsilon 0.001 with exit 1") {
  auto r = run_cli("invariants --matrix " + data_path("latin5.csv") +
                   " --langs French,Italian,Latin,Spanish,Portuguese"
                   " --tree " + data_path("fig7.nwk") + " --epsilon 1/1000");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("result: rejected") != std::string::npos);
  CHECK(r.out.find("witness") != std::string::npos);
}

TEST_CASE("invariants --scan ranks all fifteen topologies") {
  auto r = run_cli("invariants --matrix " + data_path("latin5.csv") +
                   " --langs French,Italian,Latin,Spanish,Portuguese --scan");
  CHECK(r.exit_code == 0);
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 15);
  CHECK(r.out.rfind("1. ", 0) == 0);
  // frozen ranking of the exhaustive scan
  CHECK(r.out == testutil::read_file(std::string(SYNPHY_GOLDEN_DIR) +
                                     "/latin5_scan.txt"));
}

TEST_CASE("invariants with uniform weights matches the unweighted run") {
  std::string wf = temp_file(".weights");
  std::string w;
  for (int i = 1; i <= 115; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "P%03d|2\n", i);
    w += buf;
  }
  testutil::write_file(wf, w);
  std::string base =
      "invariants --matrix " + data_path("latin5.csv") +
      " --langs French,Italian,Latin,Spanish,Portuguese --tree " +
      data_path("fig7.nwk") + " --epsilon 0.01";
  auto plain = run_cli(base);
  auto weighted = run_cli(base + " --weights " + wf);
  CHECK(weighted.exit_code == 0);
  CHECK(weighted.out == plain.out);
  std::remove(wf.c_str());
}

TEST_CASE("invariants errors exit 2") {
  CHECK(run_cli("invariants --matrix " + data_path("latin5.csv") +
                " --langs French,Klingon --tree " + data_path("fig7.nwk"))
            .exit_code == 2);
  CHECK(run_cli("invariants --matrix " + data_path("latin5.csv") +
                " --langs French,Italian,Latin,Spanish,Portuguese")
            .exit_code == 2);  // no --tree and no --scan
}

TEST_CASE("simulate and expected are deterministic and consistent") {
  std::string tree_f = temp_file(".nwk");
  std::string params_f = temp_file(".params");
  testutil::write_file(tree_f, "((A,B),(C,D));\n");
  testutil::write_file(params_f,
                       "root 1/2\nedge A 1/10\nedge B 1/5\nedge C 1/4\n"
                       "edge D 1/10\nedge 1 1/8\nedge 4 1/16\n");

  std::string m1 = temp_file(".csv"), m2 = temp_file(".csv");
  auto r1 = run_cli("simulate --tree " + tree_f + " --params " + params_f +
                    " --sites 500 --seed 11 --out " + m1);
  auto r2 = run_cli("simulate --tree " + tree_f + " --params " + params_f +
                    " --sites 500 --seed 11 --out " + m2);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(testutil::read_file(m1) == testutil::read_file(m2));
  CHECK(!testutil::read_file(m1).empty());

  std::string dist_f = temp_file(".dist");
  auto r3 = run_cli("expected --tree " + tree_f + " --params " + params_f +
                    " --out " + dist_f);
  CHECK(r3.exit_code == 0);
  LeafDistribution d = LeafDistribution::parse(testutil::read_file(dist_f));
  CHECK(d.sum() == Rational(1));
  CHECK(d.n_leaves() == 4);

  // histories evaluator through the CLI gives the identical file
  std::string dist_h = temp_file(".dist");
  auto r4 = run_cli("expected --tree " + tree_f + " --params " + params_f +
                    " --method histories --out " + dist_h);
  CHECK(r4.exit_code == 0);
  CHECK(testutil::read_file(dist_h) == testutil::read_file(dist_f));

  for (const auto& f : {tree_f, params_f, m1, m2, dist_f, dist_h})
    std::remove(f.c_str());
}
