#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "bowtie/cli.hpp"
#include "test_support.hpp"

namespace bowtie {
namespace {

namespace fs = std::filesystem;
using testing::read_text;
using testing::scratch_dir;
using testing::write_text;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

constexpr const char* kMetaHeader = "id,created_at,tweets,api_followers,api_followings,protected,status\n";

fs::path write_canon11(const fs::path& dir) {
  std::string text;
  for (const Arc& a : canon11_arcs()) text += std::to_string(a.src) + " " + std::to_string(a.dst) + "\n";
  write_text(dir / "canon11.txt", text);
  return dir / "canon11.txt";
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text(p)); }

TEST(Cli, DecomposeCanon11) {
  const auto dir = scratch_dir("cli_decompose");
  const auto edges = write_canon11(dir);
  const CliResult r = run({"decompose", "--edges", edges.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(dir / "out" / "summary.json");
  const nlohmann::json sizes = {{"LSC", 2}, {"IN", 1}, {"OUT", 1}, {"IN_TENDRILS", 1}, {"OUT_TENDRILS", 2},
                                {"BRIDGES", 1}, {"OTHER", 1}, {"DISCONNECTED", 2}};
  EXPECT_EQ(j["sizes"], sizes);
  EXPECT_EQ(j["total_nodes"], 11);
  EXPECT_EQ(j["total_arcs"], 11);
  const std::string labels = read_text(dir / "out" / "labels.csv");
  EXPECT_NE(labels.find("\n7,BRIDGES,1,1\n"), std::string::npos);
  EXPECT_NE(labels.find("\n9,OTHER,,\n"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "labels.csv.tmp"));
}

TEST(Cli, DecomposeIsThreadCountIndependent) {
  const auto dir = scratch_dir("cli_threads");
  ASSERT_EQ(run({"generate", "--plant", "LSC=300,IN=100,OUT=100,IN_TENDRILS=50,OUT_TENDRILS=50,BRIDGES=20,OTHER=30,"
                 "DISCONNECTED=60", "--depth", "IN=3,OUT=2", "--seed", "4", "--out", dir.string()}).code, 0);
  for (const char* t : {"1", "4"})
    ASSERT_EQ(run({"decompose", "--edges", (dir / "edges.txt").string(), "--threads", t, "--out",
                   (dir / ("t" + std::string(t))).string()}).code, 0);
  EXPECT_EQ(read_text(dir / "t1" / "labels.csv"), read_text(dir / "t4" / "labels.csv"));
  EXPECT_EQ(read_text(dir / "t1" / "summary.json"), read_text(dir / "t4" / "summary.json"));
  EXPECT_EQ(read_text(dir / "t1" / "labels.csv"), read_text(dir / "expected_labels.csv"));
}

TEST(Cli, EmptyEdgesWithMetadata) {
  const auto dir = scratch_dir("cli_empty");
  write_text(dir / "edges.txt", "");
  write_text(dir / "meta.csv", std::string(kMetaHeader) + "5,2009-01-01,0,0,0,0,active\n"
                               "6,2009-01-01,0,0,0,0,active\n7,2009-01-01,0,0,0,0,active\n");
  const CliResult r = run({"decompose", "--edges", (dir / "edges.txt").string(), "--meta", (dir / "meta.csv").string(),
                     "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(dir / "out" / "summary.json");
  EXPECT_EQ(j["sizes"]["LSC"], 1);
  EXPECT_EQ(j["sizes"]["DISCONNECTED"], 2);
}

TEST(Cli, MissingInputIsExit1) {
  const auto dir = scratch_dir("cli_missing");
  const CliResult r = run({"decompose", "--edges", (dir / "nope.txt").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.txt"), std::string::npos) << r.err;
}

TEST(Cli, MalformedInputIsExit1WithLine) {
  const auto dir = scratch_dir("cli_malformed");
  write_text(dir / "edges.txt", "1 2\n1 x\n");
  const CliResult r = run({"decompose", "--edges", (dir / "edges.txt").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":2"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "labels.csv"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"decompose", "--format", "xml"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, GenerateCanonThenDecompose) {
  const auto dir = scratch_dir("cli_generate");
  ASSERT_EQ(run({"generate", "--canon", "--seed", "3", "--out", dir.string()}).code, 0);
  ASSERT_EQ(run({"decompose", "--edges", (dir / "edges.txt").string(), "--meta", (dir / "meta.csv").string(),
                 "--out", (dir / "out").string()}).code, 0);
  EXPECT_EQ(read_text(dir / "out" / "labels.csv"), read_text(dir / "expected_labels.csv"));
}

TEST(Cli, GenerateRejectsBadSpec) {
  const auto dir = scratch_dir("cli_generate_bad");
  EXPECT_EQ(run({"generate", "--plant", "LSC=1,OUT=3", "--out", dir.string()}).code, 3);
  EXPECT_EQ(run({"generate", "--plant", "CORE=3", "--out", dir.string()}).code, 1);
}

TEST(Cli, ValidateDegreesOnGeneratedData) {
  const auto dir = scratch_dir("cli_validate");
  ASSERT_EQ(run({"generate", "--plant", "LSC=50,IN=20,OUT=20,DISCONNECTED=9", "--out", dir.string()}).code, 0);
  const CliResult r = run({"validate-degrees", "--edges", (dir / "edges.txt").string(), "--meta",
                     (dir / "meta.csv").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(dir / "degree_diff.json");
  EXPECT_EQ(j["followers"]["zero_fraction"], 1.0);
  EXPECT_EQ(j["followings"]["zero_fraction"], 1.0);
  EXPECT_EQ(j["nodes_with_metadata"], 99);
}

TEST(Cli, StatsWritesReportAndCcdfs) {
  const auto dir = scratch_dir("cli_stats");
  ASSERT_EQ(run({"generate", "--canon", "--out", dir.string()}).code, 0);
  write_text(dir / "ids.txt", "# experts\n1\n99\n");
  const CliResult r = run({"stats", "--edges", (dir / "edges.txt").string(), "--meta", (dir / "meta.csv").string(),
                     "--labels", (dir / "ids.txt").string(), "--k", "3", "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(dir / "out" / "stats.json");
  EXPECT_EQ(j["in_degree_summary"]["median"], 1);
  EXPECT_EQ(j["outliers"].size(), 5u);
  EXPECT_EQ(j["outliers"][0]["members"].size(), 3u);
  EXPECT_EQ(j["crosstabs"]["labels"]["absent_percent"], 50.0);
  EXPECT_TRUE(fs::exists(dir / "out" / "ccdf" / "ccdf_in_degree_ALL.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "ccdf" / "ccdf_age_months_LSC.csv"));
  EXPECT_EQ(read_text(dir / "out" / "ccdf" / "ccdf_in_degree_OUT.csv").substr(0, 10), "value,ccdf");
}

TEST(Cli, SnapshotEvolveDiff) {
  const auto dir = scratch_dir("cli_temporal");
  ASSERT_EQ(run({"generate", "--plant", "LSC=200,IN=60,OUT=60,IN_TENDRILS=20,OUT_TENDRILS=20,DISCONNECTED=30",
                 "--out", dir.string()}).code, 0);
  const std::string edges = (dir / "edges.txt").string();
  const std::string meta = (dir / "meta.csv").string();

  ASSERT_EQ(run({"snapshot", "--edges", edges, "--meta", meta, "--as-of", "2013-01-01", "--out",
                 (dir / "late").string()}).code, 0);
  ASSERT_EQ(run({"decompose", "--edges", edges, "--out", (dir / "full").string()}).code, 0);
  EXPECT_EQ(read_text(dir / "late" / "labels.csv"), read_text(dir / "full" / "labels.csv"));
  EXPECT_EQ(read_json(dir / "late" / "summary.json")["as_of"], "2013-01-01");

  const CliResult e = run({"evolve", "--edges", edges, "--meta", meta, "--start", "2007-01-01", "--end", "2012-08-01",
                     "--step-months", "6", "--out", (dir / "evo").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(read_text(dir / "evo" / "evolution.csv").substr(0, 24), "date,label,count,percent");
  EXPECT_EQ(read_text(dir / "evo" / "attribution.csv").substr(0, 38), "period_end,label,new_accounts,fraction");

  const CliResult same = run({"diff", "--older", (dir / "full" / "labels.csv").string(), "--newer",
                        (dir / "late" / "labels.csv").string(), "--out", (dir / "diff1").string()});
  ASSERT_EQ(same.code, 0) << same.err;
  EXPECT_EQ(read_json(dir / "diff1" / "agreement.json")["fraction"], 1.0);

  const CliResult dated = run({"diff", "--edges", edges, "--meta", meta, "--older", "2010-01-01", "--newer", "2012-01-01",
                         "--out", (dir / "diff2").string()});
  ASSERT_EQ(dated.code, 0) << dated.err;
  EXPECT_TRUE(fs::exists(dir / "diff2" / "attribution.csv"));

  const CliResult backwards = run({"diff", "--edges", edges, "--meta", meta, "--older", "2012-01-01", "--newer",
                             "2010-01-01", "--out", (dir / "diff3").string()});
  EXPECT_EQ(backwards.code, 3);

  EXPECT_EQ(run({"snapshot", "--edges", edges, "--as-of", "2010-13-01", "--out", dir.string()}).code, 1);
}

TEST(Cli, EvolveUniformDatesRepeats) {
  const auto dir = scratch_dir("cli_uniform");
  const auto edges = write_canon11(dir);
  std::string meta = kMetaHeader;
  for (int id = 1; id <= 11; ++id) meta += std::to_string(id) + ",2008-01-01,0,0,0,0,active\n";
  write_text(dir / "meta.csv", meta);
  ASSERT_EQ(run({"evolve", "--edges", edges.string(), "--meta", (dir / "meta.csv").string(), "--start", "2009-01-01",
                 "--end", "2010-01-01", "--out", dir.string()}).code, 0);
  const std::string csv = read_text(dir / "evolution.csv");
  EXPECT_NE(csv.find("2009-01-01,BRIDGES,1,"), std::string::npos);
  EXPECT_NE(csv.find("2010-01-01,BRIDGES,1,"), std::string::npos);
}

TEST(Cli, OracleCheck) {
  const auto dir = scratch_dir("cli_oracle");
  const CliResult r = run({"oracle-check", "--trials", "40", "--max-n", "50", "--out", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "40/40 matched\n");
  EXPECT_EQ(read_text(dir / "oracle_check.txt"), "40/40 matched\n");
  EXPECT_EQ(run({"oracle-check", "--max-n", "6000"}).code, 3);
}

TEST(Cli, AdjacencyFormat) {
  const auto dir = scratch_dir("cli_adjacency");
  write_text(dir / "adj.txt", "1:2,3\n2:1\n4:1,5,7\n7:3\n6:3\n8:6\n9:5\n10:11\n3:\n");
  ASSERT_EQ(run({"decompose", "--edges", (dir / "adj.txt").string(), "--format", "adjacency", "--out",
                 (dir / "out").string()}).code, 0);
  const auto edges = write_canon11(dir);
  ASSERT_EQ(run({"decompose", "--edges", edges.string(), "--out", (dir / "ref").string()}).code, 0);
  EXPECT_EQ(read_text(dir / "out" / "labels.csv"), read_text(dir / "ref" / "labels.csv"));
}

}  // namespace
}  // namespace bowtie
