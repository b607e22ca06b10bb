#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "treepca/cli.hpp"
#include "treepca/newick.hpp"

#ifndef TREEPCA_TEST_DATA
#define TREEPCA_TEST_DATA "tests/data"
#endif

namespace treepca {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "treepca");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) row.push_back(f);
    rows.push_back(row);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("treepca_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string data(const std::string& name) { return (fs::path(TREEPCA_TEST_DATA) / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

TEST_F(Cli, GeodesicDistanceAndMidpoint) {
  write("a.nwk", "((2:1,3:1):1,(4:1,5:1):1,(0:1,1:1):2);\n");
  write("b.nwk", "((3:1,(4:1,5:1):1):2,2:1,(0:1,1:1):1);\n");
  const auto r = run({"geodesic", path("a.nwk"), path("b.nwk"), "--t", "0.5", "--json", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["distance"].get<double>(), std::sqrt(10.0), 1e-9);
  NewickOptions o;
  o.leaves = testing::fig1().leaves;
  const auto mid = parse_newick(j["tree"].get<std::string>(), o);
  const auto c = testing::fig1().coordinates(mid.without_pendants());
  EXPECT_NEAR(c[0], -0.5, 1e-9);
  EXPECT_NEAR(c[1], 1.0, 1e-9);
  EXPECT_NEAR(c[2], 1.5, 1e-9);
  const auto record = nlohmann::json::parse(slurp(dir_ / "o" / "run.json"));
  EXPECT_EQ(record["subcommand"], "geodesic");
  EXPECT_EQ(record["options"]["t"], "0.5");
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"nonsense"}).code, kExitUsage);
  EXPECT_EQ(run({"project", "--input", "x.nwk"}).code, kExitUsage);
  EXPECT_EQ(run({"pca", "--input", "x.nwk", "--order", "3"}).code, kExitUsage);
  const auto help = run({"pca", "--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("--kernels"), std::string::npos);
}

TEST_F(Cli, DataErrorsExitTwoAndNameTheLine) {
  write("good.nwk", "((2:1,3:1):1,(4:1,5:1):1,(0:1,1:1):2);\n");
  write("bad.nwk", "# header\n((2:1,3:1):1,(4:1,5:1):1,(0:1,1:1):2);\n((2:1,3:1):1,(4:1\n");
  auto r = run({"mean", "--input", path("bad.nwk"), "--out", path("o")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("bad.nwk:3"), std::string::npos) << r.err;
  r = run({"geodesic", path("good.nwk"), path("missing.nwk"), "--out", path("o")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("missing.nwk"), std::string::npos);
  write("other.nwk", "((2:1,3:1):1,(4:1,6:1):1,(0:1,1:1):2);\n");
  EXPECT_EQ(run({"geodesic", path("good.nwk"), path("other.nwk"), "--out", path("o")}).code, kExitData);
  EXPECT_FALSE(fs::exists(dir_ / "o" / "run.json"));
}

TEST_F(Cli, RefinedMeanOfTheFixture) {
  const auto r = run({"mean", "--input", data("fig1_vertices.nwk"), "--method", "refined", "--json", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  NewickOptions o;
  o.leaves = testing::fig1().leaves;
  const auto file = read_tree_file(dir_ / "o" / "mean.nwk", o);
  const auto c = testing::fig1().coordinates(file.trees.front().without_pendants());
  EXPECT_NEAR(c[0], 0.0, 1e-9);
  EXPECT_NEAR(c[1], 0.0, 1e-9);
  EXPECT_NEAR(c[2], 4.0 / 3, 1e-9);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir_ / "o" / "mean.json"))["certified"].get<bool>());
}

TEST_F(Cli, WeightedMean) {
  write("w.csv", "weight\n1\n0\n0\n");
  const auto r = run({"mean", "--input", data("fig1_vertices.nwk"), "--weights", path("w.csv"), "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  NewickOptions o;
  o.leaves = testing::fig1().leaves;
  const auto mean = read_tree_file(dir_ / "o" / "mean.nwk", o).trees.front();
  EXPECT_TRUE(mean.without_pendants().equals(testing::fig1().v0, 1e-9));
  write("short.csv", "1\n2\n");
  EXPECT_EQ(run({"mean", "--input", data("fig1_vertices.nwk"), "--weights", path("short.csv"), "--out", path("o")}).code, kExitData);
}

TEST_F(Cli, ProjectMatchesGoldenFile) {
  const auto r = run({"project", "--vertices", data("fig1_vertices.nwk"), "--input", data("fig1_points.nwk"), "--method",
                      "exhaustive", "--resolution", "20", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, slurp(dir_ / "o" / "projections.csv"));
  const auto got = csv_rows(r.out);
  const auto want = csv_rows(slurp(data("fig1_projection_golden.csv")));
  ASSERT_EQ(got.size(), want.size());
  EXPECT_EQ(got[0], (std::vector<std::string>{"p0", "p1", "p2", "distance", "topology", "tie_count"}));
  for (std::size_t i = 1; i < got.size(); ++i) {
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::stod(got[i][k]), std::stod(want[i][k]), 1e-12) << "row " << i;
    EXPECT_NEAR(std::stod(got[i][3]), std::stod(want[i][3]), 1e-6) << "row " << i;
  }
}

TEST_F(Cli, ProjectGeometricIsClose) {
  const auto r = run({"project", "--vertices", data("fig1_vertices.nwk"), "--input", data("fig1_points.nwk"), "--seed", "3",
                      "--json", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv_rows(slurp(dir_ / "o" / "projections.csv"));
  const auto want = csv_rows(slurp(data("fig1_projection_golden.csv")));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][3]), std::stod(want[i][3]), 0.02) << "row " << i;
}

TEST_F(Cli, SimulateModes) {
  ASSERT_EQ(run({"simulate", "coalescent", "--taxa", "5", "--count", "4", "--out", path("c")}).code, kExitOk);
  EXPECT_EQ(read_tree_file(dir_ / "c" / "trees.nwk", {}).trees.size(), 4u);
  ASSERT_EQ(run({"simulate", "quadruple", "--count", "3", "--out", path("q")}).code, kExitOk);
  EXPECT_EQ(read_tree_file(dir_ / "q" / "quadruples.nwk", {}).trees.size(), 15u);
  write("spec.json", R"({"n_taxa": 5, "n_points": 6, "truth_resolution": 6, "dispersion": "high"})");
  const auto r = run({"simulate", "surface", "--spec", path("spec.json"), "--seed", "4", "--json", "--out", path("s")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto truth = nlohmann::json::parse(slurp(dir_ / "s" / "truth.json"));
  EXPECT_EQ(truth["spec"]["dispersion"], "high");
  EXPECT_EQ(truth["weights"].size(), 6u);
  EXPECT_EQ(read_tree_file(dir_ / "s" / "data.nwk", {}).trees.size(), 6u);
  EXPECT_EQ(read_tree_file(dir_ / "s" / "vertices.nwk", {}).trees.size(), 3u);
  write("broken.json", "{\"n_taxa\": ");
  EXPECT_EQ(run({"simulate", "surface", "--spec", path("broken.json"), "--out", path("s")}).code, kExitData);
}

TEST_F(Cli, PcaIsReproducible) {
  write("spec.json", R"({"n_taxa": 5, "n_points": 10, "truth_resolution": 6})");
  ASSERT_EQ(run({"simulate", "surface", "--spec", path("spec.json"), "--out", path("s")}).code, kExitOk);
  write("kernels.json", R"({"kernels": [{"kind": "data_resample"}, {"kind": "beta_blend", "alpha": 2, "beta": 2},
                                        {"kind": "random_walk", "steps": 2, "step_fraction": 0.05}]})");
  for (const char* out : {"a", "b"}) {
    const auto r = run({"pca", "--input", path("s/data.nwk"), "--order", "2", "--seed", "7", "--restarts", "1", "--max-sweeps",
                        "3", "--kernels", path("kernels.json"), "--out", path(out)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  for (const char* f : {"stats.json", "vertices.nwk", "projections.csv", "trace.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  const auto stats = nlohmann::json::parse(slurp(dir_ / "a" / "stats.json"));
  EXPECT_EQ(stats["order"], 2);
  EXPECT_EQ(csv_rows(slurp(dir_ / "a" / "projections.csv")).size(), 11u);
  write("bad_kernels.json", R"([{"kind": "teleport"}])");
  EXPECT_EQ(run({"pca", "--input", path("s/data.nwk"), "--kernels", path("bad_kernels.json"), "--out", path("c")}).code,
            kExitUsage);
}

TEST_F(Cli, PlotSimplex) {
  const auto r = run({"plot-simplex", "--vertices", data("fig1_vertices.nwk"), "--input", data("fig1_points.nwk"), "--resolution",
                      "12", "--json", "--out", path("p")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto summary = nlohmann::json::parse(r.out);
  const std::string svg = slurp(dir_ / "p" / "simplex.svg");
  EXPECT_NE(svg.find("width=\"600\" height=\"520\""), std::string::npos);
  std::size_t regions = 0, dots = 0;
  for (auto at = svg.find("class=\"region\""); at != std::string::npos; at = svg.find("class=\"region\"", at + 1)) ++regions;
  for (auto at = svg.find("class=\"datum\""); at != std::string::npos; at = svg.find("class=\"datum\"", at + 1)) ++dots;
  EXPECT_EQ(regions, summary["regions"].get<std::size_t>());
  EXPECT_EQ(dots, 5u);
  EXPECT_GE(summary["topologies"].get<int>(), 2);
  EXPECT_EQ(csv_rows(slurp(dir_ / "p" / "lattice.csv")).size(), 1u + 13 * 14 / 2);
  // deterministic output
  ASSERT_EQ(run({"plot-simplex", "--vertices", data("fig1_vertices.nwk"), "--input", data("fig1_points.nwk"), "--resolution",
                 "12", "--out", path("q")})
                .code,
            kExitOk);
  EXPECT_EQ(svg, slurp(dir_ / "q" / "simplex.svg"));
}

}  // namespace
}  // namespace treepca
