#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "support.hpp"
#include "vspace/cli.hpp"
#include "vspace/io.hpp"

namespace vs {
namespace {

using nlohmann::json;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run vsp(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(VSPACE_FIXTURES) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("vsp_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::vector<std::string> names_of(const json& arr) { return arr.get<std::vector<std::string>>(); }

TEST(Check, FixturesPass) {
  for (const char* f : {"cyclic3.json", "square.json", "square_abstract.json", "square_concrete.json",
                        "cyclic_cube_uso.json", "coordinate_uso.json", "square.csv", "lp_figure4.csv"}) {
    const auto r = vsp({"check", fixture(f)});
    EXPECT_EQ(r.code, cli::kOk) << f << ": " << r.out << r.err;
    EXPECT_EQ(r.out.rfind("ok", 0), 0u) << f;
  }
}

TEST(Check, AxiomFailureExitsOne) {
  const auto path = temp_file("inconsistent.json", R"({"names":["a"],"violators":{"":["a"],"a":["a"]}})");
  const auto r = vsp({"check", path});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_NE(r.out.find("consistency"), std::string::npos);
}

TEST(Check, WarnsAboveSixteenConstraints) {
  // Seventeen constraints, all with empty violator sets.
  std::vector<std::string> names;
  for (int i = 0; i < 17; ++i) names.push_back("x" + std::to_string(i));
  const auto path = temp_file("wide.json", io::to_json(ExplicitViolatorSpace(std::vector<Mask>(1u << 17, 0), names)));
  const auto r = vsp({"check", path});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_TRUE(vsp({"check", fixture("square.json")}).err.empty());
}

TEST(Check, MissingSubsetKeyExitsTwo) {
  const auto path = temp_file("missing.json", R"({"names":["a","b"],"violators":{"":["a","b"],"a":["b"],"b":["a"]}})");
  const auto r = vsp({"check", path});
  EXPECT_EQ(r.code, cli::kParseError);
  EXPECT_NE(r.err.find("a,b"), std::string::npos) << r.err;
}

TEST(Check, MalformedFileReportsPosition) {
  const auto path = temp_file("malformed.json", "{\n  \"names\": [\"a\"\n}\n");
  const auto r = vsp({"check", path});
  EXPECT_EQ(r.code, cli::kParseError);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(vsp({}).code, cli::kParseError);
  EXPECT_EQ(vsp({"check"}).code, cli::kParseError);
  EXPECT_EQ(vsp({"solve", fixture("cyclic3.json"), "--algo", "simplex"}).code, cli::kParseError);
  EXPECT_EQ(vsp({"solve", fixture("cyclic3.json"), "--delta", "0"}).code, cli::kParseError);
  EXPECT_EQ(vsp({"structure"}).code, cli::kParseError);
  EXPECT_EQ(vsp({"structure", "--n", "4"}).code, cli::kParseError);
}

TEST(Solve, SquareGivesADiagonal) {
  const auto r = vsp({"solve", fixture("square.csv"), "--algo", "clarkson1", "--seed", "1", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  const auto basis = names_of(j.at("basis"));
  EXPECT_TRUE(basis == (std::vector<std::string>{"a", "c"}) || basis == (std::vector<std::string>{"b", "d"}));
  EXPECT_TRUE(j.at("violators").empty());
  EXPECT_EQ(j.at("seed"), 1);
  EXPECT_GT(j.at("primitive_calls").get<std::uint64_t>(), 0u);
  EXPECT_TRUE(j.contains("ball_computations"));
}

TEST(Solve, CyclicFixtureGivesWholeSet) {
  for (const char* algo : {"trivial", "clarkson1", "clarkson2", "auto"}) {
    const auto r = vsp({"solve", fixture("cyclic3.json"), "--algo", algo, "--format", "json"});
    ASSERT_EQ(r.code, cli::kOk) << algo << r.err;
    EXPECT_EQ(names_of(json::parse(r.out).at("basis")), (std::vector<std::string>{"f", "g", "h"})) << algo;
  }
}

TEST(Solve, UsoFileGivesGlobalSink) {
  for (const char* f : {"coordinate_uso.json", "cyclic_cube_uso.json"}) {
    const auto named = std::get<io::NamedUso>(io::load(fixture(f)));
    const auto sinks = test::brute_sinks(*named.uso, ConstraintSet::full(named.uso->size()));
    ASSERT_EQ(sinks.size(), 1u);
    const auto r = vsp({"solve", fixture(f), "--algo", "auto", "--format", "json"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = json::parse(r.out);
    std::vector<std::string> sink_names;
    for (auto h : sinks[0].elements) sink_names.push_back(named.names[h]);
    std::sort(sink_names.begin(), sink_names.end());
    auto basis = names_of(j.at("basis"));
    std::sort(basis.begin(), basis.end());
    EXPECT_EQ(basis, sink_names) << f;
    EXPECT_TRUE(j.contains("edge_evaluations"));
  }
}

TEST(Solve, TooSmallDeltaExitsThree) {
  const auto r = vsp({"solve", fixture("cyclic3.json"), "--algo", "trivial", "--delta", "1"});
  EXPECT_EQ(r.code, cli::kSolverError);
  EXPECT_FALSE(r.err.empty());
}

TEST(Structure, CyclicFixtureReportsTheCycle) {
  const auto r = vsp({"structure", fixture("cyclic3.json")});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("acyclic: false"), std::string::npos);
  EXPECT_NE(r.out.find("{f} <=0 {h} <=0 {g} <=0 {f}"), std::string::npos) << r.out;
}

TEST(Structure, SquareSTable) {
  const auto r = vsp({"structure", fixture("square.csv"), "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("acyclic").get<bool>());
  // Rows as sets of classes: S(a) = {a, ab, ad, [ac]} and its rotations.
  const std::map<std::string, std::set<std::string>> expected{
      {"a", {"{a}", "{a,b}", "{a,d}", "{a,c}"}},
      {"b", {"{b}", "{a,b}", "{b,c}", "{a,c}"}},
      {"c", {"{c}", "{b,c}", "{c,d}", "{a,c}"}},
      {"d", {"{d}", "{a,d}", "{c,d}", "{a,c}"}},
  };
  for (const auto& [h, row] : expected) {
    const auto got = j.at("s_table").at(h).get<std::vector<std::string>>();
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), row) << h;
  }
}

TEST(Structure, LpFigureOrderIsCompatible) {
  const auto r = vsp({"structure", fixture("lp_figure4.csv"), "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto order = json::parse(r.out).at("linear_extension").get<std::vector<std::string>>();
  // O < B < A < C < D < Q with O = {}, Q the class of the optimum.
  EXPECT_EQ(order, (std::vector<std::string>{"{}", "{b}", "{a}", "{c}", "{d}", "{a,c}"}));
}

TEST(Structure, TooLargeExitsFour) {
  std::string csv = "name,x,y\n";
  for (int i = 0; i < 20; ++i) csv += "p" + std::to_string(i) + "," + std::to_string(i) + "," + std::to_string(i * i % 7) + "\n";
  EXPECT_EQ(vsp({"structure", temp_file("big.csv", csv)}).code, cli::kSizeGuard);
}

TEST(Structure, ProbeFindsCyclicSpacesAboveDimensionTwo) {
  const auto r = vsp({"structure", "--probe", "300", "--n", "4", "--max-dim", "3", "--seed", "3", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("samples"), 300);
  ASSERT_GT(j.at("cyclic").get<int>(), 0);
  const auto example = std::get<ExplicitViolatorSpace>(io::parse(j.at("example").dump()));
  EXPECT_FALSE(check_axioms(example));
  EXPECT_FALSE(structure(example).acyclic);
  EXPECT_EQ(vsp({"structure", fixture("cyclic3.json"), "--probe", "5"}).code, cli::kParseError);
}

TEST(Uso, GeneratedFilesCheckAndTabulate) {
  const auto u = vsp({"uso", "--family", "random", "--blocks", "3,2,2", "--seed", "8"});
  ASSERT_EQ(u.code, cli::kOk) << u.err;
  EXPECT_EQ(vsp({"check", temp_file("gen_uso.json", u.out)}).code, cli::kOk);

  const auto t = vsp({"uso", "--family", "cyclic", "--tabulate"});
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  const auto space = std::get<ExplicitViolatorSpace>(io::parse(t.out));
  EXPECT_FALSE(check_axioms(space));
  EXPECT_FALSE(structure(space).acyclic);
}

TEST(Bench, ClarksonColumnsCoincideBelowDelegationThreshold) {
  // 9 * delta^2 = 36 for delta = 2: clarkson1 hands the whole set to clarkson2.
  const auto r = vsp({"bench", "--blocks", "2", "--n", "8,20,36", "--algo", "clarkson1,clarkson2", "--trials", "6",
                      "--seed", "4"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "n,delta,algo,mean_primitive_calls,mean_iterations,trials,seed");
  std::vector<std::string> rows;
  for (std::string l; std::getline(lines, l);) rows.push_back(l);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    auto strip = [](std::string s) {
      const auto a = s.find(",clarkson");
      return s.erase(a, std::string(",clarkson1").size());
    };
    EXPECT_EQ(strip(rows[i]), strip(rows[i + 1]));
  }
}

TEST(Sampling, SquareMeanIsFourThirds) {
  const auto r = vsp({"sampling", fixture("square.json"), "--r", "2", "--trials", "10000", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("exact_mean"), "4/3");
  EXPECT_TRUE(j.at("pass").get<bool>());
  const double sigma = std::stod(j.at("stddev").get<std::string>()) / 100.0;
  EXPECT_NEAR(std::stod(j.at("mean").get<std::string>()), 4.0 / 3.0, 3 * sigma);
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = (std::filesystem::temp_directory_path() / "vsp_cli_out.json").string();
  std::remove(path.c_str());
  const auto r = vsp({"solve", fixture("cyclic3.json"), "--format", "json", "--out", path});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(names_of(json::parse(io::read_file(path)).at("basis")), (std::vector<std::string>{"f", "g", "h"}));
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> commands{
      {"check", fixture("square.json")},
      {"solve", fixture("square.csv"), "--seed", "7", "--format", "json"},
      {"structure", fixture("square.json"), "--format", "json"},
      {"uso", "--family", "inflated", "--blocks", "6,6", "--base", "2,2", "--seed", "3"},
      {"bench", "--blocks", "2", "--n", "40,80", "--trials", "4", "--seed", "5"},
      {"sampling", fixture("square.json"), "--r", "2", "--trials", "500", "--seed", "5", "--format", "json"},
  };
  for (const auto& c : commands) {
    const auto a = vsp(c);
    const auto b = vsp(c);
    EXPECT_EQ(a.code, cli::kOk) << c[0] << a.err;
    EXPECT_EQ(a.out, b.out) << c[0];
  }
}

}  // namespace
}  // namespace vs
