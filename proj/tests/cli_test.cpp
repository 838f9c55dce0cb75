#include "cli.hpp"

#include "atc/io.hpp"
#include "atc/synthetic.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace atc {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("atc_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string generated(const std::string& name, int k, int n, std::uint64_t seed, double temperature = 1.0) {
    const auto r = run({"generate", "--k", std::to_string(k), "--n", std::to_string(n), "--seed",
                        std::to_string(seed), "--temperature", std::to_string(temperature), "--out", path(name)});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    return path(name);
  }

  // Estimate column for each method row, keyed by method name.
  static std::map<std::string, std::string> estimates(const std::string& out) {
    std::map<std::string, std::string> values;
    for (const auto& line : lines_of(out)) {
      std::istringstream in(line);
      std::string method, value;
      in >> method >> value;
      if (method == "source:" || method == "target:" || method == "method" || method.empty()) continue;
      values[method] = value;
    }
    return values;
  }

  fs::path dir_;
};

TEST_F(Cli, GenerateWritesLoadableDump) {
  const auto file = generated("g.csv", 4, 250, 3);
  const auto set = io::load_dump(file);
  EXPECT_EQ(set.size(), 250);
  EXPECT_EQ(set.dimension(), 4);
  EXPECT_TRUE(set.has_labels());
  const auto r = run({"generate", "--k", "3", "--n", "5", "--unlabeled", "--out", "-"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines_of(r.out).front(), "p0,p1,p2");
  EXPECT_EQ(lines_of(r.out).size(), 6u);
}

TEST_F(Cli, BinaryAllScoresAgree) {
  const auto source = generated("s.csv", 2, 400, 1);
  const auto target = generated("t.csv", 2, 400, 2, 1.6);
  const auto r = run({"estimate", "--source", source, "--target", target, "--score", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto values = estimates(r.out);
  ASSERT_EQ(values.size(), 6u);
  for (const auto& [method, value] : values) EXPECT_EQ(value, values.at("max")) << method;
}

TEST_F(Cli, L2PairAgreesAtHigherDimension) {
  const auto source = generated("s.csv", 9, 400, 4);
  const auto target = generated("t.csv", 9, 400, 5, 2.0);
  const auto r = run({"estimate", "--source", source, "--target", target, "--boot", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines_of(r.out);
  std::string l2n, l2u;
  for (const auto& line : out) {
    if (line.rfind("l2n ", 0) == 0) l2n = line.substr(4);
    if (line.rfind("l2u ", 0) == 0) l2u = line.substr(4);
  }
  ASSERT_FALSE(l2n.empty());
  EXPECT_EQ(l2n, l2u);
}

TEST_F(Cli, DocOnItselfReturnsSourceAccuracy) {
  const auto source = generated("s.csv", 5, 300, 6);
  const auto r = run({"estimate", "--source", source, "--target", source, "--method", "doc"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto set = io::load_dump(source);
  EXPECT_EQ(estimates(r.out).at("doc"), io::percent(true_accuracy(set).value()));
}

TEST_F(Cli, ErrorConvention) {
  const auto source = generated("s.csv", 3, 200, 7);
  const auto r = run({"estimate", "--source", source, "--target", source, "--method", "doc", "--convention",
                      "error"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto set = io::load_dump(source);
  EXPECT_EQ(estimates(r.out).at("doc"), io::percent(1.0 - true_accuracy(set).value()));
}

TEST_F(Cli, BadInputExitsTwoWithLine) {
  {
    std::ofstream f(path("bad.csv"));
    f << "p0,p1,label\n0.5,0.5,0\n0.5,0.6,1\n";
  }
  const auto good = generated("good.csv", 2, 20, 1);
  auto r = run({"estimate", "--source", path("bad.csv"), "--target", good});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  r = run({"estimate", "--source", good, "--target", path("missing.csv")});
  EXPECT_EQ(r.code, cli::kExitInputError);
  r = run({"estimate", "--source", good, "--target", good, "--score", "bogus"});
  EXPECT_EQ(r.code, cli::kExitInputError);
  r = run({"estimate", "--source", good});
  EXPECT_EQ(r.code, cli::kExitInputError);
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST_F(Cli, UnlabeledSourceIsRejected) {
  ASSERT_EQ(run({"generate", "--k", "3", "--n", "20", "--unlabeled", "--out", path("u.csv")}).code, 0);
  const auto r = run({"estimate", "--source", path("u.csv"), "--target", path("u.csv")});
  EXPECT_EQ(r.code, cli::kExitInputError);
}

TEST_F(Cli, SyntheticBenchmarkShape) {
  const auto r = run({"benchmark", "--synthetic", "--k", "6", "--n", "2000", "--boot", "100", "--runs",
                      path("runs.csv"), "--aggregate", path("agg.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto aggregate = lines_of(slurp(path("agg.csv")));
  ASSERT_EQ(aggregate.size(), 8u);
  EXPECT_EQ(aggregate[0], "dimension,method,mean,ci_low,ci_high");
  const auto runs = lines_of(slurp(path("runs.csv")));
  EXPECT_EQ(runs.size(), 1u + 7u * 100u);
  EXPECT_EQ(runs[0], "dimension,method,run,abs_error");
  EXPECT_NE(r.out.find("wins"), std::string::npos);
}

TEST_F(Cli, BenchmarkIsByteIdentical) {
  const std::vector<std::string> base{"benchmark", "--synthetic", "--k",       "3,5",  "--n",   "300",
                                      "--boot",    "20",          "--methods", "max,l2n,doc", "--seed", "9"};
  auto first = base;
  first.insert(first.end(), {"--runs", path("r1.csv"), "--aggregate", path("a1.csv")});
  auto second = base;
  second.insert(second.end(), {"--runs", path("r2.csv"), "--aggregate", path("a2.csv"), "--threads", "3"});
  ASSERT_EQ(run(first).code, 0);
  ASSERT_EQ(run(second).code, 0);
  EXPECT_EQ(slurp(path("r1.csv")), slurp(path("r2.csv")));
  EXPECT_EQ(slurp(path("a1.csv")), slurp(path("a2.csv")));
  EXPECT_EQ(lines_of(slurp(path("a1.csv"))).size(), 1u + 2u * 3u);
}

TEST_F(Cli, BenchmarkFromDumps) {
  const auto s3 = generated("s3.csv", 3, 200, 1);
  const auto t3 = generated("t3.csv", 3, 200, 2, 1.5);
  const auto s2 = generated("s2.csv", 2, 200, 3);
  const auto t2 = generated("t2.csv", 2, 200, 4, 1.5);
  const auto r = run({"benchmark", "--pair", s3 + ":" + t3, "--pair", s2 + ":" + t2, "--boot", "10",
                      "--exclude-binary", "--pairwise", "--runs", path("r.csv"), "--aggregate", path("a.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto aggregate = lines_of(slurp(path("a.csv")));
  ASSERT_EQ(aggregate.size(), 15u);
  EXPECT_EQ(aggregate[1].substr(0, 2), "2,");
  EXPECT_NE(r.out.find("pairwise"), std::string::npos);
}

TEST_F(Cli, VerifyBinarySingleClass) {
  const auto r = run({"verify", "--k", "2", "--points", "300", "--budget", "20000"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out;
  EXPECT_NE(r.out.find("class: max negent l2n l1u l2u js\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("matches predicted classes for k=2"), std::string::npos);
}

TEST_F(Cli, VerifyTernaryPrintsWitness) {
  const auto r = run({"verify", "--k", "3", "--points", "300", "--budget", "20000"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out;
  bool saw = false;
  for (const auto& line : lines_of(r.out)) {
    if (line.empty() || line.front() != '{') continue;
    const auto record = nlohmann::json::parse(line);
    if (record["a"] == "l2n" && record["b"] == "l2u") EXPECT_EQ(record["status"], "consistent");
    if (record["a"] == "max" && record["b"] == "l2n") {
      saw = true;
      EXPECT_EQ(record["status"], "counterexample");
      EXPECT_TRUE(record.contains("witness"));
    }
  }
  EXPECT_TRUE(saw);
  EXPECT_NE(r.out.find("class: l2n l2u\n"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifySinglePairHighDimension) {
  const auto r = run({"verify", "--pair", "l2n,l2u", "--k", "50", "--points", "300", "--budget", "10000"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out;
  EXPECT_NE(r.out.find("\"status\":\"consistent\""), std::string::npos);
  const auto bad = run({"verify", "--pair", "l2n", "--k", "3"});
  EXPECT_EQ(bad.code, cli::kExitInputError);
}

}  // namespace
}  // namespace atc
