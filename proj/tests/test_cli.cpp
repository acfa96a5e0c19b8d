#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(PBOUND_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json results_of(const RunResult& r) { return nlohmann::json::parse(r.out).at("results"); }

TEST(Cli, PmfJson) {
  const RunResult r = run("pmf --probs 0.5,0.5");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("command"), "pmf");
  EXPECT_EQ(j.at("results").at("values"), nlohmann::json({0.25, 0.5, 0.25}));
  EXPECT_NEAR(j.at("constants_used").at("m_star").get<double>(), 0.46882235549942473, 1e-15);
  EXPECT_TRUE(j.contains("tool_version"));
}

TEST(Cli, PmfTableAndCsv) {
  const RunResult table = run("pmf --probs 0.5 --format table");
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("0.5"), std::string::npos);
  const RunResult csv = run("pmf --probs 0.5 --format csv");
  EXPECT_EQ(csv.code, 0);
  EXPECT_NE(csv.out.find(','), std::string::npos);
  EXPECT_EQ(run("pmf --skellam --x 1 --y 1 --i 0 --format csv").code, 1);
}

TEST(Cli, PmfSkellam) {
  const RunResult r = run("pmf --skellam --x 1 --y 1 --i 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(results_of(r).at("probability").get<double>(), 0.30850832255367103, 1e-14);
}

TEST(Cli, ProbsFile) {
  const std::string path = testing::TempDir() + "pbound_probs.txt";
  {
    std::ofstream f(path);
    f << "# two fair coins\n0.5\n\n0.5\n";
  }
  const RunResult r = run("pmf --probs-file " + path);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(results_of(r).at("values"), nlohmann::json({0.25, 0.5, 0.25}));
}

TEST(Cli, Constant) {
  const RunResult r = run("constant");
  ASSERT_EQ(r.code, 0);
  const auto res = results_of(r);
  EXPECT_NEAR(res.at("u_star").get<double>(), 0.39498921067178398, 1e-14);
  EXPECT_NEAR(res.at("m_star").get<double>(), 0.46882235549942473, 1e-15);
  EXPECT_EQ(run("constant --tol 1e-3").code, 1);
}

TEST(Cli, Check) {
  const RunResult r = run("check --probs 0.5");
  ASSERT_EQ(r.code, 0);
  const auto res = results_of(r);
  EXPECT_EQ(res.at("max_product").get<double>(), 0.25);
  EXPECT_NEAR(res.at("margin").get<double>(), 0.2188, 1e-4);
  EXPECT_FALSE(res.at("violation").get<bool>());

  const RunResult empty = run("check --probs \"\"");
  ASSERT_EQ(empty.code, 0);
  EXPECT_EQ(results_of(empty).at("max_product").get<double>(), 0.0);
}

TEST(Cli, CheckSkellamNegativeRange) {
  const RunResult r = run("check --skellam --x 0.39498921067178398 --y 0.39498921067178398 --range -20:20");
  ASSERT_EQ(r.code, 0);
  const auto res = results_of(r);
  EXPECT_EQ(res.at("argmax_index").get<int>(), 0);
  EXPECT_LE(res.at("margin").get<double>(), 1e-9);
  EXPECT_EQ(run("check --skellam --x 5 --y 0 --range 0:3").code, 1);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run("check --probs 1.5").code, 1);
  EXPECT_EQ(run("check --probs 0.2,abc").code, 1);
  EXPECT_EQ(run("check --probs nan").code, 1);
  EXPECT_EQ(run("pmf --probs-file /nonexistent/file").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST(Cli, VerifyPassesAllFamilies) {
  const RunResult r = run("verify --trials 500 --a-max 40 --sharpness-max 1024");
  ASSERT_EQ(r.code, 0);
  const auto res = results_of(r);
  EXPECT_TRUE(res.at("passed").get<bool>());
  std::vector<std::string> names;
  for (const auto& f : res.at("families")) {
    names.push_back(f.at("family").get<std::string>());
    EXPECT_TRUE(f.at("passed").get<bool>()) << names.back();
  }
  for (const char* want : {"random-sweep", "two-binomial-search", "single-binomial", "sharpness", "monotonicity",
                           "cross-representation", "cs-envelope", "equality-cases", "unimodality"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
}

TEST(Cli, VerifyIsReproducible) {
  const std::string args = "verify --trials 300 --seed 9 --a-max 20 --sharpness-max 64";
  const RunResult serial = run(args, "PBOUND_THREADS=1");
  const RunResult parallel = run(args, "PBOUND_THREADS=8");
  ASSERT_EQ(serial.code, 0);
  EXPECT_EQ(serial.out, parallel.out);
}

}  // namespace
