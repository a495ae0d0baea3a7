#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using hybridbvp::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "hybridbvp_cli_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Cli, UnknownProblemIsConfigError) {
  EXPECT_EQ(run({"solve", "--problem", "nosuch", "-o", scratch("x").string()}), 3);
  EXPECT_EQ(run({"solve", "--bogus-flag"}), 3);
  EXPECT_EQ(run({"solve", "--problem", "zero", "--n-cells", "abc"}), 3);
  EXPECT_EQ(run({"sandbox"}), 3);
}

TEST(Cli, SolveWritesThreeFiles) {
  const auto out = scratch("solve");
  ASSERT_EQ(run({"solve", "--problem", "decoupled", "--n-cells", "64", "-o", out.string()}), 0);
  EXPECT_EQ(lines(out / "solution.csv"), 65u + 1u);  // header + n + 1 rows
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
  const auto csv = slurp(out / "solution.csv");
  EXPECT_EQ(csv.substr(0, 6), "t,u,v\n");
  EXPECT_EQ(csv.substr(6, 4), "0,0,");
}

TEST(Cli, SolvePThenSolveQFromFiles) {
  const auto a = scratch("p");
  const auto b = scratch("q");
  ASSERT_EQ(run({"solve-p", "--problem", "manufactured-p2", "--n-cells", "64", "-o", a.string()}), 0);
  ASSERT_EQ(run({"solve-q", "--problem", "paper-example", "--n-cells", "128", "--u-file",
                 (a / "solution.csv").string(), "-o", b.string()}),
            0);
  EXPECT_EQ(lines(b / "solution.csv"), 130u);
}

TEST(Cli, FailedCheckExitsTwoUnlessForced) {
  const auto dir = scratch("bad");
  fs::create_directories(dir);
  const auto problem = dir / "bad.json";
  // Phi4 fails for this flux
  std::ofstream(problem) << R"({"base": "decoupled", "phi": "1/(1 + r)^2", "m": "0", "M": "1", "n_cells": 32})";
  EXPECT_EQ(run({"check", "--problem", problem.string(), "-o", dir.string()}), 2);
  EXPECT_EQ(run({"solve", "--problem", problem.string(), "-o", dir.string()}), 2);
}

TEST(Cli, ConfigFile) {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({"problem": "zero", "n_cells": 16, "out": ")" + (dir / "o").string() + "\"}";
  EXPECT_EQ(run({"solve", "--config", (dir / "run.json").string()}), 0);
  EXPECT_EQ(lines(dir / "o" / "solution.csv"), 18u);
  std::ofstream(dir / "bad.json") << R"({"problem": "zero", "cells": 16})";
  EXPECT_EQ(run({"solve", "--config", (dir / "bad.json").string()}), 3);
}

TEST(Cli, EigenAndSandbox) {
  const auto out = scratch("misc");
  EXPECT_EQ(run({"eigen", "--p", "2", "--n-cells", "128", "-o", out.string()}), 0);
  EXPECT_NE(slurp(out / "report.json").find("\"lambda_p\""), std::string::npos);
  for (const char* demo : {"browder-minty", "lambda0", "condkras"}) {
    EXPECT_EQ(run({"sandbox", demo, "-o", out.string()}), 0) << demo;
  }
}
