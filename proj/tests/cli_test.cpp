#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gen.hpp"

using namespace mrt;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(MRT_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t k; (k = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, k);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, GenText) {
  CliRun r = run("gen --system ch --n 2");
  ASSERT_EQ(r.code, 0);
  auto ch2 = VarSpace::ch(2);
  auto eqs = gen_ch(2);
  std::istringstream lines(r.out);
  std::string line;
  std::size_t k = 0;
  for (; std::getline(lines, line); ++k) {
    ASSERT_LT(k, eqs.size());
    auto colon = line.find(": ");
    ASSERT_NE(colon, std::string::npos);
    EXPECT_EQ(line.substr(0, colon), eqs[k].label);
    EXPECT_EQ(parse(line.substr(colon + 2), ch2), eqs[k].residual);
  }
  EXPECT_EQ(k, eqs.size());
}

TEST(Cli, GenFormats) {
  CliRun latex = run("gen --system cbs --n 3 --format latex");
  ASSERT_EQ(latex.code, 0);
  EXPECT_NE(latex.out.find("M_{0001}"), std::string::npos);
  EXPECT_NE(latex.out.find("= 0"), std::string::npos);

  CliRun js = run("gen --system qiao --n 2 --format json");
  ASSERT_EQ(js.code, 0);
  auto arr = nlohmann::json::parse(js.out);
  auto eqs = gen_qiao(2);
  ASSERT_EQ(arr.size(), eqs.size());
  for (std::size_t k = 0; k < eqs.size(); ++k) {
    EXPECT_EQ(arr[k]["label"], eqs[k].label);
    EXPECT_EQ(from_json(arr[k]["residual"], 2), eqs[k].residual);
  }
  for (const char* sys : {"ch", "qiao", "bcbs", "bmcbs", "msys", "mcbs-sys", "cbs", "miura"})
    EXPECT_EQ(run(std::string("gen --n 3 --system ") + sys).code, 0) << sys;
}

TEST(Cli, Reduce) {
  CliRun r = run("reduce --system ch --n 2 --expr 'P_{X,T}'");
  ASSERT_EQ(r.code, 0);
  auto ch2 = VarSpace::ch(2);
  auto sys = standard_system(StandardSystem::CH, 2);
  RatExpr got = parse(r.out.substr(0, r.out.find('\n')), ch2);
  EXPECT_TRUE(is_zero(got - reduce(sys, parse("P_{X,T}", ch2))));
  CliRun s = run("reduce --system ch --n 2 --expr 'P_{X,T}' --shuffle --seed 5");
  ASSERT_EQ(s.code, 0);
  EXPECT_TRUE(is_zero(parse(s.out.substr(0, s.out.find('\n')), ch2) - got));
}

TEST(Cli, Eval) {
  CliRun r = run("eval --space ch --n 1 --expr 'P^2' --points 3 --seed 4");
  ASSERT_EQ(r.code, 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(run("eval --space ch --n 1 --expr 'P^2' --points 3 --seed 4").out, r.out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("gen --system ch --n 0").code, 2);
  EXPECT_EQ(run("gen --system nope --n 2").code, 2);
  EXPECT_EQ(run("verify --claim C42").code, 2);
  EXPECT_EQ(run("reduce --system ch --n 2 --expr 'P_{Y}'").code, 2);
  EXPECT_EQ(run("verify --claim C9 --n-max 1").code, 0);
  EXPECT_EQ(run("--term-cap 5 verify --claim C2 --n-max 2").code, 3);
  EXPECT_EQ(run("--step-cap 1 reduce --system ch --n 2 --expr 'P_{T,T}'").code, 3);
}

TEST(Cli, VerifyReportFile) {
  auto dir = std::filesystem::temp_directory_path() / ("mrt_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  CliRun a = run("verify --claim all --n-max 2 --report " + (dir / "a.json").string());
  CliRun b = run("verify --claim all --n-max 2 --jobs 1 --report " + (dir / "b.json").string());
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(b.code, 0);
  std::string ja = slurp(dir / "a.json"), jb = slurp(dir / "b.json");
  EXPECT_FALSE(ja.empty());
  EXPECT_EQ(ja, jb);
  auto arr = nlohmann::json::parse(ja);
  EXPECT_EQ(arr.size(), 18u);
  for (const auto& r : arr) EXPECT_EQ(r["status"], "pass") << r["claim"] << " " << r["n"];
  std::filesystem::remove_all(dir);
}
