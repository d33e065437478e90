#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {
struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(HOA_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hoa_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int count_lines_with(const std::string& text, const std::string& needle) {
  int n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) n += line.find(needle) != std::string::npos;
  return n;
}
}  // namespace

TEST(Eval, BinomialFirstOrder) {
  const CliRun r = run("eval --state binomial --p 0.5 --M 10 --l 1");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["d"].get<double>(), -2.5, 1e-12);
  EXPECT_EQ(j["classification"], "antibunched");
  EXPECT_EQ(j["state"], "binomial");
}

TEST(Eval, CoherentPacs) {
  const CliRun r = run("eval --state pacs --alpha 1 --m 0 --l 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["classification"], "coherent");
}

TEST(Eval, LeeCriterionAndZeroTol) {
  const CliRun r = run("eval --state hs --M 6 --eta 0.3 --L min --l 3 --lee-m 2");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["lm"], json::array({3, 2}));
  EXPECT_TRUE(j["R"].is_number());
  EXPECT_EQ(run("eval --state binomial --p 0.5 --M 10 --l 1 --zero-tol 100").out.find("coherent") != std::string::npos, true);
}

TEST(Eval, ExitCodes) {
  EXPECT_EQ(run("eval --state binomial --p 0.5 --M 2 --l 5").code, 2);
  EXPECT_EQ(run("eval --state hs --L 3 --M 2 --eta 0.5 --l 1").code, 2);
  EXPECT_EQ(run("eval --state binomial --p 1.5 --M 4 --l 1").code, 2);
  EXPECT_EQ(run("eval --state pacs --alpha 40 --m 1 --l 2").code, 3);
  EXPECT_EQ(run("eval --state squeezed --l 1").code, 1);
  EXPECT_EQ(run("eval --state binomial --eta 0.5 --l 1").code, 1);
  EXPECT_EQ(run("eval --state binomial --p 0.5 --M 4").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("bogus").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Pnd, CsvAndJson) {
  const CliRun csv = run("pnd --state rbs --N 2 --format csv");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out, "n,probability\n0,0.40000000000000002\n1,0.20000000000000001\n2,0.40000000000000002\n");
  const CliRun js = run("pnd --state nbs --eta 0.5 --M 1");
  ASSERT_EQ(js.code, 0);
  const json j = json::parse(js.out);
  EXPECT_EQ(j["n_min"], 1);
  EXPECT_EQ(j["truncated"], true);
  EXPECT_EQ(j["probs"][0], 0.25);
}

TEST(Crosscheck, BinomialAgrees) {
  const CliRun r = run("crosscheck --state binomial --lmax 5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("state,params,l,d_oracle,d_closed,abs_dev,rel_dev,agree,note\n", 0), 0u);
  EXPECT_EQ(count_lines_with(r.out, ",false,"), 0);
  EXPECT_GT(count_lines_with(r.out, ",true,"), 0);
}

TEST(Crosscheck, HypergeometricAgrees) {
  const CliRun r = run("crosscheck --state hs --lmax 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines_with(r.out, ",false,"), 0);
}

TEST(Crosscheck, GeometricDisagreesWithNote) {
  const auto path = scratch("gs.csv");
  const CliRun r = run("crosscheck --state geometric --lmax 3 --out " + path.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("disagree"), std::string::npos);  // summary line
  const std::string csv = slurp(path);
  EXPECT_EQ(count_lines_with(csv, ",false,"), 9);
  EXPECT_EQ(count_lines_with(csv, "ordering"), 9);
}

TEST(Crosscheck, SinglePointWhenParamsGiven) {
  const CliRun r = run("crosscheck --state geometric --eta 0.5 --lmax 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines_with(r.out, "geometric,"), 2);
  EXPECT_EQ(count_lines_with(r.out, "geometric,eta=0.5,2,5,-5,"), 1);
  EXPECT_EQ(run("crosscheck --state binomial --p 0.5 --M 3 --lmax 3").code, 2);
}

TEST(Crosscheck, NeedsExactlyOneSelector) {
  EXPECT_EQ(run("crosscheck").code, 1);
  EXPECT_EQ(run("crosscheck --all --state binomial").code, 1);
  const CliRun r = run("crosscheck --all --format json");
  ASSERT_EQ(r.code, 0);
  EXPECT_GT(json::parse(r.out)["rows"].size(), 100u);
}

TEST(Figure, Fig9Columns) {
  const CliRun r = run("figure fig9");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "alpha,10*d_3,d_4,status");
}

TEST(Figure, DeterministicFiles) {
  const auto a = scratch("fig1_a.csv");
  const auto b = scratch("fig1_b.csv");
  ASSERT_EQ(run("figure fig1 --out " + a.string()).code, 0);
  ASSERT_EQ(run("figure fig1 --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST(Figure, OracleAndOverrides) {
  const CliRun r = run("figure fig6 --oracle --axis eta=0.5:0.9:3 --format json");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["method"], "oracle");
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(run("figure fig12").code, 1);
  EXPECT_EQ(run("figure fig6 --axis nope=1:2:3").code, 2);
}

TEST(Mc, DeterministicAndDegenerate) {
  const auto a = scratch("mc_a.json");
  const auto b = scratch("mc_b.json");
  const std::string args = "mc --state binomial --p 0.5 --M 10 --l 1 --samples 200000 --seed 17 --out ";
  ASSERT_EQ(run(args + a.string()).code, 0);
  ASSERT_EQ(run(args + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const json j = json::parse(slurp(a));
  EXPECT_EQ(j["d_exact"], -2.5);
  EXPECT_LT(std::abs(j["d_hat"].get<double>() + 2.5), 4 * j["stderr"].get<double>());

  const CliRun vac = run("mc --state binomial --p 0 --M 3 --l 2 --samples 1000");
  ASSERT_EQ(vac.code, 0);
  const json v = json::parse(vac.out);
  EXPECT_EQ(v["d_hat"], 0.0);
  EXPECT_EQ(v["degenerate"], true);
}

TEST(Sweep, ConfigFile) {
  const std::string cfg = std::string(HOA_SOURCE_DIR) + "/configs/bs_agreement.json";
  const CliRun r = run("sweep " + cfg);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "p,M,l,d_oracle,d_closed,abs_dev,rel_dev,agree,A,R_m1,classification,status");
  EXPECT_EQ(count_lines_with(r.out, ",true,"), 4);
  EXPECT_EQ(run("sweep /nonexistent.json").code, 1);
  const CliRun js = run("sweep " + std::string(HOA_SOURCE_DIR) + "/configs/hs_minimal_L.json");
  ASSERT_EQ(js.code, 0);
  EXPECT_EQ(json::parse(js.out)["rows"].size(), 27u);
}
