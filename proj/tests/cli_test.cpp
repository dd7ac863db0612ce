#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct outcome {
  int status = -1;
  std::string output;
};

outcome cli(const std::string& args) {
  const std::string cmd = std::string(BEAMLAB_CLI_PATH) + " " + args + " 2>&1";
  outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.output.append(buf.data(), n);
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

std::string digest_line(const std::string& output) {
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("trace digest", 0) == 0) return line;
  return {};
}

fs::path scratch(const std::string& leaf) {
  const auto dir = fs::temp_directory_path() / ("beamlab_cli_test_" + std::to_string(::getpid())) / leaf;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Cli, calibrate_prints_tx_constant) {
  const auto o = cli("calibrate --rsrp -53 --dist 3 --freq 27.533e9");
  EXPECT_EQ(o.status, 0);
  EXPECT_NE(o.output.find("17.78"), std::string::npos) << o.output;
  const auto four = cli("calibrate --rsrp -53 --dist 4");
  EXPECT_NE(four.output.find("20.28"), std::string::npos) << four.output;
}

TEST(Cli, usage_errors_exit_2) {
  EXPECT_EQ(cli("calibrate --rsrp -53 --dist 3 --bogus").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
  EXPECT_EQ(cli("").status, 2);
  const auto missing = cli("run /nonexistent/scenario.json --out " + scratch("missing").string());
  EXPECT_EQ(missing.status, 2);
  EXPECT_FALSE(missing.output.empty());
}

TEST(Cli, verify_sweep_passes) {
  const auto o = cli("verify-sweep");
  EXPECT_EQ(o.status, 0) << o.output;
  EXPECT_EQ(o.output.find("FAIL"), std::string::npos) << o.output;
  EXPECT_NE(o.output.find("PASS"), std::string::npos);
}

TEST(Cli, run_writes_trace_and_summary) {
  const auto dir = scratch("run");
  const auto o = cli("run demo_berlin --seed 7 --out " + dir.string());
  ASSERT_EQ(o.status, 0) << o.output;
  ASSERT_TRUE(fs::exists(dir / "demo_berlin.trace.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "demo_berlin.summary.json"));
  std::ifstream trace(dir / "demo_berlin.trace.jsonl");
  long lines = 0;
  for (std::string l; std::getline(trace, l);) ++lines;
  EXPECT_EQ(lines, 3000);

  const auto baseline = cli("run demo_berlin --seed 7 --no-manager --out " + dir.string());
  EXPECT_EQ(baseline.status, 0);
  EXPECT_TRUE(fs::exists(dir / "demo_berlin.fixed.trace.jsonl"));
  EXPECT_NE(baseline.output.find("fixed LOS beam"), std::string::npos);
}

TEST(Cli, same_seed_same_digest) {
  const auto a = cli("run demo_berlin --seed 11 --out " + scratch("a").string());
  const auto b = cli("run demo_berlin --seed 11 --out " + scratch("b").string());
  ASSERT_EQ(a.status, 0);
  ASSERT_EQ(b.status, 0);
  EXPECT_FALSE(digest_line(a.output).empty());
  EXPECT_EQ(digest_line(a.output), digest_line(b.output));
}
