#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("unilab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliRun cli(const std::string& args) {
  const auto capture = work_dir() / "stdout.txt";
  const std::string cmd = std::string(UNILAB_CLI) + " " + args + " > " + capture.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream is(capture);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& j) {
  const auto p = work_dir() / name;
  std::ofstream(p) << j.dump();
  return p;
}

}  // namespace

TEST(Cli, ZetaAtTwo) {
  const auto r = cli("zeta --sigma 2 --t 0 --out " + (work_dir() / "z").string());
  ASSERT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  const double v = j["points"][0]["zeta"][0].get<double>();
  EXPECT_NEAR(v, std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
  EXPECT_TRUE(fs::exists(work_dir() / "z" / "zeta.csv"));
  EXPECT_TRUE(fs::exists(work_dir() / "z" / "zeta.config.json"));
  EXPECT_TRUE(fs::exists(work_dir() / "z" / "zeta.meta.json"));
}

TEST(Cli, ExitCodes) {
  const auto out = (work_dir() / "e").string();
  EXPECT_EQ(cli("zeta --sigma 1 --t 0 --out " + out).status, 2);
  const auto err = json::parse(slurp(work_dir() / "e" / "zeta.error.json"));
  EXPECT_EQ(err["error"]["code"], "PoleAtOne");
  EXPECT_EQ(cli("bs-check --config " + write_config("bad.json", {{"bogus", 1}}).string() + " --out " + out).status, 1);
  EXPECT_EQ(cli("charfun --config " + write_config("cap.json", {{"u_max", 9.0}}).string() + " --out " + out).status, 1);
  EXPECT_EQ(cli("nonsense").status, 1);
  EXPECT_EQ(cli("zeta --config /nonexistent/x.json --out " + out).status, 1);
}

TEST(Cli, BsCheckDefaultPasses) {
  const auto r = cli("bs-check --out " + (work_dir() / "bs").string());
  ASSERT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["all_passed"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 8u);
}

TEST(Cli, ScanReproducibleAcrossThreads) {
  const auto cfg = write_config("scan.json", {{"T", 800},
                                              {"step", 0.9},
                                              {"cover", {{"r", 0.05}, {"J", 16}}},
                                              {"run", {{"samples", 600}, {"P", 5000}}},
                                              {"majorant_samples", 16}});
  const auto a = work_dir() / "s1", b = work_dir() / "s8";
  ASSERT_EQ(cli("scan --config " + cfg.string() + " --seed 9 --threads 1 --out " + a.string()).status, 0);
  ASSERT_EQ(cli("scan --config " + cfg.string() + " --seed 9 --threads 8 --out " + b.string()).status, 0);
  for (const char* f : {"scan.json", "scan.csv", "scan.config.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_NE(slurp(a / "scan.meta.json"), slurp(b / "scan.meta.json"));
  const auto rep = json::parse(slurp(a / "scan.json"));
  for (const char* k : {"config", "lhs", "rhs", "diff", "rate_context", "grid_stats"}) EXPECT_TRUE(rep.contains(k)) << k;
  EXPECT_EQ(rep["config"]["run"]["seed"], 9);
}

TEST(Cli, ResolvedConfigRoundTrips) {
  const auto cfg = write_config("disc.json", {{"T", 1000}, {"step", 0.5}, {"samples", 500}, {"P", 5000}});
  const auto a = work_dir() / "d1", b = work_dir() / "d2";
  ASSERT_EQ(cli("discrepancy --config " + cfg.string() + " --out " + a.string()).status, 0);
  ASSERT_EQ(cli("discrepancy --config " + (a / "discrepancy.config.json").string() + " --out " + b.string()).status, 0);
  EXPECT_EQ(json::parse(slurp(a / "discrepancy.config.json")), json::parse(slurp(b / "discrepancy.config.json")));
  EXPECT_EQ(slurp(a / "discrepancy.json"), slurp(b / "discrepancy.json"));
  EXPECT_EQ(slurp(a / "discrepancy.csv"), slurp(b / "discrepancy.csv"));
}

TEST(Cli, EveryCommandRunsOnSmallConfig) {
  const auto small = write_config("small.json", {{"T", 1000}, {"step", 1.0}, {"samples", 300}, {"P", 3000}});
  for (const char* c : {"moments", "charfun", "discrepancy", "deriv-tails"}) {
    const auto r = cli(std::string(c) + " --config " + small.string() + " --out " + (work_dir() / "all").string());
    EXPECT_EQ(r.status, 0) << c;
    EXPECT_NO_THROW(json::parse(r.out)) << c;
  }
  EXPECT_EQ(cli("tables --config " + write_config("t.json", {{"limit", 10000}}).string() + " --out " +
                (work_dir() / "all").string())
                .status,
            0);
}
