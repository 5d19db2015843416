#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gencap/json_io.hpp"
#include "gencap/sweep.hpp"

#ifndef GENCAP_CLI_PATH
#error "GENCAP_CLI_PATH must point at the gencap executable"
#endif

namespace fs = std::filesystem;
using gencap::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "gencap_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto out = work_dir() / "stdout.txt", err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + GENCAP_CLI_PATH + "\" " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = work_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string strip_seconds(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << '\n';
  return out.str();
}

const char* kSweep = R"({
  "target": {"type": "uniform_cube", "d": 1},
  "p": 1, "q": 10,
  "budgets": [[8, 2], [8, 4]],
  "mc": {"batch_a": 300, "batch_b": 300, "reps": 3},
  "target_samples": 1000,
  "seed": 5
})";

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("wasserstein --a only.json").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, MissingFieldNamed) {
  auto j = Json::parse(kSweep);
  j.erase("p");
  const auto cfg = write("no_p.json", j.dump());
  const auto r = run("rate-sweep --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("field 'p'"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("no_p.json"), std::string::npos) << r.err;
}

TEST(Cli, RateSweepDeterministic) {
  const auto cfg = write("sweep.json", kSweep);
  const auto a = run("rate-sweep --config " + cfg.string());
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), gencap::kSweepCsvHeader);
  const auto csv = work_dir() / "sweep.csv";
  const auto b = run("rate-sweep --config " + cfg.string() + " --out " + csv.string());
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(strip_seconds(slurp(csv)), strip_seconds(a.out));
  const auto rows = gencap::parse_sweep_csv(a.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].capacity, 5u);
  const auto summary = Json::parse(a.err);
  EXPECT_EQ(summary["rows"], 2);

  const auto c = run("rate-sweep --config " + cfg.string() + " --seed 6");
  EXPECT_NE(strip_seconds(c.out), strip_seconds(a.out));
}

TEST(Cli, DiscretizeSynthesizeAndMeasure) {
  const auto target = write("cube.json", R"({"type":"uniform_cube","d":2})");
  const auto measure = work_dir() / "measure.json";
  auto r = run("discretize --target " + target.string() + " --n 6 --samples 2000 --seed 7 --out " + measure.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto mu = gencap::measure_from_json(gencap::read_json_file(measure));
  EXPECT_LE(mu.size(), 6u);

  const auto net = work_dir() / "net.json";
  r = run("synthesize --target " + measure.string() + " --width 15 --depth 4 --out " + net.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cert = Json::parse(r.out);
  EXPECT_EQ(cert["n_atoms"], mu.size());
  EXPECT_LE(cert["mass_check_max_abs_err"].get<double>(), 1e-10);
  const auto network = gencap::network_from_json(gencap::read_json_file(net));
  EXPECT_LE(network.width(), 15u);
  EXPECT_LE(network.depth(), 4u);

  r = run("synthesize --target " + measure.string() + " --width 15 --depth 4 --eps 100 --out " + net.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InfeasibleEpsilon"), std::string::npos);
  r = run("synthesize --target " + target.string() + " --width 15 --depth 4 --out " + net.string());
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, WassersteinAndDivergence) {
  const auto a = write("a.json", R"({"type":"discrete","atoms":[[0],[1]],"weights":[1,1]})");
  const auto b = write("b.json", R"({"type":"discrete","atoms":[[0.5]],"weights":[1]})");
  auto r = run("wasserstein --a " + a.string() + " --b " + b.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.5, 1e-15);
  EXPECT_EQ(j["plan_nnz"], 2);
  r = run("fdiv --a " + a.string() + " --b " + b.string() + " --gen js");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["value"].get<double>(), std::log(2.0));
  r = run("fdiv --a " + a.string() + " --b " + b.string() + " --gen kl");
  EXPECT_EQ(Json::parse(r.out)["value"], "inf");
  const auto c = write("c.json", R"({"type":"discrete","atoms":[[0,1]],"weights":[1]})");
  EXPECT_EQ(run("wasserstein --a " + a.string() + " --b " + c.string()).code, 2);
  EXPECT_EQ(run("wasserstein --a " + (work_dir() / "nope.json").string() + " --b " + b.string()).code, 2);
}

TEST(Cli, Dimension) {
  const auto target = write("square.json", R"({"type":"uniform_cube","d":2})");
  auto r = run("dimension --target " + target.string() + " --samples 5000 --kind upper --p 2 --seed 3 --grid 0.2,0.1,0.05,0.025");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_NEAR(j["slope"].get<double>(), 2.0, 0.3);
  EXPECT_EQ(j["counts"].size(), 4u);
  EXPECT_EQ(run("dimension --target " + target.string() + " --grid 0.2,0.1").code, 2);
}

TEST(Cli, CircleDemo) {
  auto r = run("circle-demo --budgets 15x2,15x6 --seed 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto header = r.out.substr(0, r.out.find('\n'));
  EXPECT_EQ(header, "W,L,complexity,atoms,w1,ci,js");
  EXPECT_EQ(run("circle-demo --budgets 15by2").code, 2);
}
