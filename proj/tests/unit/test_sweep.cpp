#include <gtest/gtest.h>

#include <cmath>

#include "gencap/error.hpp"
#include "gencap/sweep.hpp"

using namespace gencap;

namespace {

Json small_config() {
  return Json::parse(R"({
    "target": {"type": "uniform_cube", "d": 1},
    "p": 1, "q": 10,
    "budgets": [[8, 6], [8, 2], {"W": 8, "L": 4}],
    "mc": {"batch_a": 400, "batch_b": 400, "reps": 3},
    "target_samples": 2000,
    "seed": 3
  })");
}

std::string invalid_message(const Json& j) {
  try {
    parse_sweep_config(j, "cfg.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    return e.what();
  }
  ADD_FAILURE() << "config accepted";
  return {};
}

}  // namespace

TEST(SweepConfig, ParsesAndSortsBudgets) {
  auto cfg = parse_sweep_config(small_config());
  ASSERT_EQ(cfg.budgets.size(), 3u);
  EXPECT_EQ(cfg.budgets[0].L, 2u);
  EXPECT_EQ(cfg.budgets[2].L, 6u);
  EXPECT_EQ(cfg.mc.batch_a, 400u);
  EXPECT_EQ(cfg.mc.reps, 3u);
  EXPECT_EQ(cfg.seed, 3u);
}

TEST(SweepConfig, MissingAndInvalidFieldsAreNamed) {
  for (const char* field : {"p", "q", "budgets", "target"}) {
    auto j = small_config();
    j.erase(field);
    const auto msg = invalid_message(j);
    EXPECT_NE(msg.find("cfg.json"), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::string("'") + field + "'"), std::string::npos) << msg;
  }
  auto tiny = small_config();
  tiny["budgets"] = Json::parse("[[7, 2]]");
  EXPECT_NE(invalid_message(tiny).find("'budgets[0]'"), std::string::npos);
  auto reps = small_config();
  reps["mc"]["reps"] = 2;
  EXPECT_NE(invalid_message(reps).find("reps"), std::string::npos);
  auto pq = small_config();
  pq["q"] = 0.5;
  EXPECT_NE(invalid_message(pq).find("'q'"), std::string::npos);
}

TEST(SweepConfig, NormalizedRoundTrip) {
  auto cfg = parse_sweep_config(small_config());
  const auto norm = sweep_config_to_json(cfg);
  EXPECT_EQ(sweep_config_to_json(parse_sweep_config(norm)), norm);
}

TEST(SweepCsv, RoundTrip) {
  std::vector<SweepRow> rows{{8, 2, 5, 5, 0.125, 0.01, 1e-3, 1.5},
                             {15, 4, 14, 13, 1.0 / 3.0, 2.0 / 7.0, 1e-5, 0.25},
                             {22, 6, 47, 0, NAN, NAN, NAN, 0.0}};
  auto text = format_sweep_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kSweepCsvHeader);
  auto back = parse_sweep_csv(text);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_TRUE(same_row(rows[i], back[i]));
  EXPECT_THROW(parse_sweep_csv("W,L\n1,2\n"), Error);
  EXPECT_THROW(parse_sweep_csv(std::string(kSweepCsvHeader) + "\n8,2,5,5,x,0,0,0\n"), Error);
}

TEST(SlopeFit, RecoversPowerLawAndDropsSmallest) {
  std::vector<SweepRow> rows;
  for (std::size_t L : {2, 4, 8, 16, 32}) {
    SweepRow r{15, L, 0, 0, 0.0, 0.0, 0.0, 0.0};
    r.wp = 3.0 * std::pow(r.complexity(), -0.5);
    rows.push_back(r);
  }
  rows[0].wp *= 10.0;  // an outlier at the smallest budget must not matter
  auto fit = fit_slope(rows);
  EXPECT_TRUE(fit.defined);
  EXPECT_EQ(fit.used, 4u);
  EXPECT_NEAR(fit.slope, -0.5, 1e-12);
  EXPECT_FALSE(fit_slope({rows[1]}).defined);
}

TEST(RateSweep, DeterministicAndConsistent) {
  auto cfg = parse_sweep_config(small_config());
  auto a = rate_sweep(cfg);
  auto b = rate_sweep(cfg);
  ASSERT_EQ(a.rows.size(), 3u);
  EXPECT_FALSE(a.any_failed());
  EXPECT_EQ(format_sweep_csv(a.rows).size() > 0, true);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& r = a.rows[i];
    EXPECT_TRUE(same_row(r, b.rows[i], false));
    EXPECT_EQ(r.capacity, budget_max_atoms({r.W, r.L, 1}));
    EXPECT_LE(r.atoms, r.capacity);
    EXPECT_GE(r.wp, 0.0);
    EXPECT_GE(r.ci, 0.0);
  }
  EXPECT_GT(a.rows.front().wp, a.rows.back().wp);
}

TEST(RateSweep, SingleAtomTarget) {
  auto j = small_config();
  j["target"] = Json::parse(R"({"type":"discrete","atoms":[[0.25]],"weights":[1]})");
  auto res = rate_sweep(parse_sweep_config(j));
  for (const auto& r : res.rows) {
    EXPECT_EQ(r.atoms, 1u);
    EXPECT_NEAR(r.wp, 0.0, 1e-12);
  }
  EXPECT_FALSE(res.fit.defined);
}

TEST(RateSweep, FailedRowIsRecorded) {
  // Three million target samples against a generator with at least eight
  // atoms exceed the exact solver's cost-matrix limit. The failure is kept
  // per row and the sweep still returns a full table.
  auto j = Json::parse(R"({
    "target": {"type": "uniform_cube", "d": 2},
    "p": 1, "q": 10,
    "budgets": [[15, 2], [15, 4]],
    "mc": {"batch_a": 3000000, "batch_b": 500, "reps": 3},
    "target_samples": 2000
  })");
  auto res = rate_sweep(parse_sweep_config(j));
  ASSERT_EQ(res.rows.size(), 2u);
  ASSERT_EQ(res.errors.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_FALSE(res.rows[i].ok());
    EXPECT_TRUE(std::isnan(res.rows[i].wp));
    EXPECT_EQ(res.rows[i].capacity, budget_max_atoms({15, res.rows[i].L, 2}));
    EXPECT_NE(res.errors[i].find("SizeLimit"), std::string::npos) << res.errors[i];
  }
  EXPECT_TRUE(res.any_failed());
  EXPECT_FALSE(res.fit.defined);
}

TEST(SweepConfig, ZeroTargetSamplesRejected) {
  auto j = small_config();
  j["target_samples"] = 0;
  EXPECT_NE(invalid_message(j).find("'target_samples'"), std::string::npos);
}

TEST(CircleDemo, JsIsLn2AndW1Shrinks) {
  CircleDemoOptions opt;
  opt.target_samples = 3000;
  opt.mc = {2000, 2000, 3, 1e-7};
  opt.support_samples = 500;
  auto rows = circle_fdiv_demo({{15, 2, 2}, {15, 8, 2}}, 1, opt);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(r.js, std::log(2.0));
  }
  EXPECT_GT(rows[0].w1, rows[1].w1);
  auto csv = format_circle_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "W,L,complexity,atoms,w1,ci,js");
}
