#include <gtest/gtest.h>

#include "tmkit/dsl/dsl.hpp"
#include "tmkit/fixtures/fixtures.hpp"
#include "tmkit/harness/harness.hpp"

namespace tmkit {
namespace {

std::map<std::string, std::pair<std::size_t, std::size_t>> counts(const std::string& fixture) {
  const auto f = load_fixture(fixture);
  EXPECT_TRUE(f.has_value()) << f.error();
  std::map<std::string, std::pair<std::size_t, std::size_t>> out;
  if (!f) return out;
  const auto reports = run_scenarios((*f)->model, (*f)->behavior, (*f)->carving, (*f)->scenarios);
  EXPECT_TRUE(reports.has_value()) << reports.error();
  if (!reports) return out;
  for (const auto& r : *reports) out[r.scenario] = {r.cases_passed, r.cases_total};
  return out;
}

using Counts = std::map<std::string, std::pair<std::size_t, std::size_t>>;

TEST(Scenarios, Vending) {
  // 10 prices; 19 distinct sums of one to five 25/50/100 coins
  EXPECT_EQ(counts("vending"), (Counts{{"coins", {55, 55}}, {"drinks", {10, 10}}, {"outputs", {190, 190}}}));
}

TEST(Scenarios, FaultyChangeFailsOnlyOutputs) {
  const auto c = counts("vending-faulty-change");
  EXPECT_EQ(c.at("coins"), (std::pair<std::size_t, std::size_t>{55, 55}));
  EXPECT_EQ(c.at("drinks"), (std::pair<std::size_t, std::size_t>{10, 10}));
  EXPECT_EQ(c.at("outputs").second, 190u);
  EXPECT_LT(c.at("outputs").first, 190u);
}

TEST(Scenarios, Shopping) {
  EXPECT_EQ(counts("shopping"), (Counts{{"checkout", {24, 24}}, {"login", {3, 3}}, {"registration", {3, 3}}}));
}

TEST(Scenarios, MissingAccountGuardLoopsForever) {
  const auto c = counts("shopping-no-account-guard");
  EXPECT_EQ(c.at("unknown_login"), (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(Scenarios, FailuresCarryAnExcerptOfTheTarget) {
  const auto f = load_fixture("vending-faulty-change");
  ASSERT_TRUE(f.has_value());
  const auto reports = run_scenarios((*f)->model, (*f)->behavior, (*f)->carving, (*f)->scenarios);
  ASSERT_TRUE(reports.has_value());
  const auto* se3 = (*f)->carving.owner_of("E13");
  ASSERT_NE(se3, nullptr);
  for (const auto& r : *reports) {
    if (r.scenario != "outputs") continue;
    ASSERT_FALSE(r.failures.empty());
    const auto& fail = r.failures.front();
    EXPECT_NE(fail.assertion.find("change_new"), std::string::npos);
    EXPECT_NE(fail.expected, fail.observed);
    EXPECT_FALSE(fail.excerpt.empty());
    EXPECT_LE(fail.excerpt.size(), 60u);
  }
}

TEST(Chain, EmptyUpstreamGivesNoCasesAndANotice) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const Scenario* outputs = nullptr;
  for (const auto& s : (*f)->scenarios) {
    if (s.name == "outputs") outputs = &s;
  }
  ASSERT_NE(outputs, nullptr);
  ValidationReport drinks;
  drinks.scenario = "drinks";
  drinks.outputs["price"] = {};
  ValidationReport coins;
  coins.scenario = "coins";
  coins.outputs["amount"] = {std::int64_t{100}};
  const auto r = chain_scenarios({drinks, coins}, (*f)->model, (*f)->behavior, (*f)->carving, *outputs);
  ASSERT_TRUE(r.has_value()) << r.error();
  EXPECT_EQ(r->cases_total, 0u);
  EXPECT_TRUE(r->passed());
  ASSERT_FALSE(r->notices.empty());
  EXPECT_NE(r->notices.front().find("drinks.price"), std::string::npos);
}

TEST(Chain, SingletonTimesSingletonIsOneCase) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const Scenario* outputs = nullptr;
  for (const auto& s : (*f)->scenarios) {
    if (s.name == "outputs") outputs = &s;
  }
  ASSERT_NE(outputs, nullptr);
  ValidationReport drinks;
  drinks.scenario = "drinks";
  drinks.outputs["price"] = {std::int64_t{75}};
  ValidationReport coins;
  coins.scenario = "coins";
  coins.outputs["amount"] = {std::int64_t{100}};
  const auto r = chain_scenarios({drinks, coins}, (*f)->model, (*f)->behavior, (*f)->carving, *outputs);
  ASSERT_TRUE(r.has_value()) << r.error();
  EXPECT_EQ(r->cases_total, 1u);
  EXPECT_EQ(r->cases_passed, 1u);
}

TEST(Report, JsonIsStable) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const auto a = run_scenarios((*f)->model, (*f)->behavior, (*f)->carving, (*f)->scenarios);
  const auto b = run_scenarios((*f)->model, (*f)->behavior, (*f)->carving, (*f)->scenarios);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(report_json(*a), report_json(*b));
  EXPECT_EQ(report_json(*a).find("wall"), std::string::npos);
  EXPECT_NE(report_text(a->front()).find("passed"), std::string::npos);
}

TEST(Report, UnknownTargetIsAnError) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  Scenario s;
  s.name = "x";
  s.target = "SE9";
  EXPECT_FALSE(run_scenario((*f)->model, (*f)->behavior, (*f)->carving, s).has_value());
}

}  // namespace
}  // namespace tmkit
