#include <gtest/gtest.h>

#include <random>

#include "scenario_traces.hpp"
#include "trace_mutation.hpp"
#include "tmkit/sim/conformance.hpp"

namespace tmkit {
namespace {

class Conformance : public ::testing::TestWithParam<std::string> {};

TEST_P(Conformance, EverySimulatedTraceIsAccepted) {
  const auto f = load_fixture(GetParam());
  ASSERT_TRUE(f.has_value()) << f.error();
  for (const auto& run : testing::scenario_runs(**f)) {
    const auto r = conforms(run.result.trace, (*f)->behavior);
    ASSERT_TRUE(r.has_value()) << r.error();
    EXPECT_TRUE(r->conformant) << run.scenario << " " << to_string(run.binding) << ": "
                               << (r->violations.empty() ? "" : r->violations[0].message);
  }
}

TEST_P(Conformance, SwappedCausalPairsAreRejected) {
  const auto f = load_fixture(GetParam());
  ASSERT_TRUE(f.has_value());
  const auto& b = (*f)->behavior;
  const auto runs = testing::scenario_runs(**f);
  std::mt19937 rng(99);
  int rejected = 0;
  for (int attempt = 0; rejected < 50 && attempt < 1000; ++attempt) {
    const auto& run = runs[std::uniform_int_distribution<std::size_t>(0, runs.size() - 1)(rng)];
    const auto bad = testing::swap_with_producer(run.result.trace, rng);
    if (!bad) continue;
    const auto r = conforms(*bad, b);
    ASSERT_TRUE(r.has_value()) << r.error();
    ASSERT_FALSE(r->conformant) << run.scenario << " " << to_string(run.binding);
    ASSERT_FALSE(r->violations.empty());
    const auto& v = r->violations.front();
    EXPECT_FALSE(v.event.empty());
    EXPECT_EQ(v.event, event_of(b, v.node));
    ++rejected;
  }
  EXPECT_EQ(rejected, 50);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, Conformance, ::testing::Values("vending", "shopping"));

TEST(ConformanceSeq, EventSequenceCollapsesRepeats) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const auto runs = testing::scenario_runs(**f);
  ASSERT_FALSE(runs.empty());
  const auto r = conforms(runs.front().result.trace, (*f)->behavior);
  ASSERT_TRUE(r.has_value());
  ASSERT_FALSE(r->event_sequence.empty());
  for (std::size_t i = 1; i < r->event_sequence.size(); ++i) {
    EXPECT_NE(r->event_sequence[i - 1], r->event_sequence[i]);
  }
}

TEST(ConformanceSeq, UnmappedNodeIsAnError) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  Trace t;
  t.firings.push_back({1, "ghost", {}, {}, {}, {}, {}});
  const auto r = conforms(t, (*f)->behavior);
  ASSERT_FALSE(r.has_value());
  EXPECT_NE(r.error().find("unmapped node"), std::string::npos);
}

TEST(ConformanceSeq, SharedTransferMapsUpstream) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const auto& b = (*f)->behavior;
  EXPECT_EQ(event_of(b, "sel_new"), "E1");
  EXPECT_EQ(event_of(b, "nowhere"), "");
}

}  // namespace
}  // namespace tmkit
