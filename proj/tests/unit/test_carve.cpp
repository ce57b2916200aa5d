#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "carve_oracle.hpp"
#include "random_model.hpp"
#include "tmkit/carve/carve.hpp"
#include "tmkit/core/naming.hpp"
#include "tmkit/fixtures/fixtures.hpp"

namespace tmkit {
namespace {

using testing::as_partition;
using testing::blocks_oracle;
using testing::exhaustive;


BehavioralModel behavior_of(const testing::RandomSystem& sys, std::optional<StaticModel>& keep) {
  keep = *build_model(sys.decl);
  return build_behavior(EventsModel(*keep, sys.events));
}

TEST(AtomicBlocks, MatchOracle) {
  std::mt19937 rng(3);
  for (int round = 0; round < 200; ++round) {
    const auto sys = testing::random_system(rng, {4, 16, 3, 12, round % 2 == 0});
    std::optional<StaticModel> m;
    const auto b = behavior_of(sys, m);
    std::set<std::set<std::string>> want;
    for (const auto& s : blocks_oracle(b)) want.insert(s);
    std::set<std::set<std::string>> got;
    for (const auto& s : atomic_blocks(b)) got.insert({s.begin(), s.end()});
    EXPECT_EQ(got, want) << round;
  }
}

TEST(CarveAuto, MatchesExhaustiveEnumeration) {
  std::mt19937 rng(17);
  int checked = 0;
  for (int round = 0; checked < 150 && round < 5000; ++round) {
    const auto sys = testing::random_system(rng, {4, 16, 3, 12, round % 2 == 0});
    if (sys.events.size() > 12) continue;
    std::optional<StaticModel> m;
    const auto b = behavior_of(sys, m);
    const std::size_t n = blocks_oracle(b).size();
    const auto limit = static_cast<std::size_t>(testing::pick(rng, 1, static_cast<int>(n)));
    const auto c = carve_auto(b, limit);
    EXPECT_EQ(as_partition(c.super_events), exhaustive(b, limit)) << "round " << round << " limit " << limit;
    const auto manual = carve_manual(b, c.super_events);
    EXPECT_TRUE(manual.has_value()) << round;
    ++checked;
  }
  EXPECT_EQ(checked, 150);
}

TEST(CarveAuto, DefaultCutsAtEveryJoint) {
  std::mt19937 rng(23);
  for (int round = 0; round < 50; ++round) {
    const auto sys = testing::random_system(rng);
    std::optional<StaticModel> m;
    const auto b = behavior_of(sys, m);
    EXPECT_EQ(carve_auto(b).super_events.size(), atomic_blocks(b).size());
  }
}

TEST(CarveAuto, FixturesReproduceTheirGroups) {
  for (const auto& [name, parts] : {std::pair<std::string, std::size_t>{"vending", 3}, {"shopping", 5}}) {
    const auto f = load_fixture(name);
    ASSERT_TRUE(f.has_value()) << f.error();
    const auto c = carve_auto((*f)->behavior, parts);
    EXPECT_EQ(as_partition(c.super_events), as_partition((*f)->carving.super_events)) << name;
    EXPECT_EQ((*f)->carving.super_events.size(), parts);
  }
}

TEST(CarveManual, JointsAreExactlyTheCrossEdges) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const auto& c = (*f)->carving;
  std::size_t cross = 0;
  for (const auto& e : (*f)->behavior.edges) {
    if (c.owner_of(e.from) != c.owner_of(e.to)) {
      ++cross;
      EXPECT_NE(e.kind, JointKind::internal);
    }
  }
  EXPECT_EQ(c.joints.size(), cross);
}

std::vector<std::string> manual_codes(const BehavioralModel& b, const std::vector<SuperEvent>& g) {
  const auto r = carve_manual(b, g);
  std::vector<std::string> out;
  if (!r) {
    for (const auto& d : r.error()) out.push_back(d.code);
  }
  return out;
}

TEST(CarveManual, Errors) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const auto& b = (*f)->behavior;
  std::vector<std::string> rest;
  for (int i = 10; i <= 22; ++i) rest.push_back("E" + std::to_string(i));

  // E1 and E2 are joined by an internal flow
  auto cs = manual_codes(b, {{"A", {"E1"}}, {"B", {"E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9"}}, {"C", rest}});
  EXPECT_NE(std::find(cs.begin(), cs.end(), "joint is not a transfer/trigger"), cs.end());

  cs = manual_codes(b, {{"A", {"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E99"}}, {"A", rest}, {"Z", {}}});
  for (const char* want : {"unknown event", "duplicate super-event", "empty super-event"}) {
    EXPECT_NE(std::find(cs.begin(), cs.end(), want), cs.end()) << want;
  }

  cs = manual_codes(b, {{"A", {"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E10"}}, {"B", rest}});
  EXPECT_NE(std::find(cs.begin(), cs.end(), "overlapping super-events"), cs.end());

  cs = manual_codes(b, {{"A", {"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9"}}});
  EXPECT_NE(std::find(cs.begin(), cs.end(), "ungrouped event"), cs.end());

  cs = manual_codes(b, {{"A", {"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E22"}},
                        {"B", std::vector<std::string>(rest.begin(), rest.end() - 1)}});
  EXPECT_NE(std::find(cs.begin(), cs.end(), "disconnected super-event"), cs.end());
}

TEST(Contract, SuperEventsBecomeNodes) {
  const auto f = load_fixture("vending");
  ASSERT_TRUE(f.has_value());
  const auto c = contract((*f)->behavior, (*f)->carving);
  EXPECT_EQ(c.events.size(), 3u);
  EXPECT_EQ(c.edges.size(), (*f)->carving.joints.size());
}

}  // namespace
}  // namespace tmkit
