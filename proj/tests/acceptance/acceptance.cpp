#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "behavior_oracle.hpp"
#include "carve_oracle.hpp"
#include "random_model.hpp"
#include "scenario_traces.hpp"
#include "tmkit/cli/cli.hpp"
#include "tmkit/dsl/dsl.hpp"
#include "tmkit/sim/conformance.hpp"
#include "trace_mutation.hpp"

using namespace tmkit;

namespace {

using Table = std::vector<std::pair<std::string, std::string>>;

const Table kVendingEvents = {
    {"E1", "The machine receives a drink selection."},
    {"E2", "The selected drink flows to the price-finding module."},
    {"E3", "A record (drink, prices) is retrieved from the list."},
    {"E4", "The selected drink is extracted from the record."},
    {"E5", "The drink is sent for comparison with the input drink."},
    {"E6", "The input drink is compared with the stored drink."},
    {"E7", "The input drink is not the same as the stored drink."},
    {"E8", "The input drink is the same as the stored drink."},
    {"E9", "The price is extracted."},
    {"E10", "The user inputs coins."},
    {"E11", "The amount of the coins' value is calculated."},
    {"E12", "The coins are deposited into the coin boxes."},
    {"E13", "The amount flows to a comparison with the price."},
    {"E14", "The price flows to a comparison with the amount."},
    {"E15", "The amount and the price are compared."},
    {"E16", "The amount is equal to or greater than the price."},
    {"E17", "The coin boxes are processed."},
    {"E18", "The change is extracted from the coin boxes."},
    {"E19", "The change flows to the user."},
    {"E20", "The drink is released to the user."},
    {"E21", "The input amount is less than the price."},
    {"E22", "A message is sent to the user."},
};

const Table kShoppingEvents = {
    {"E1", "A customer registers to log in."},
    {"E2", "The system creates a new login account."},
    {"E3", "The system adds the new account to the accounts file."},
    {"E4", "A customer sends a login request."},
    {"E5", "The system extracts the login account from the request and sends it to be checked as a legal account."},
    {"E6", "The accounts file is processed to retrieve an account, which is sent for comparison with the input account."},
    {"E7", "The input account is compared with the account retrieved from the file."},
    {"E8", "The input account is not the same as the account from the file."},
    {"E9", "The input account is found among the legitimate accounts; hence, a request for the discount code is sent to the customer."},
    {"E10", "The customer sends a discount code (possibly a code for no discount)."},
    {"E11", "The code is sent to find its corresponding discount percentage."},
    {"E12", "The list of codes is processed to retrieve one code at a time."},
    {"E13", "The retrieved code is sent to be processed."},
    {"E14", "The code is compared with the list of codes."},
    {"E15", "The code is found; thus, a request for the payment method is sent to the customer."},
    {"E16", "The customer sends the payment method."},
    {"E17", "The payment method is processed."},
    {"E18", "The payment method is in the branch."},
    {"E19", "The online payment method is chosen."},
    {"E20", "The code is found; thus, the discount percentage is extracted."},
    {"E21", "The price is received."},
    {"E22", "The discount percentage and price are used to calculate the required payment."},
    {"E23", "The payment is used in generating the invoice."},
    {"E24", "The invoice is sent to the branch."},
    {"E25", "The invoice is sent to the online payment system."},
};

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

FixturePtr fixture(const std::string& name) {
  auto f = load_fixture(name);
  if (!f) throw std::runtime_error(f.error());
  return *f;
}

std::map<std::string, ValidationReport> reports(const Fixture& f) {
  const auto rs = run_scenarios(f.model, f.behavior, f.carving, f.scenarios);
  if (!rs) throw std::runtime_error(rs.error());
  std::map<std::string, ValidationReport> out;
  for (const auto& r : *rs) out[r.scenario] = r;
  return out;
}

std::string ratio(const ValidationReport& r) {
  return std::to_string(r.cases_passed) + "/" + std::to_string(r.cases_total);
}

Outcome fixture_exactness() {
  for (const auto& [name, table, parts] : {std::tuple{"vending", &kVendingEvents, std::size_t{3}},
                                          std::tuple{"shopping", &kShoppingEvents, std::size_t{5}}}) {
    const auto f = fixture(name);
    const auto& events = f->events.events();
    if (events.size() != table->size()) return fail(std::string(name) + ": " + std::to_string(events.size()) + " events");
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].name != (*table)[i].first || events[i].description != (*table)[i].second) {
        return fail(std::string(name) + ": " + events[i].name + " description differs");
      }
    }
    if (!validate_events(f->events).empty()) return fail(std::string(name) + ": events invalid");
    if (f->carving.super_events.size() != parts) return fail(std::string(name) + ": wrong super-event count");
  }
  return {true, "vending 22 events / 3 super-events, shopping 25 / 5"};
}

bool joints_legal(const BehavioralModel& b, const Carving& c) {
  for (const auto& e : b.edges) {
    if (c.owner_of(e.from) != c.owner_of(e.to) && e.kind == JointKind::internal) return false;
  }
  return carve_manual(b, c.super_events).has_value();
}

Outcome joint_legality() {
  for (const auto* name : {"vending", "shopping"}) {
    const auto f = fixture(name);
    if (!joints_legal(f->behavior, f->carving)) return fail(std::string(name) + " carving cuts an internal edge");
  }
  std::mt19937 rng(101);
  for (int i = 0; i < 200; ++i) {
    const auto sys = testing::random_system(rng, {4, 18, 3, 12, i % 2 == 0});
    const auto m = build_model(sys.decl);
    if (!m || !check_static(*m).empty()) return fail("random model " + std::to_string(i) + " is illegal");
    const auto b = build_behavior(EventsModel(*m, sys.events));
    const auto n = testing::atomic_blocks_count(b);
    const auto limit = static_cast<std::size_t>(testing::pick(rng, 1, static_cast<int>(n)));
    if (!joints_legal(b, carve_auto(b, limit))) return fail("random model " + std::to_string(i));
  }
  return {true, "2 fixtures, 200 random models"};
}

Outcome behavior_matches_scan() {
  std::mt19937 rng(202);
  int checked = 0;
  for (int round = 0; checked < 200 && round < 10000; ++round) {
    const auto sys = testing::random_system(rng, {4, 16, 3, 12, round % 2 == 0});
    if (sys.events.size() > 12) continue;
    const auto m = build_model(sys.decl);
    const auto b = build_behavior(EventsModel(*m, sys.events));
    if (testing::edge_keys(b) != testing::all_pairs(*m, sys.events)) return fail("model " + std::to_string(round));
    ++checked;
  }
  if (checked < 200) return fail("only " + std::to_string(checked) + " models generated");
  return {true, "200 models with at most 12 events"};
}

Outcome carve_matches_enumeration() {
  std::mt19937 rng(303);
  int checked = 0;
  for (int round = 0; checked < 150 && round < 10000; ++round) {
    const auto sys = testing::random_system(rng, {4, 16, 3, 12, round % 2 == 0});
    if (sys.events.size() > 12) continue;
    const auto m = build_model(sys.decl);
    const auto b = build_behavior(EventsModel(*m, sys.events));
    const auto n = testing::atomic_blocks_count(b);
    const auto limit = static_cast<std::size_t>(testing::pick(rng, 1, static_cast<int>(n)));
    if (testing::as_partition(carve_auto(b, limit).super_events) != testing::exhaustive(b, limit)) {
      return fail("model " + std::to_string(round) + " limit " + std::to_string(limit));
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " models with at most 12 events"};
}

Outcome drinks() {
  const auto r = reports(*fixture("vending")).at("drinks");
  if (r.cases_total != 10 || !r.passed()) return fail(ratio(r));
  return {true, ratio(r)};
}

Outcome coins() {
  const auto f = fixture("vending");
  const auto r = reports(*f).at("coins");
  std::size_t brute = 0;
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      for (int c = 0; a + b + c <= 5; ++c) brute += a + b + c >= 1;
    }
  }
  std::size_t boxes = 0;
  bool sums = false;
  for (const auto& s : f->scenarios) {
    if (s.name != "coins") continue;
    for (const auto& a : s.assertions) {
      boxes += a.kind == Assertion::Kind::store_only;
      for (const auto& [attr, e] : a.with) sums |= e.kind == Expr::Kind::sum;
    }
  }
  if (brute != 55 || r.cases_total != brute || !r.passed()) return fail(ratio(r));
  if (boxes < 3 || !sums) return fail("scenario does not check the sum and every box");
  return {true, ratio(r) + ", brute-force count 55"};
}

Outcome outputs() {
  const auto f = fixture("vending");
  const auto rs = reports(*f);
  const auto& r = rs.at("outputs");
  std::set<std::int64_t> amounts;
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      for (int c = 0; a + b + c <= 5; ++c) {
        if (a + b + c >= 1) amounts.insert(25 * a + 50 * b + 100 * c);
      }
    }
  }
  std::set<std::int64_t> prices;
  for (const auto& item : f->model.thimac("Records")->store_contents) {
    prices.insert(std::get<std::int64_t>(item.attrs.at("price")));
  }
  const auto want = prices.size() * amounts.size();
  if (rs.at("drinks").outputs.at("price").size() != prices.size()) return fail("drinks produced other prices");
  if (rs.at("coins").outputs.at("amount").size() != amounts.size()) return fail("coins produced other amounts");
  if (r.cases_total != want || !r.passed()) return fail(ratio(r) + ", want " + std::to_string(want));
  return {true, ratio(r) + " = " + std::to_string(prices.size()) + " prices x " + std::to_string(amounts.size()) +
                    " amounts"};
}

Outcome conformance() {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::mt19937 rng(404);
  for (const auto* name : {"vending", "shopping"}) {
    const auto f = fixture(name);
    const auto runs = testing::scenario_runs(*f);
    for (const auto& run : runs) {
      const auto r = conforms(run.result.trace, f->behavior);
      if (!r || !r->conformant) return fail(std::string(name) + " " + run.scenario + " trace rejected");
      ++accepted;
    }
    for (int attempt = 0; rejected < (name == std::string("vending") ? 50u : 100u) && attempt < 2000; ++attempt) {
      const auto& run = runs[std::uniform_int_distribution<std::size_t>(0, runs.size() - 1)(rng)];
      const auto bad = testing::swap_with_producer(run.result.trace, rng);
      if (!bad) continue;
      const auto r = conforms(*bad, f->behavior);
      if (!r || r->conformant || r->violations.empty()) return fail("a mutated trace was accepted");
      const auto& v = r->violations.front();
      if (v.event.empty() || v.event != event_of(f->behavior, v.node)) return fail("violation names no event");
      ++rejected;
    }
  }
  if (rejected != 100) return fail("only " + std::to_string(rejected) + " mutations");
  return {true, std::to_string(accepted) + " traces accepted, 100 mutations rejected"};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "tmkit-acceptance";
  std::filesystem::create_directories(dir);
  const auto trace = (dir / "t.jsonl").string();
  std::vector<std::vector<std::string>> commands;
  for (const auto* name : {"vending", "shopping"}) {
    for (const auto* cmd : {"check", "events", "behavior", "carve", "validate", "export"}) {
      commands.push_back({cmd, name});
      commands.push_back({cmd, name, "--format", "json"});
    }
    commands.push_back({"carve", name, "--auto"});
  }
  commands.push_back({"simulate", "vending", "--inject", "cola+75", "--out", trace});
  commands.push_back({"conforms", "vending", "--trace", trace});
  for (const auto& args : commands) {
    std::ostringstream o1, e1, o2, e2;
    const int c1 = run_cli(args, o1, e1);
    const int c2 = run_cli(args, o2, e2);
    if (c1 != c2 || o1.str() != o2.str() || e1.str() != e2.str()) return fail(args[0] + " " + args[1]);
  }
  std::mt19937 rng(505);
  for (int i = 0; i < 500; ++i) {
    const auto sys = testing::random_system(rng, {4, 14, 3, 100, true});
    const auto text = serialize_model(sys.decl);
    const auto back = parse_model_decl(text);
    if (!back || *back != sys.decl) return fail("round trip of model " + std::to_string(i));
  }
  return {true, std::to_string(commands.size()) + " commands, 500 round trips"};
}

Outcome faulty_change() {
  for (const auto& [name, r] : reports(*fixture("vending-faulty-change"))) {
    if ((name == "outputs") == r.passed()) return fail(name + " " + ratio(r));
  }
  return {true, "outputs fails, drinks and coins pass"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fixture exactness", fixture_exactness},
      {"joint legality", joint_legality},
      {"behavior equals all-pairs scan", behavior_matches_scan},
      {"carve_auto equals exhaustive enumeration", carve_matches_enumeration},
      {"drinks scenario", drinks},
      {"coins scenario", coins},
      {"outputs scenario", outputs},
      {"conformance", conformance},
      {"determinism and round trip", determinism},
      {"faulty change variant", faulty_change},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(e.what());
    }
    failed += !o.ok;
    std::printf("%s %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
