#include <gtest/gtest.h>

#include <random>

#include "random_model.hpp"
#include "tmkit/core/dot.hpp"
#include "tmkit/core/model.hpp"
#include "tmkit/core/naming.hpp"

namespace tmkit {
namespace {

ActionNode node(std::string id, ActionKind k, std::string thimac, std::string thing = "T") {
  ActionNode n;
  n.id = std::move(id);
  n.kind = k;
  n.thing = std::move(thing);
  n.thimac = std::move(thimac);
  return n;
}

ModelDecl base() {
  ModelDecl m;
  m.name = "m";
  m.things.push_back({"T", {{"v", ValueType::integer}, {"s", ValueType::text}}});
  m.thimacs.push_back({"A", std::nullopt, false, {}});
  m.thimacs.push_back({"B", std::nullopt, false, {}});
  return m;
}

std::vector<std::string> codes(const Diagnostics& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.code);
  return out;
}

StaticModel built(ModelDecl m) {
  auto r = build_model(std::move(m));
  EXPECT_TRUE(r.has_value());
  if (!r) {
    for (const auto& d : r.error()) ADD_FAILURE() << to_string(d);
    return {};
  }
  return std::move(*r);
}

TEST(Naming, NumbersCompareNumerically) {
  EXPECT_TRUE(natural_less("E2", "E10"));
  EXPECT_FALSE(natural_less("E10", "E2"));
  EXPECT_TRUE(natural_less("E10", "F1"));
  EXPECT_TRUE(natural_less("a", "b"));
  EXPECT_FALSE(natural_less("E1", "E1"));
  EXPECT_TRUE(natural_less("E1", "E1a"));
}

TEST(Expr, EvaluatesWithPrecedence) {
  const auto e = Expr::binary(Expr::Kind::add, Expr::lit(std::int64_t{2}),
                              Expr::binary(Expr::Kind::mul, Expr::lit(std::int64_t{3}), Expr::ref("T", "v")));
  ExprEnv env;
  env.path = [](const std::string&, const std::string&) -> Value { return std::int64_t{5}; };
  EXPECT_EQ(evaluate(e, env), Value{std::int64_t{17}});
  EXPECT_EQ(to_string(e), "2 + 3 * T.v");
}

TEST(Expr, PrintsParenthesesOnlyWhereNeeded) {
  using K = Expr::Kind;
  auto a = Expr::ref("a");
  auto b = Expr::ref("b");
  auto c = Expr::ref("c");
  EXPECT_EQ(to_string(Expr::binary(K::sub, a, Expr::binary(K::sub, b, c))), "a - (b - c)");
  EXPECT_EQ(to_string(Expr::binary(K::sub, Expr::binary(K::sub, a, b), c)), "a - b - c");
  EXPECT_EQ(to_string(Expr::binary(K::mul, Expr::binary(K::add, a, b), c)), "(a + b) * c");
  EXPECT_EQ(to_string(Expr::sum_of("coins")), "sum(coins)");
  EXPECT_EQ(to_string(Expr::size_of("Records")), "size(Records)");
  EXPECT_EQ(to_string(Expr::lit(std::string("say \"hi\""))), "\"say \\\"hi\\\"\"");
}

TEST(Expr, DivisionByZeroAndTextArithmeticThrow) {
  ExprEnv env;
  EXPECT_THROW(evaluate(Expr::binary(Expr::Kind::div, Expr::lit(std::int64_t{1}), Expr::lit(std::int64_t{0})), env),
               EvalError);
  EXPECT_THROW(evaluate(Expr::binary(Expr::Kind::sub, Expr::lit(std::string("a")), Expr::lit(std::int64_t{1})), env),
               EvalError);
  EXPECT_THROW(compare(Value{std::int64_t{1}}, CmpOp::eq, Value{std::string("1")}), EvalError);
}

TEST(Expr, ComparisonOperatorsIncludingUnicode) {
  EXPECT_EQ(parse_cmp_op("≠"), CmpOp::ne);
  EXPECT_EQ(parse_cmp_op("≤"), CmpOp::le);
  EXPECT_EQ(parse_cmp_op("≥"), CmpOp::ge);
  EXPECT_EQ(parse_cmp_op("=>"), std::nullopt);
  EXPECT_TRUE(compare(Value{std::int64_t{3}}, CmpOp::ge, Value{std::int64_t{3}}));
  EXPECT_TRUE(compare(Value{std::string("a")}, CmpOp::lt, Value{std::string("b")}));
}

// Independent transcription of the stage succession table.
bool table(ActionKind a, ActionKind b, bool same) {
  using K = ActionKind;
  if (!same) return a == K::transfer_out && b == K::transfer_in;
  switch (a) {
    case K::create:
      return b == K::process || b == K::release;
    case K::receive:
      return b == K::process || b == K::release;
    case K::process:
      return b == K::release;
    case K::release:
      return b == K::transfer_out;
    case K::transfer_in:
      return b == K::receive;
    case K::transfer_out:
      return false;
  }
  return false;
}

constexpr ActionKind kAll[] = {ActionKind::create,      ActionKind::process,      ActionKind::release,
                               ActionKind::transfer_in, ActionKind::transfer_out, ActionKind::receive};

TEST(Legality, FlowTableMatchesTranscription) {
  for (auto a : kAll) {
    for (auto b : kAll) {
      for (bool same : {true, false}) {
        EXPECT_EQ(flow_is_legal(a, b, same), table(a, b, same)) << to_string(a) << "->" << to_string(b) << same;
      }
    }
  }
}

TEST(Legality, TriggerEnds) {
  for (auto k : kAll) {
    EXPECT_EQ(trigger_source_is_legal(k), k == ActionKind::create || k == ActionKind::process);
    EXPECT_EQ(trigger_target_is_legal(k), k != ActionKind::receive);
  }
}

TEST(CheckStatic, MinimalModelIsClean) {
  auto m = base();
  m.nodes = {node("c", ActionKind::create, "A"), node("r", ActionKind::release, "A"),
             node("o", ActionKind::transfer_out, "A"), node("i", ActionKind::transfer_in, "B"),
             node("v", ActionKind::receive, "B"), node("p", ActionKind::process, "B")};
  m.flows = {{"c", "r"}, {"r", "o"}, {"o", "i"}, {"i", "v"}, {"v", "p"}};
  m.triggers = {{"p", "c", Guard{Expr::ref("T", "v"), CmpOp::gt, Expr::lit(std::int64_t{0})}, false}};
  EXPECT_TRUE(check_static(built(m)).empty());
}

TEST(CheckStatic, IllegalFlowGivesOneDiagnostic) {
  auto m = base();
  m.nodes = {node("c", ActionKind::create, "A"), node("v", ActionKind::receive, "A")};
  m.flows = {{"c", "v"}};
  const auto ds = check_static(built(m));
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].code, "illegal stage succession");
}

TEST(CheckStatic, CrossThimacFlowMustBeTransfer) {
  auto m = base();
  m.nodes = {node("c", ActionKind::create, "A"), node("p", ActionKind::process, "B")};
  m.flows = {{"c", "p"}};
  EXPECT_EQ(codes(check_static(built(m))), std::vector<std::string>{"illegal stage succession"});
}

TEST(CheckStatic, TriggerEndsAndGuards) {
  auto m = base();
  m.nodes = {node("r", ActionKind::release, "A"), node("v", ActionKind::receive, "A"),
             node("p", ActionKind::process, "A"), node("q", ActionKind::process, "A")};
  m.triggers = {{"r", "p", std::nullopt, false},
                {"p", "v", std::nullopt, false},
                {"p", "q", Guard{Expr::ref("T", "v"), CmpOp::eq, Expr::ref("T", "s")}, false},
                {"q", "p", Guard{Expr::ref("T", "zz"), CmpOp::eq, Expr::lit(std::int64_t{1})}, false}};
  EXPECT_EQ(codes(check_static(built(m))),
            (std::vector<std::string>{"illegal trigger source", "illegal trigger target", "ill-typed guard",
                                      "ill-formed guard"}));
}

TEST(CheckStatic, UnmatchedTransfer) {
  auto m = base();
  m.nodes = {node("r", ActionKind::release, "A"), node("o", ActionKind::transfer_out, "A")};
  m.flows = {{"r", "o"}};
  EXPECT_EQ(codes(check_static(built(m))), std::vector<std::string>{"unmatched transfer"});
}

TEST(BuildModel, ReportsEveryResolutionError) {
  auto m = base();
  m.thimacs.push_back({"A", std::nullopt, false, {}});
  m.thimacs.push_back({"C", std::string("Nope"), false, {}});
  m.thimacs.push_back({"X", std::string("Y"), false, {}});
  m.thimacs.push_back({"Y", std::string("X"), false, {}});
  m.thimacs.push_back({"NotStore", std::nullopt, false, {{"T", {{"v", std::int64_t{1}}}}}});
  m.nodes = {node("n", ActionKind::process, "A"), node("n", ActionKind::process, "A"),
             node("m", ActionKind::process, "Ghost"), node("k", ActionKind::release, "A", "Nothing")};
  m.nodes[0].input = true;
  m.nodes[3].effect.push_back({EffectStmt::Kind::pop, {}, {}, "A", std::nullopt, std::nullopt});
  m.flows = {{"n", "zz"}};
  const auto r = build_model(m);
  ASSERT_FALSE(r.has_value());
  const auto cs = codes(r.error());
  for (const char* want : {"duplicate id", "dangling reference", "nesting cycle", "input on illegal kind",
                           "effect on illegal kind"}) {
    EXPECT_NE(std::find(cs.begin(), cs.end(), want), cs.end()) << want;
  }
}

TEST(BuildModel, StoreContentsAreTyped) {
  auto m = base();
  m.thimacs.push_back({"S", std::nullopt, true, {{"T", {{"v", std::string("x")}}}, {"T", {{"w", std::int64_t{1}}}}}});
  const auto r = build_model(m);
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(codes(r.error()), (std::vector<std::string>{"type mismatch", "unknown attribute"}));
}

TEST(JointCapable, TransferFlowsAndTriggersOnly) {
  auto m = base();
  m.nodes = {node("c", ActionKind::create, "A"), node("r", ActionKind::release, "A"),
             node("o", ActionKind::transfer_out, "A"), node("i", ActionKind::transfer_in, "B"),
             node("v", ActionKind::receive, "B"), node("p", ActionKind::process, "B")};
  m.flows = {{"c", "r"}, {"r", "o"}, {"o", "i"}, {"i", "v"}, {"v", "p"}};
  m.triggers = {{"p", "c", std::nullopt, false}};
  const auto s = built(m);
  const bool want[] = {false, true, true, true, false};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(is_joint_capable(s, {StaticEdgeRef::Kind::flow, i}), want[i]) << describe(s, {StaticEdgeRef::Kind::flow, i});
  }
  EXPECT_TRUE(is_joint_capable(s, {StaticEdgeRef::Kind::trigger, 0}));
}

TEST(Legality, RandomModelsAreCleanAndInjectedFaultsAreFound) {
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    auto sys = testing::random_system(rng, {4, 16, 3, 12, round % 2 == 1});
    auto m = build_model(sys.decl);
    ASSERT_TRUE(m.has_value()) << round;
    ASSERT_TRUE(check_static(*m).empty()) << round;

    // one random illegal flow must be reported, and only it
    auto bad = sys.decl;
    const auto& nodes = bad.nodes;
    bool added = false;
    for (int t = 0; t < 50 && !added; ++t) {
      const auto& a = nodes[testing::pick(rng, 0, static_cast<int>(nodes.size()) - 1)];
      const auto& b = nodes[testing::pick(rng, 0, static_cast<int>(nodes.size()) - 1)];
      if (!table(a.kind, b.kind, a.thimac == b.thimac)) {
        bad.flows.push_back({a.id, b.id});
        added = true;
      }
    }
    if (!added) continue;
    const auto diags = check_static(*build_model(bad));
    ASSERT_EQ(diags.size(), 1u) << round;
    EXPECT_EQ(diags[0].code, "illegal stage succession");
  }
}

TEST(Dot, StaticExportIsSortedAndStyled) {
  auto m = base();
  m.nodes = {node("z", ActionKind::create, "A"), node("a", ActionKind::process, "A")};
  m.flows = {{"z", "a"}};
  m.triggers = {{"a", "z", std::nullopt, true}};
  const auto dot = export_dot(built(m));
  EXPECT_LT(dot.find("\"a\""), dot.find("\"z\" ["));
  EXPECT_NE(dot.find("style=dashed"), std::string::npos);
  EXPECT_NE(dot.find("else"), std::string::npos);
  EXPECT_EQ(dot, export_dot(built(m)));
}

}  // namespace
}  // namespace tmkit
