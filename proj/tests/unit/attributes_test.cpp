#include <gtest/gtest.h>

#include <chrono>

#include "fixtures.hpp"
#include "lwb/attributes.hpp"
#include "lwb/parser.hpp"

namespace lwb {
namespace {

TEST(Attributes, AmapParses) {
  auto maps = parse_amap(test::read_text(test::sample_path("compositions/Unpaid.amap")), "Unpaid.amap");
  ASSERT_TRUE(maps.ok()) << maps.diags[0].format();
  ASSERT_EQ(maps->size(), 1u);
  const auto& m = maps->front();
  EXPECT_EQ(m.name, "Unpaid");
  ASSERT_EQ(m.bindings.size(), 2u);
  EXPECT_EQ(m.bindings[0].grammar, "mc.examples.shopsystem");
  EXPECT_EQ(m.bindings[0].attribute, "outstanding");
  EXPECT_EQ(m.bindings[0].calculatorKey, "mc.examples.shopsystem.OutstandingCalculation");
  EXPECT_EQ(m.bindings[1].grammar, "mc.examples.shop2");
  EXPECT_EQ(m.bindings[1].attribute, "sum");
}

TEST(Attributes, AmapSyntaxError) {
  auto maps = parse_amap("Unpaid { a.b = c; }", "x.amap");
  ASSERT_FALSE(maps.ok());
  EXPECT_EQ(maps.diags[0].pos.file, "x.amap");
}

TEST(Attributes, ValueKinds) {
  EXPECT_TRUE(compatible_value_kinds("int", "float"));
  EXPECT_TRUE(compatible_value_kinds("float", "float"));
  EXPECT_FALSE(compatible_value_kinds("string", "float"));
}

struct Tree {
  ComponentPtr c = test::component_from_text(
      "package t; grammar T { token NUMBER = ('0'..'9')+ : int; N = \"n\" v:NUMBER N*; syn total: /int; inh depth: /int; }");
  ParseResult r;
  CalculatorRegistry reg;
  explicit Tree(const std::string& text) : r(parse_text(*c, text)) {
    EXPECT_TRUE(r.ok());
    reg.declare_all(c->grammar);
  }
};

TEST(Attributes, SynthesizedWithMemo) {
  Tree t("n 1 n 2 n 3 n 4");
  Calculation total;
  total.key = "Total";
  total.on("N", [](AstNode& n, AttributeEvaluator& ev) -> Value {
    std::int64_t s = std::get<std::int64_t>(n.get("v"));
    for (AstNode* c : n.children("n")) s += std::get<std::int64_t>(ev.get(*c, "total"));
    return s;
  });
  t.reg.add(total);
  EXPECT_TRUE(t.reg.bind("t.T", "total", "Total").empty());
  AttributeEvaluator ev(t.reg);
  auto v = ev.eval(*t.r.root(), "total");
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(*v, Value(std::int64_t{10}));
  std::size_t calls = ev.calculator_calls();
  EXPECT_EQ(calls, 4u);
  ev.eval(*t.r.root(), "total");
  EXPECT_EQ(ev.calculator_calls(), calls);
}

TEST(Attributes, Inherited) {
  Tree t("n 1 n 2 n 3");
  Calculation depth;
  depth.key = "Depth";
  depth.on("N", [](AstNode& n, AttributeEvaluator& ev) -> Value {
    if (!n.parent) return std::int64_t{0};
    return std::get<std::int64_t>(ev.inherited(n, "depth")) + 1;
  });
  t.reg.add(depth);
  t.reg.bind("t.T", "depth", "Depth");
  AstNode* leaf = t.r.root()->children("n")[0]->children("n")[0];
  auto v = eval_attribute(*leaf, "depth", t.reg);
  ASSERT_TRUE(v.ok()) << v.diags[0].format();
  EXPECT_EQ(*v, Value(std::int64_t{2}));
}

TEST(Attributes, CycleIsReported) {
  Tree t("n 1");
  Calculation self;
  self.key = "Self";
  self.on("N", [](AstNode& n, AttributeEvaluator& ev) -> Value { return ev.get(n, "total"); });
  t.reg.add(self);
  t.reg.bind("t.T", "total", "Self");
  auto start = std::chrono::steady_clock::now();
  auto v = eval_attribute(*t.r.root(), "total", t.reg);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
  ASSERT_FALSE(v.ok());
  EXPECT_NE(v.diags[0].message.find("cyclic attribute dependency"), std::string::npos) << v.diags[0].message;
}

TEST(Attributes, MissingCalculator) {
  Tree t("n 1");
  auto v = eval_attribute(*t.r.root(), "total", t.reg);
  EXPECT_FALSE(v.ok());
  auto undeclared = eval_attribute(*t.r.root(), "nosuch", t.reg);
  EXPECT_FALSE(undeclared.ok());
}

TEST(Attributes, BindChecks) {
  Tree t("n 1");
  EXPECT_TRUE(t.reg.bind("t.T", "total", "Unknown").has_errors());
  EXPECT_TRUE(t.reg.bind("t.T", "nosuch", "Unknown").has_errors());
}

TEST(Attributes, VirtualMapKindMismatch) {
  CalculatorRegistry reg;
  reg.declare({"a", AttributeDirection::synthesized, "float", "g1", {}});
  reg.declare({"b", AttributeDirection::synthesized, "string", "g2", {}});
  reg.add({"A", {}});
  reg.add({"B", {}});
  VirtualAttributeMap m{"V", {{"g1", "a", "A", {}}, {"g2", "b", "B", {}}}, {}};
  EXPECT_TRUE(register_virtual(m, reg).has_errors());
}

}  // namespace
}  // namespace lwb
