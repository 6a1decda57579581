#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lwb/metamodel.hpp"

namespace lwb {
namespace {

Metamodel metamodel_of(const std::string& file) {
  auto g = load_grammar_file(test::sample_path("grammars/" + file));
  EXPECT_TRUE(g.ok());
  auto m = derive_metamodel(link_single(*g));
  EXPECT_TRUE(m.ok());
  return *m.value;
}

std::vector<std::string> names(const std::vector<AttrDef>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(a.name);
  return out;
}

TEST(Metamodel, FlatShopTypes) {
  auto m = metamodel_of("ShopSystem.mcg");
  ASSERT_EQ(m.nodeTypes.size(), 6u);
  const NodeTypeDef* shop = m.find_node("ShopSystem");
  ASSERT_NE(shop, nullptr);
  EXPECT_EQ(names(shop->attributes),
            (std::vector<std::string>{"name", "client", "premiumClient", "orderCreditcard", "orderCash"}));
  auto client = m.find_attribute("ShopSystem", "client");
  ASSERT_TRUE(client);
  EXPECT_EQ(client->kind, AttrDef::Kind::composition);
  EXPECT_TRUE(client->is_list());
  auto addr = m.find_attribute("Client", "address");
  ASSERT_TRUE(addr);
  EXPECT_EQ(addr->minOccurs, 1);
  EXPECT_EQ(addr->maxOccurs, 1);
  EXPECT_EQ(m.find_attribute("OrderCash", "amount")->valueType, "int");
  // (Client | PremiumClient)* flattens into two exclusive-free lists
  EXPECT_TRUE(shop->exclusive.empty() || !shop->exclusive.front().empty());
}

TEST(Metamodel, InheritanceSubtractsAttributes) {
  auto m = metamodel_of("ShopSystem2.mcg");
  const NodeTypeDef* pc = m.find_node("PremiumClient");
  ASSERT_NE(pc, nullptr);
  EXPECT_EQ(pc->superType, "Client");
  EXPECT_EQ(names(pc->attributes), (std::vector<std::string>{"Discount"}));
  const InterfaceDef* order = m.find_interface("Order");
  ASSERT_NE(order, nullptr);
  EXPECT_EQ(names(order->declaredAttributes), (std::vector<std::string>{"ClientName"}));
  EXPECT_TRUE(m.is_subtype("OrderCash", "Order"));
  EXPECT_TRUE(m.is_subtype("PremiumClient", "Client"));
  EXPECT_FALSE(m.is_subtype("Client", "PremiumClient"));
  EXPECT_EQ(m.dispatch_chain("PremiumClient"), (std::vector<std::string>{"PremiumClient", "Client"}));
}

TEST(Metamodel, BooleanConstant) {
  auto m = metamodel_of("ShopSystem4.mcg");
  auto premium = m.find_attribute("Client", "premium");
  ASSERT_TRUE(premium);
  EXPECT_EQ(premium->kind, AttrDef::Kind::boolean_constant);
  EXPECT_TRUE(m.find_attribute("Client", "discount")->nullable());
}

TEST(Metamodel, EnumConstant) {
  auto g = parse_grammar("grammar G { A = kind:[\"red\"|\"green\"] name:IDENT; }", "g");
  ASSERT_TRUE(g.ok());
  auto m = derive_metamodel(link_single(*g));
  ASSERT_TRUE(m.ok());
  auto kind = m->find_attribute("A", "kind");
  ASSERT_TRUE(kind);
  EXPECT_EQ(kind->kind, AttrDef::Kind::enum_constant);
  EXPECT_EQ(kind->values, (std::vector<std::string>{"red", "green"}));
}

TEST(Metamodel, RepeatedByDerivation) {
  // A (B | A C)? derives A A C
  auto g = parse_grammar("grammar G { S = A (B | A C)?; A = \"a\"; B = \"b\"; C = \"c\"; }", "g");
  ASSERT_TRUE(g.ok());
  const RuleBody& body = *g->productions[0].body;
  Occurrence a = occurrence_analysis(body, "", "A");
  EXPECT_EQ(a.min, 1);
  EXPECT_EQ(a.max, 2);
  EXPECT_TRUE(a.many());
  Occurrence b = occurrence_analysis(body, "", "B");
  EXPECT_EQ(b, (Occurrence{0, 1}));
}

TEST(Metamodel, SeparatedList) {
  auto g = parse_grammar("grammar G { S = a:X (\",\" a:X)*; X = \"x\"; }", "g");
  ASSERT_TRUE(g.ok());
  Occurrence o = occurrence_analysis(*g->productions[0].body, "a", "X");
  EXPECT_EQ(o.min, 1);
  EXPECT_TRUE(o.unbounded());
}

TEST(Metamodel, AssociationEdge) {
  auto m = metamodel_of("ShopAssoc.mcg");
  ASSERT_EQ(m.associations.size(), 1u);
  const AssocEdge& e = m.associations[0];
  EXPECT_EQ(e.source, "Client");
  EXPECT_EQ(e.target, "Order");
  EXPECT_EQ(e.sourceRole, "order");
  EXPECT_EQ(e.targetRole, "orderingClient");
  std::string dot = emit_metamodel_report(m, ReportFormat::dot);
  EXPECT_NE(dot.find("ClientOrder"), std::string::npos);
}

TEST(Metamodel, JsonRoundTrip) {
  auto m = metamodel_of("ShopSystem2.mcg");
  auto back = metamodel_from_json(emit_metamodel_report(m, ReportFormat::json));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, m);
}

TEST(Metamodel, EbnfExpandsSubrules) {
  auto g = load_grammar_file(test::sample_path("grammars/ShopSystem2.mcg"));
  ASSERT_TRUE(g.ok());
  std::string e = emit_ebnf(link_single(*g));
  EXPECT_NE(e.find("Client ::= \"client\" IDENT Address | PremiumClient"), std::string::npos) << e;
  EXPECT_NE(e.find("Order ::= OrderCreditcard | OrderCash"), std::string::npos) << e;
}

}  // namespace
}  // namespace lwb
