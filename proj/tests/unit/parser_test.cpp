#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lwb/parser.hpp"

namespace lwb {
namespace {

TEST(Parser, ParsesFlatShop) {
  auto c = test::component_from_sample("ShopSystem.mcg");
  auto r = parse_text(*c, "MyShop client Bob \"Main\" \"Aachen\" cashorder Bob 10", "m.shop");
  ASSERT_TRUE(r.ok()) << r.diags.items().front().format();
  const AstNode* root = r.root();
  EXPECT_EQ(root->type, "ShopSystem");
  EXPECT_EQ(to_display(root->get("name")), "MyShop");
  ASSERT_EQ(root->children("client").size(), 1u);
  EXPECT_EQ(to_display(root->children("client")[0]->child("address")->get("town")), "Aachen");
  ASSERT_EQ(root->children("orderCash").size(), 1u);
  EXPECT_EQ(root->children("orderCash")[0]->get("amount"), Value(std::int64_t{10}));
  EXPECT_TRUE(check_conformance(*root, c->metamodel).empty());
}

TEST(Parser, ReportsPositionedError) {
  auto c = test::component_from_sample("ShopSystem.mcg");
  auto r = parse_text(*c, "MyShop client Bob \"Main\" cashorder", "m.shop");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diags.error_count(), 1u);
  const auto& d = r.diags[0];
  EXPECT_EQ(d.pos.line, 1);
  EXPECT_EQ(d.pos.column, 26);
  EXPECT_NE(d.message.find("STRING"), std::string::npos) << d.message;
}

TEST(Parser, PrettyPrintRoundTrip) {
  auto c = test::component_from_sample("ShopSystem2.mcg");
  std::string text =
      "Shop client Ann \"S\" \"T\" premiumclient Bob 10 creditorder Ann 4711 cashorder Bob 25";
  auto r = parse_text(*c, text);
  ASSERT_TRUE(r.ok()) << r.diags.items().front().format();
  auto printed = pretty_print(*r.root(), *c);
  ASSERT_TRUE(printed.ok()) << printed.diags.items().front().format();
  auto again = parse_text(*c, *printed);
  ASSERT_TRUE(again.ok()) << *printed;
  EXPECT_TRUE(structurally_equal(*r.root(), *again.root()));
}

}  // namespace
}  // namespace lwb
