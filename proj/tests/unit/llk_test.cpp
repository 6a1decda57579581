#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lwb/llk.hpp"

namespace lwb {
namespace {

LinkedGrammar linked(const std::string& text) {
  auto g = parse_grammar(text, "g");
  EXPECT_TRUE(g.ok()) << (g.diags.empty() ? "" : g.diags[0].format());
  return link_single(*g);
}

TEST(Llk, FirstSets) {
  auto g = linked("grammar G { S = A \"z\" | \"y\"; A = \"x\" \"w\"?; }");
  auto r = analyze_llk(g, 2);
  EXPECT_FALSE(r.leftRecursive);
  SeqSet expected{{"\"x\"", "\"w\""}, {"\"x\"", "\"z\""}, {"\"y\"", "$"}};
  EXPECT_EQ(r.table.first.at("S"), (SeqSet{{"\"x\"", "\"w\""}, {"\"x\"", "\"z\""}, {"\"y\""}}));
}

TEST(Llk, ConcatK) {
  SeqSet a{{"a"}, {}};
  SeqSet b{{"b", "c"}};
  EXPECT_EQ(concat_k(a, b, 2), (SeqSet{{"a", "b"}, {"b", "c"}}));
  EXPECT_EQ(concat_k({{"$"}}, b, 2), (SeqSet{{"$"}}));
}

TEST(Llk, ConflictNeedsMoreLookahead) {
  std::string text = "grammar G { S = \"x\" \"a\" | \"x\" \"b\"; }";
  auto g = linked(text);
  auto k1 = analyze_llk(g, 1);
  EXPECT_GE(k1.diags.warning_count(), 1u);
  auto k2 = analyze_llk(g, 2);
  EXPECT_EQ(k2.diags.warning_count(), 0u);
}

TEST(Llk, DetectsLeftRecursion) {
  auto direct = analyze_llk(linked("grammar G { E = E \"+\" T | T; T = \"n\"; }"), 1);
  EXPECT_TRUE(direct.leftRecursive);
  EXPECT_TRUE(direct.diags.has_errors());
  auto indirect = analyze_llk(linked("grammar G { A = B \"a\"; B = C? A; C = \"c\"; }"), 1);
  EXPECT_TRUE(indirect.leftRecursive);
}

TEST(Llk, InterfaceAlternatives) {
  auto c = test::component_from_sample("ShopSystem2.mcg");
  const auto& first = c->decisions.first.at("Order");
  EXPECT_EQ(first.size(), 2u);
  auto alts = alternatives_of(c->grammar, *c->grammar.find("Client"));
  EXPECT_NE(alts.body, nullptr);
}

TEST(Llk, ExternalIsWildcard) {
  auto g = load_grammar_file(test::sample_path("grammars/mc/examples/ShopEmbed.mcg"));
  ASSERT_TRUE(g.ok());
  auto r = analyze_llk(link_single(*g), 2);
  EXPECT_FALSE(r.diags.has_errors());
  EXPECT_TRUE(is_external_symbol(external_symbol("StatementCash")));
}

}  // namespace
}  // namespace lwb
