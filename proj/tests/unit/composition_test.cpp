#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lwb/parser.hpp"

namespace lwb {
namespace {

std::map<std::string, GrammarDef> grammars(std::initializer_list<const char*> texts) {
  std::map<std::string, GrammarDef> out;
  for (const char* t : texts) {
    auto g = parse_grammar(t, "g");
    EXPECT_TRUE(g.ok()) << (g.diags.empty() ? "" : g.diags[0].format());
    if (g) out.emplace(g->qualified_name(), *g.value);
  }
  return out;
}

TEST(Composition, GrammarInheritanceAddsAlternative) {
  auto comp = test::composition_from_sample("exprquery.json");
  auto c = comp.find("exprquery");
  ASSERT_TRUE(c);
  EXPECT_EQ(c->grammar.lineage,
            (std::vector<std::string>{"mc.exprquery.ExprQuery", "mc.expr.Expr", "mc.query.Query"}));
  const auto* qs = c->grammar.find("QuerySelect");
  ASSERT_NE(qs, nullptr);
  EXPECT_TRUE(c->metamodel.is_subtype(qs->typeName, "Expression"));
  auto r = parse_text(*c, "program p let x = select a, b from t; let y = call f(x, 1);");
  ASSERT_TRUE(r.ok()) << r.diags[0].format();
  const AstNode* e = r.root()->children("statement")[0]->child("expression");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->type, qs->typeName);
  // the supergrammar does not know the new keywords
  auto base = comp.find("expr");
  EXPECT_TRUE(parse_text(*base, "program select let x = 1;").ok());
  EXPECT_FALSE(parse_text(*c, "program select let x = 1;").ok());
}

TEST(Composition, ClashingSupers) {
  auto gs = grammars({"package p; grammar A { X = \"a\" n:IDENT; }", "package p; grammar B { X = \"b\" m:NUMBER; token NUMBER = ('0'..'9')+ : int; }",
                      "package p; grammar C extends p.A, p.B { S = X; }"});
  auto lg = link_inheritance(gs.at("p.C"), gs);
  ASSERT_FALSE(lg.ok());
  EXPECT_NE(lg.diags[0].message.find("clashing inherited productions 'X'"), std::string::npos) << lg.diags[0].message;
}

TEST(Composition, SameSignatureSupersMerge) {
  auto gs = grammars({"package p; grammar A { X = \"a\" n:IDENT; }", "package p; grammar B { X = \"b\" n:IDENT; }",
                      "package p; grammar C extends p.A, p.B { S = X; }"});
  EXPECT_TRUE(link_inheritance(gs.at("p.C"), gs).ok());
}

TEST(Composition, InheritanceCycle) {
  auto gs = grammars({"package p; grammar A extends p.B { X = \"a\"; }", "package p; grammar B extends p.A { Y = \"b\"; }"});
  EXPECT_FALSE(link_inheritance(gs.at("p.A"), gs).ok());
}

TEST(Composition, TokenOverride) {
  auto gs = grammars({"package p; grammar A { token NUM = ('0'..'9')+ : int; X = \"x\" v:NUM; }",
                      "package p; grammar B extends p.A { token NUM = ('0'..'9')+ '.' ('0'..'9')+ : float; }"});
  auto lg = link_inheritance(gs.at("p.B"), gs);
  ASSERT_TRUE(lg.ok());
  ComponentOptions o;
  o.startRules = {"X"};
  auto c = build_component(std::move(*lg.value), o);
  ASSERT_TRUE(c.ok());
  auto r = parse_text(**c, "x 1.5");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.root()->get("v"), Value(1.5));
}

TEST(Composition, EmbeddingSelectsByAttribute) {
  auto comp = test::composition_from_sample("embed.json");
  auto host = comp.find("host");
  ASSERT_TRUE(host);
  EXPECT_TRUE(compose_check(*host).empty());
  auto r = parse_text(*host, "S client pay cashorder Pay pay 5 pay 5; cashorder X pay 7 transfer 7 to pay;");
  ASSERT_TRUE(r.ok()) << r.diags[0].format();
  auto orders = r.root()->children("order");
  ASSERT_EQ(orders.size(), 2u);
  const AstNode* s0 = orders[0]->child("statementCash");
  const AstNode* s1 = orders[1]->child("statementCash");
  ASSERT_TRUE(s0 && s1);
  EXPECT_EQ(s0->language, "mc.stmt.Pay");
  EXPECT_EQ(s1->language, "mc.stmt.Transfer");
  EXPECT_EQ(to_display(s1->get("account")), "pay");
  EXPECT_EQ(to_display(orders[1]->get("clientName")), "pay");
}

TEST(Composition, EmbeddingSelectsByFirstToken) {
  auto comp = test::composition_from_sample("embed.json");
  auto host = comp.find("host");
  auto r = parse_text(*host, "S creditorder a 1 transfer 1 to b; creditorder b 2 pay 2;");
  ASSERT_TRUE(r.ok()) << r.diags[0].format();
  auto orders = r.root()->children("order");
  EXPECT_EQ(orders[0]->child("statementCredit")->type, "Transfer");
  EXPECT_EQ(orders[1]->child("statementCredit")->type, "Pay");
}

TEST(Composition, UnboundExternal) {
  auto g = load_grammar_file(test::sample_path("grammars/mc/examples/ShopEmbed.mcg"));
  ASSERT_TRUE(g.ok());
  auto host = build_component(link_single(*g), {});
  ASSERT_TRUE(host.ok());
  auto pay = test::component_from_sample("mc/stmt/Pay.mcg");
  EmbeddingBinding b{"StatementCash", {{pay, "Pay"}}, {}, Contract{"example.IStatementCash", {"amount"}}};
  auto bound = bind_embedding(*host, {b});
  ASSERT_TRUE(bound.ok()) << bound.diags[0].format();
  auto d = compose_check(**bound);
  EXPECT_EQ(d.error_count(), 1u);
  auto r = parse_text(**bound, "S");
  EXPECT_FALSE(r.ok());
}

TEST(Composition, ContractViolation) {
  auto g = load_grammar_file(test::sample_path("grammars/mc/examples/ShopEmbed.mcg"));
  auto host = build_component(link_single(*g), {});
  auto pay = test::component_from_sample("mc/stmt/Pay.mcg");
  EmbeddingBinding b{"StatementCash", {{pay, "Pay"}}, {}, Contract{"example.IStatementCash", {"account"}}};
  EXPECT_FALSE(bind_embedding(*host, {b}).ok());
  EmbeddingBinding notExternal{"Client", {{pay, "Pay"}}, {}, {}};
  EXPECT_FALSE(bind_embedding(*host, {notExternal}).ok());
}

TEST(Composition, ArtifactIsDeterministic) {
  auto a = test::composition_from_sample("embed.json");
  auto b = test::composition_from_sample("embed.json");
  std::string sa = serialize_artifact(*a.find("host"));
  EXPECT_EQ(sa, serialize_artifact(*b.find("host")));
  EXPECT_NE(sa, serialize_artifact(*a.find("pay")));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  auto dir = test::scratch_dir("artifacts");
  ArtifactStore store(dir);
  auto e1 = store.store(*a.find("host"));
  auto e2 = store.store(*b.find("host"));
  EXPECT_TRUE(e1.written);
  EXPECT_FALSE(e2.written);
  EXPECT_EQ(e1.path, e2.path);
}

TEST(Composition, ConfigErrors) {
  EXPECT_FALSE(parse_composition_config("{", ".").ok());
  EXPECT_FALSE(parse_composition_config(R"({"components":[{"name":"x","grammars":[]}]})", ".").ok());
  EXPECT_FALSE(
      parse_composition_config(R"({"embeddings":[{"host":"a","external":"b","candidates":[],"selection":{"kind":"odd"}}]})",
                               ".")
          .ok());
}

}  // namespace
}  // namespace lwb
