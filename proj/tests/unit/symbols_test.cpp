#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lwb/parser.hpp"
#include "lwb/symbols.hpp"

namespace lwb {
namespace {

struct Linked {
  ComponentPtr c;
  ParseResult r;
  SymbolTable table;
  Diagnostics symbolDiags;
  LinkReport report;
};

Linked link(const std::string& text) {
  Linked l;
  l.c = test::component_from_sample("ShopAssoc.mcg");
  l.r = parse_text(*l.c, text, "m");
  EXPECT_TRUE(l.r.ok()) << (l.r.diags.empty() ? "" : l.r.diags[0].format());
  if (!l.r.ok()) return l;
  l.table = build_symbols({l.r.root()}, l.c->metamodel, l.c->resolver, l.symbolDiags);
  l.report = establish_links({l.r.root()}, l.c->metamodel, l.table, l.c->resolver);
  return l;
}

TEST(Symbols, TableHasClients) {
  auto l = link("S client Bob premiumclient Ann 5");
  EXPECT_TRUE(l.symbolDiags.empty());
  // the shop itself is named too
  EXPECT_EQ(l.table.size(), 3u);
  auto hits = l.table.lookup(l.c->metamodel, "Client", "Ann");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0]->type, "PremiumClient");
  EXPECT_TRUE(l.table.lookup(l.c->metamodel, "PremiumClient", "Bob").empty());
}

TEST(Symbols, LinksBothWays) {
  auto l = link("S client Bob creditorder Bob 1 cashorder Bob 2");
  ASSERT_TRUE(l.report.ok());
  EXPECT_EQ(l.report.established, 2u);
  AstNode* bob = l.r.root()->children("client")[0];
  ASSERT_EQ(bob->links["order"].size(), 2u);
  for (AstNode* o : l.r.root()->children("order")) {
    ASSERT_EQ(o->links["orderingClient"].size(), 1u);
    EXPECT_EQ(o->links["orderingClient"][0], bob);
  }
  auto nav = navigate(*bob, "order", l.c->metamodel);
  ASSERT_TRUE(nav.ok());
  EXPECT_EQ(nav->size(), 2u);
}

TEST(Symbols, DanglingName) {
  auto l = link("S client Bob cashorder Eve 2");
  ASSERT_EQ(l.report.errors.size(), 1u);
  EXPECT_EQ(l.report.errors[0].detail, "Eve");
  EXPECT_EQ(l.report.errors[0].pos.line, 1);
  auto d = l.report.diagnostics(Severity::warning);
  EXPECT_EQ(d.warning_count(), 1u);
  EXPECT_TRUE(l.r.root()->children("order")[0]->links["orderingClient"].empty());
}

TEST(Symbols, Duplicates) {
  auto l = link("S client Bob client Bob");
  ASSERT_EQ(l.symbolDiags.error_count(), 1u);
  EXPECT_NE(l.symbolDiags[0].message.find("1:"), std::string::npos) << l.symbolDiags[0].message;
}

TEST(Symbols, ForwardReferences) {
  auto c = test::component_from_text(
      "grammar F { S = (Client | Order)*; Client = \"client\" name:IDENT; Order = \"order\" clientName:IDENT;"
      " association CO Client 1 <-> * Order.orderingClient; }");
  auto r = parse_text(*c, "order Bob client Bob");
  ASSERT_TRUE(r.ok());
  Diagnostics d;
  auto t = build_symbols({r.root()}, c->metamodel, c->resolver, d);
  auto rep = establish_links({r.root()}, c->metamodel, t, c->resolver);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.established, 1u);
}

TEST(Symbols, RelinkingReplacesLinks) {
  auto l = link("S client Bob cashorder Bob 2");
  auto again = establish_links({l.r.root()}, l.c->metamodel, l.table, l.c->resolver);
  EXPECT_EQ(again.established, 1u);
  EXPECT_EQ(l.r.root()->children("client")[0]->links["order"].size(), 1u);
}

TEST(Symbols, UnknownRole) {
  auto l = link("S client Bob");
  auto nav = navigate(*l.r.root()->children("client")[0], "nothing", l.c->metamodel);
  ASSERT_FALSE(nav.ok());
  EXPECT_NE(nav.diags[0].message.find("has no role 'nothing'"), std::string::npos);
}

TEST(Symbols, CustomResolver) {
  // every order belongs to Ann, whatever name it gives
  auto l = link("S client Bob client Ann cashorder Zed 2");
  ResolverRegistry reg;
  reg.add("ClientOrder", [&](const AstNode& client, const SymbolTable&) {
    if (to_display(client.get("name")) != "Ann") return std::vector<AstNode*>{};
    return l.r.root()->children("order");
  });
  auto rep = establish_links({l.r.root()}, l.c->metamodel, l.table, l.c->resolver, &reg);
  ASSERT_TRUE(rep.ok()) << rep.errors[0].message;
  EXPECT_EQ(to_display(l.r.root()->children("order")[0]->links["orderingClient"][0]->get("name")), "Ann");
}

TEST(Symbols, HierarchicalScopes) {
  auto c = test::component_from_text(
      "grammar H { Pkg = \"package\" name:IDENT \"{\" (Pkg | Cls | Use)* \"}\"; Cls = \"class\" name:IDENT;"
      " Use = \"use\" clsName:IDENT; association U Use * -> 1 Cls.cls; }",
      {"Pkg"});
  ResolverConfig cfg;
  cfg.scheme = SymbolScheme::hierarchical;
  auto r = parse_text(*c, "package a { class X package b { class X use X } use X }");
  ASSERT_TRUE(r.ok()) << r.diags[0].format();
  Diagnostics d;
  auto t = build_symbols({r.root()}, c->metamodel, cfg, d);
  EXPECT_TRUE(d.empty());
  auto rep = establish_links({r.root()}, c->metamodel, t, cfg);
  ASSERT_TRUE(rep.ok()) << rep.errors[0].message;
  AstNode* inner = r.root()->children("pkg")[0];
  AstNode* innerUse = inner->children("use")[0];
  AstNode* outerUse = r.root()->children("use")[0];
  EXPECT_EQ(t.name_of(innerUse->links["cls"][0]), "a.b.X");
  EXPECT_EQ(t.name_of(outerUse->links["cls"][0]), "a.X");
}

}  // namespace
}  // namespace lwb
