#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lwb/parser.hpp"
#include "lwb/visitor.hpp"

namespace lwb {
namespace {

struct Shop {
  ComponentPtr c = test::component_from_sample("ShopSystem2.mcg");
  ParseResult r;
  explicit Shop(const std::string& text) : r(parse_text(*c, text)) { EXPECT_TRUE(r.ok()); }
  AstNode& root() { return *r.root(); }
};

const char* kModel = "S client Ann \"a\" \"b\" premiumclient Bob 5 creditorder Ann 12 cashorder Bob 3";

TEST(Visitor, PreAndPostOrder) {
  Shop s(kModel);
  std::vector<std::string> log;
  VisitorUnit u("log");
  for (const char* t : {"ShopSystem", "Client", "PremiumClient", "Address", "OrderCreditcard", "OrderCash"}) {
    u.on_visit(t, [&log, t](AstNode&, TraversalControl&) { log.push_back(std::string("+") + t); });
    u.on_end_visit(t, [&log, t](AstNode&, TraversalControl&) { log.push_back(std::string("-") + t); });
  }
  VisitorSet v;
  v.add(u);
  EXPECT_TRUE(v.traverse(s.root(), &s.c->metamodel));
  std::vector<std::string> expected{"+ShopSystem", "+Client",       "+Address",         "-Address",   "-Client",
                                    "+PremiumClient", "-PremiumClient", "+OrderCreditcard", "-OrderCreditcard",
                                    "+OrderCash",     "-OrderCash",     "-ShopSystem"};
  EXPECT_EQ(log, expected);
}

TEST(Visitor, DispatchToSupertype) {
  Shop s(kModel);
  int clients = 0;
  int orders = 0;
  VisitorUnit u("count");
  u.on_visit("Client", [&](AstNode&, TraversalControl&) { ++clients; });
  u.on_visit("Order", [&](AstNode&, TraversalControl&) { ++orders; });
  VisitorSet v;
  v.add(u);
  v.traverse(s.root(), &s.c->metamodel);
  EXPECT_EQ(clients, 2);
  EXPECT_EQ(orders, 2);
}

TEST(Visitor, FailIsSticky) {
  Shop s(kModel);
  int after = 0;
  VisitorUnit a("a");
  a.on_visit("OrderCreditcard", [](AstNode&, TraversalControl& c) { c.fail(); });
  VisitorUnit b("b");
  b.on_visit("OrderCash", [&](AstNode&, TraversalControl&) { ++after; });
  VisitorSet v;
  v.add(a).add(b);
  EXPECT_FALSE(v.traverse(s.root(), &s.c->metamodel));
  EXPECT_EQ(after, 1);
}

TEST(Visitor, OwnVisitSkipsChildren) {
  Shop s(kModel);
  int addresses = 0;
  VisitorUnit u("own");
  u.on_own_visit("Client", [](AstNode&, TraversalControl&) {});
  u.on_visit("Address", [&](AstNode&, TraversalControl&) { ++addresses; });
  VisitorSet v;
  v.add(u);
  v.traverse(s.root(), &s.c->metamodel);
  EXPECT_EQ(addresses, 0);
  Handler nop = [](AstNode&, TraversalControl&) {};
  EXPECT_THROW(VisitorUnit("x").on_visit("A", nop).on_own_visit("A", nop), std::invalid_argument);
}

TEST(Visitor, StopTraverse) {
  Shop s(kModel);
  std::vector<std::string> log;
  VisitorUnit u("stop");
  u.on_visit("PremiumClient", [&](AstNode&, TraversalControl& c) {
    log.push_back("premium");
    c.stopTraverse();
  });
  u.on_visit("Order", [&](AstNode&, TraversalControl&) { log.push_back("order"); });
  u.on_end_visit("ShopSystem", [&](AstNode&, TraversalControl&) { log.push_back("end"); });
  VisitorSet v;
  v.add(u);
  EXPECT_TRUE(v.traverse(s.root(), &s.c->metamodel));
  EXPECT_EQ(log, std::vector<std::string>{"premium"});
}

TEST(Visitor, StopChildrenThenStartTraverse) {
  Shop s(kModel);
  std::vector<std::string> log;
  VisitorUnit u("manual");
  u.on_visit("ShopSystem", [&](AstNode& n, TraversalControl& c) {
    c.stopTraverseChildren();
    // orders first, by hand
    for (AstNode* o : n.children("order")) c.startTraverse(*o);
  });
  u.on_visit("Order", [&](AstNode& n, TraversalControl&) { log.push_back(n.type); });
  u.on_visit("Client", [&](AstNode& n, TraversalControl&) { log.push_back(n.type); });
  VisitorSet v;
  v.add(u);
  v.traverse(s.root(), &s.c->metamodel);
  EXPECT_EQ(log, (std::vector<std::string>{"OrderCreditcard", "OrderCash"}));
}

TEST(Visitor, HandlerExceptionsCarryPosition) {
  Shop s(kModel);
  VisitorUnit u("boom");
  u.on_visit("OrderCash", [](AstNode&, TraversalControl&) { throw std::runtime_error("bad"); });
  VisitorSet v;
  v.add(u);
  try {
    v.traverse(s.root(), &s.c->metamodel);
    FAIL() << "no exception";
  } catch (const TraversalError& e) {
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_GT(e.pos().column, 1);
  }
}

TEST(Visitor, ExactTypesWithoutMetamodel) {
  Shop s(kModel);
  int n = 0;
  VisitorUnit u("exact");
  u.on_visit("Client", [&](AstNode&, TraversalControl&) { ++n; });
  VisitorSet v;
  v.add(u);
  v.traverse(s.root());
  EXPECT_EQ(n, 1);
}

}  // namespace
}  // namespace lwb
