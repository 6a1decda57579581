#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "lwb/tooling.hpp"

namespace lwb {
namespace {

namespace fs = std::filesystem;

struct ShopTool {
  Composition comp = test::composition_from_sample("shop.json");
  ToolConfig config = tool_config_from(comp);
};

TEST(Tooling, WriteOnlyWhenChanged) {
  ToolConfig c;
  c.outputRoot = test::scratch_dir("write");
  auto first = write_output("a/b.txt", "hello", c);
  ASSERT_TRUE(first.ok());
  EXPECT_TRUE(*first);
  auto stamp = fs::last_write_time(c.outputRoot / "a/b.txt");
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  auto second = write_output("a/b.txt", "hello", c);
  ASSERT_TRUE(second.ok());
  EXPECT_FALSE(*second);
  EXPECT_EQ(fs::last_write_time(c.outputRoot / "a/b.txt"), stamp);
  auto third = write_output("a/b.txt", "changed", c);
  EXPECT_TRUE(*third);
  EXPECT_EQ(test::read_text(c.outputRoot / "a/b.txt"), "changed");
}

TEST(Tooling, DryRunAndEscape) {
  ToolConfig c;
  c.outputRoot = test::scratch_dir("dry");
  c.dryRun = true;
  auto r = write_output("x.txt", "data", c);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(*r);
  EXPECT_FALSE(fs::exists(c.outputRoot / "x.txt"));
  c.dryRun = false;
  EXPECT_FALSE(write_output("../escape.txt", "data", c).ok());
  EXPECT_FALSE(write_output("a/../../escape.txt", "data", c).ok());
  EXPECT_TRUE(write_output("a/../inside.txt", "data", c).ok());
}

TEST(Tooling, FactoryRoutes) {
  ShopTool t;
  auto byExt = t.config.factory.route("x/M.shop", "");
  ASSERT_TRUE(byExt);
  EXPECT_EQ(byExt->component->name, "shopsystem");
  auto byLedger = t.config.factory.route("x/M.ledger", "");
  EXPECT_EQ(byLedger->component->name, "shop2");
  auto byKeyword = t.config.factory.route("x/M.txt", "package a.b; // c\nshop M");
  ASSERT_TRUE(byKeyword);
  EXPECT_EQ(byKeyword->component->name, "shopsystem");
  EXPECT_FALSE(t.config.factory.route("x/M.txt", "other"));
}

TEST(Tooling, LoadModel) {
  ShopTool t;
  auto r = load_model("shop.EU.Main", t.config);
  ASSERT_TRUE(r.ok()) << r.diags[0].format();
  EXPECT_EQ((*r)->name, "Main");
  EXPECT_EQ((*r)->package, "shop.EU");
  EXPECT_FALSE(load_model("shop.EU.Nowhere", t.config).ok());
  auto renamed = load_model("shop.EU.Renamed", t.config);
  ASSERT_FALSE(renamed.ok());
  EXPECT_NE(renamed.diags[0].message.find("does not match file name"), std::string::npos);
}

TEST(Tooling, LoaderCachesImports) {
  ShopTool t;
  ModelLoader loader(t.config);
  Diagnostics d;
  auto a = loader.load("shop.EU.Main", d);
  auto b = loader.load("shop.EU.Customers", d);
  auto c = loader.load("shop.EU.Main", d);
  EXPECT_TRUE(d.empty());
  EXPECT_EQ(a, c);
  EXPECT_TRUE(b->imported);
  EXPECT_EQ(loader.files_read(), 2u);
}

TEST(Tooling, WorkflowLinksAcrossFiles) {
  ShopTool t;
  auto rep = run_workflow(t.config, {test::sample_path("models/shop/EU/Main.shop")});
  EXPECT_EQ(rep.exitStatus, 0);
  ASSERT_EQ(rep.roots.size(), 2u);
  AstNode* main = rep.roots[0]->root();
  auto orders = main->children("order");
  ASSERT_EQ(orders.size(), 2u);
  ASSERT_EQ(orders[1]->links["orderingClient"].size(), 1u);
  EXPECT_EQ(orders[1]->links["orderingClient"][0]->language, "mc.examples.shopsystem");
}

TEST(Tooling, WorkflowStrictLinkError) {
  ShopTool t;
  auto dir = test::scratch_dir("strict");
  fs::create_directories(dir / "shop");
  std::ofstream(dir / "shop/Bad.shop") << "package shop;\nshop Bad client A cashorder B 1\n";
  auto rep = run_workflow(t.config, {dir / "shop/Bad.shop"});
  EXPECT_EQ(rep.exitStatus, 1);
  EXPECT_EQ(rep.diags.error_count(), 1u);
  t.config.strictLinks = false;
  auto lax = run_workflow(t.config, {dir / "shop/Bad.shop"});
  EXPECT_EQ(lax.exitStatus, 0);
  EXPECT_EQ(lax.diags.warning_count(), 1u);
}

TEST(Tooling, WorkflowEdgeCases) {
  ShopTool t;
  auto empty = run_workflow(t.config, {});
  EXPECT_EQ(empty.exitStatus, 0);
  EXPECT_TRUE(empty.diags.empty());
  t.config.units = {"parse", "nosuch"};
  EXPECT_EQ(run_workflow(t.config, {test::sample_path("models/shop/EU/Main.shop")}).exitStatus, 1);
  t.config.units = {"parse"};
  EXPECT_EQ(run_workflow(t.config, {"/nonexistent/M.shop"}).exitStatus, 1);
}

TEST(Tooling, PackageViolations) {
  ShopTool t;
  auto misplaced = run_workflow(t.config, {test::sample_path("models/shop/US/Misplaced.shop")});
  EXPECT_EQ(misplaced.exitStatus, 1);
  EXPECT_NE(misplaced.diags[0].message.find("directory 'shop/EU'"), std::string::npos) << misplaced.diags[0].message;
  auto renamed = run_workflow(t.config, {test::sample_path("models/shop/EU/Renamed.shop")});
  EXPECT_EQ(renamed.exitStatus, 1);
}

TEST(Tooling, CustomUnitAndOutputs) {
  ShopTool t;
  t.config.outputRoot = test::scratch_dir("units");
  UnitRegistry units = UnitRegistry::with_builtins();
  units.add("count", [](ToolContext& ctx) {
    for (auto& r : ctx.roots) r->annotations["count"] = r->root()->children("order").size();
  });
  t.config.units = {"parse", "link", "count", "pretty-print", "emit-json"};
  auto rep = run_workflow(t.config, {test::sample_path("models/shop/EU/Main.shop")}, units);
  ASSERT_EQ(rep.exitStatus, 0);
  EXPECT_EQ(std::any_cast<std::size_t>(rep.roots[0]->annotations.at("count")), 2u);
  EXPECT_EQ(rep.written.size(), 2u);
  EXPECT_TRUE(fs::exists(t.config.outputRoot / "shop/EU/Main.shop"));
  EXPECT_TRUE(fs::exists(t.config.outputRoot / "shop/EU/Main.json"));
  auto again = run_workflow(t.config, {test::sample_path("models/shop/EU/Main.shop")}, units);
  EXPECT_TRUE(again.written.empty());
}

}  // namespace
}  // namespace lwb
