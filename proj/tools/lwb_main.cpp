#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lwb/component.hpp"
#include "lwb/llk.hpp"
#include "lwb/metamodel.hpp"
#include "lwb/tooling.hpp"
#include "shop/shop_attributes.hpp"

namespace fs = std::filesystem;
using namespace lwb;

namespace {

int report(const Diagnostics& d) {
  d.print(std::cerr);
  return d.has_errors() ? 1 : 0;
}

// Directory the package of `g` is rooted at, if the file sits where its
// package says.
std::optional<fs::path> package_root(const fs::path& file, const GrammarDef& g) {
  fs::path dir = fs::absolute(file).parent_path();
  std::stringstream ss(g.package);
  std::vector<std::string> parts;
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (dir.filename() != *it) return std::nullopt;
    dir = dir.parent_path();
  }
  return dir;
}

fs::path grammar_file(const fs::path& root, const std::string& qn) {
  fs::path p = root;
  std::stringstream ss(qn);
  for (std::string part; std::getline(ss, part, '.');) p /= part;
  p += ".mcg";
  return p;
}

// Links each grammar given on the command line, finding supergrammars in the
// search path and next to the grammar's package root.
std::vector<LinkedGrammar> link_files(const std::vector<std::string>& files, std::vector<std::string> searchPath,
                                      Diagnostics& diags) {
  std::map<std::string, GrammarDef> available;
  std::vector<std::string> mains;
  for (const auto& f : files) {
    auto g = load_grammar_file(f);
    diags.append(g.diags);
    if (!g) continue;
    if (auto root = package_root(f, *g)) searchPath.push_back(root->string());
    mains.push_back(g->qualified_name());
    available.emplace(g->qualified_name(), std::move(*g.value));
  }
  // Pull in supergrammars until nothing is missing.
  std::vector<std::string> todo = mains;
  while (!todo.empty()) {
    std::string qn = todo.back();
    todo.pop_back();
    auto it = available.find(qn);
    if (it == available.end()) continue;
    for (const auto& s : it->second.supers) {
      if (available.count(s)) continue;
      for (const auto& dir : searchPath) {
        fs::path p = grammar_file(dir, s);
        if (!fs::exists(p)) continue;
        auto g = load_grammar_file(p);
        diags.append(g.diags);
        if (g) {
          available.emplace(s, std::move(*g.value));
          todo.push_back(s);
        }
        break;
      }
    }
  }
  std::vector<LinkedGrammar> out;
  for (const auto& qn : mains) {
    auto lg = link_inheritance(available.at(qn), available);
    diags.append(lg.diags);
    if (lg) out.push_back(std::move(*lg.value));
  }
  return out;
}

std::optional<Composition> load_composition(const std::string& file, Diagnostics& diags) {
  auto cfg = load_composition_config(file);
  diags.append(cfg.diags);
  if (!cfg) return std::nullopt;
  auto shared = std::make_shared<ConverterRegistry>(ConverterRegistry::with_builtins());
  auto comp = compose(*cfg, shared);
  diags.append(comp.diags);
  if (!comp) return std::nullopt;
  return std::move(*comp.value);
}

std::vector<VirtualAttributeMap> load_maps(const Composition& comp, Diagnostics& diags) {
  std::vector<VirtualAttributeMap> out;
  for (const auto& f : comp.config.tool.attributeMaps) {
    fs::path p = comp.config.baseDir / f;
    std::ifstream in(p);
    if (!in) {
      diags.error({p.string(), 1, 1}, "cannot read attribute map");
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    auto maps = parse_amap(ss.str(), p.string());
    diags.append(maps.diags);
    if (maps) out.insert(out.end(), maps->begin(), maps->end());
  }
  return out;
}

// `slot[i]/slot[i]/...` from the root; a missing index means 0.
AstNode* find_node(AstNode* root, const std::string& path, Diagnostics& diags) {
  AstNode* n = root;
  std::stringstream ss(path);
  for (std::string step; std::getline(ss, step, '/');) {
    if (step.empty()) continue;
    std::size_t idx = 0;
    std::string name = step;
    if (auto lb = step.find('['); lb != std::string::npos && step.back() == ']') {
      name = step.substr(0, lb);
      try {
        idx = std::stoul(step.substr(lb + 1, step.size() - lb - 2));
      } catch (const std::exception&) {
        diags.error({}, "bad index in node path step '" + step + "'");
        return nullptr;
      }
    }
    const Slot* s = n->slot(name);
    if (!s || !s->composition || idx >= s->children.size()) {
      diags.error(n->pos, "node path step '" + step + "' does not exist at " + n->type);
      return nullptr;
    }
    n = s->children[idx];
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lwb: compositional textual language workbench"};
  app.require_subcommand(1);

  std::vector<std::string> grammars;
  std::vector<std::string> includes;
  int k = 0;
  bool strict = false;
  std::string format = "json";
  std::string config;
  std::vector<std::string> models;
  std::string out = "json";
  std::vector<std::string> units;
  std::string outputRoot;
  bool dryRun = false;
  std::string attr;
  std::string nodePath;

  auto* check = app.add_subcommand("check", "Parse, validate and analyze grammars");
  check->add_option("grammar", grammars, "Grammar files")->required();
  check->add_option("-I,--grammar-path", includes, "Directories searched for supergrammars");
  check->add_option("--k", k, "Lookahead depth (default from the grammar, else 3)");
  check->add_flag("--strict", strict, "Treat warnings as errors");

  auto* ebnf = app.add_subcommand("ebnf", "Print the expanded EBNF of grammars");
  ebnf->add_option("grammar", grammars, "Grammar files")->required();
  ebnf->add_option("-I,--grammar-path", includes, "Directories searched for supergrammars");

  auto* ast = app.add_subcommand("ast", "Print the derived metamodel");
  ast->add_option("grammar", grammars, "Grammar files")->required();
  ast->add_option("-I,--grammar-path", includes, "Directories searched for supergrammars");
  ast->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

  auto* parse = app.add_subcommand("parse", "Parse and link models, print the AST");
  parse->add_option("config", config, "Composition config")->required();
  parse->add_option("model", models, "Model files")->required();
  parse->add_option("--out", out, "Output format")->check(CLI::IsMember({"json"}));

  auto* run = app.add_subcommand("run", "Run the tool workflow");
  run->add_option("config", config, "Composition config")->required();
  run->add_option("model", models, "Model files");
  run->add_option("--units", units, "Execution units in order (default from the config)")->delimiter(',');
  run->add_option("--output-root", outputRoot, "Directory for generated files");
  run->add_flag("--dry-run", dryRun, "Do not touch the file system");
  run->add_flag("--strict-links", strict, "Unresolved links are errors");

  auto* eval = app.add_subcommand("eval", "Evaluate an attribute");
  eval->add_option("config", config, "Composition config")->required();
  eval->add_option("model", models, "Model file")->required()->expected(1);
  eval->add_option("--attr", attr, "Attribute or virtual attribute")->required();
  eval->add_option("--node", nodePath, "Node path from the root, e.g. order[1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Diagnostics diags;

  if (check->parsed() || ebnf->parsed() || ast->parsed()) {
    auto linked = link_files(grammars, includes, diags);
    if (diags.has_errors()) return report(diags);
    for (const auto& lg : linked) {
      if (check->parsed()) {
        auto mm = derive_metamodel(lg);
        diags.append(mm.diags);
        int depth = k > 0 ? k : lg.options.lookaheadK;
        auto llk = analyze_llk(lg, depth);
        diags.append(llk.diags);
      } else if (ebnf->parsed()) {
        std::cout << emit_ebnf(lg);
      } else {
        auto mm = derive_metamodel(lg);
        diags.append(mm.diags);
        if (mm) std::cout << emit_metamodel_report(*mm, format == "dot" ? ReportFormat::dot : ReportFormat::json);
      }
    }
    if (strict) diags.escalate_warnings();
    return report(diags);
  }

  auto comp = load_composition(config, diags);
  if (!comp) {
    report(diags);
    return 1;
  }
  ToolConfig tc = tool_config_from(*comp);

  if (parse->parsed()) {
    tc.units = {"parse", "link"};
    auto rep = run_workflow(tc, {models.begin(), models.end()});
    for (const auto& r : rep.roots)
      if (r->root() && !r->imported) std::cout << to_json(*r->root()) << '\n';
    return report(rep.diags);
  }

  if (run->parsed()) {
    if (!units.empty()) tc.units = units;
    if (!outputRoot.empty()) tc.outputRoot = outputRoot;
    tc.dryRun = tc.dryRun || dryRun;
    tc.strictLinks = tc.strictLinks || strict;
    auto maps = load_maps(*comp, diags);
    tc.calculators = shop::shop_registry(*comp, maps, diags);
    if (diags.has_errors()) return report(diags);
    auto rep = run_workflow(tc, {models.begin(), models.end()});
    for (const auto& w : rep.written) std::cout << "wrote " << w.string() << '\n';
    return report(rep.diags);
  }

  // eval
  auto maps = load_maps(*comp, diags);
  auto reg = shop::shop_registry(*comp, maps, diags);
  if (diags.has_errors()) return report(diags);
  tc.units = {"parse", "link"};
  auto rep = run_workflow(tc, {models.front()});
  diags.append(rep.diags);
  if (rep.exitStatus != 0 || rep.roots.empty() || !rep.roots.front()->root()) return report(diags);
  const RootObject& root = *rep.roots.front();
  AstNode* node = find_node(root.root(), nodePath, diags);
  if (!node) return report(diags);
  const LanguageComponent& c = *root.component;
  AttributeEvaluator::Options o;
  o.lineage = [&c](const std::string& lang) { return lineage_for(c, lang); };
  o.metamodel = [&c](const AstNode& n) { return metamodel_for(c, n.language); };
  auto v = eval_attribute(*node, attr, *reg, o);
  diags.append(v.diags);
  if (v) std::cout << to_display(*v) << '\n';
  return report(diags);
}
