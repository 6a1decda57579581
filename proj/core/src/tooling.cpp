#include "lwb/tooling.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace lwb {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_dots(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!s.empty()) out.push_back(cur);
  return out;
}

// First word of a model that is not part of its package/import header.
std::string first_keyword(std::string_view t) {
  std::size_t i = 0;
  for (;;) {
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    if (t.substr(i, 2) == "//") {
      while (i < t.size() && t[i] != '\n') ++i;
      continue;
    }
    if (t.substr(i, 2) == "/*") {
      auto e = t.find("*/", i + 2);
      i = e == std::string_view::npos ? t.size() : e + 2;
      continue;
    }
    std::size_t s = i;
    while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_')) ++i;
    if (s == i) return i < t.size() ? std::string(1, t[i]) : std::string();
    std::string w(t.substr(s, i - s));
    if (w != "package" && w != "import") return w;
    auto semi = t.find(';', i);
    if (semi == std::string_view::npos) return {};
    i = semi + 1;
  }
}

}  // namespace

void RootFactory::add_extension(std::string ext, FactoryRoute r) {
  if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
  byExt_[std::move(ext)] = std::move(r);
}

void RootFactory::add_keyword(std::string keyword, FactoryRoute r) { byKeyword_[std::move(keyword)] = std::move(r); }

std::optional<FactoryRoute> RootFactory::route(const fs::path& file, std::string_view text) const {
  std::string ext = file.extension().string();
  if (!ext.empty()) ext.erase(0, 1);
  if (auto it = byExt_.find(ext); it != byExt_.end()) return it->second;
  if (auto it = byKeyword_.find(first_keyword(text)); it != byKeyword_.end()) return it->second;
  return default_;
}

RootPtr RootFactory::create(const fs::path& file, Diagnostics& diags) const {
  auto text = read_file(file);
  if (!text) {
    diags.error({file.string(), 1, 1}, "cannot read input file");
    return nullptr;
  }
  auto r = route(file, *text);
  if (!r || !r->component) {
    diags.error({file.string(), 1, 1}, "no language registered for this input (extension or first keyword)");
    return nullptr;
  }
  auto root = std::make_shared<RootObject>();
  root->sourceFile = file;
  root->text = std::move(*text);
  root->component = r->component;
  root->start = r->start;
  return root;
}

std::vector<std::string> RootFactory::extensions() const {
  std::vector<std::string> out;
  for (const auto& [e, _] : byExt_) out.push_back(e);
  return out;
}

void parse_root(RootObject& root, const std::string* expectedPackage) {
  ParseOptions o;
  o.start = root.start;
  std::string file = root.sourceFile.string();
  root.parse = parse_text(*root.component, root.text, file, o);
  root.diags.append(root.parse.diags);
  if (!root.root()) return;
  const LanguageComponent& c = *root.component;
  root.package = root.parse.package;
  const AstNode* top = root.root();
  Value key = top->get(key_attribute(c.metamodel, c.resolver, top->type));
  if (const auto* s = std::get_if<std::string>(&key)) root.name = *s;
  if (c.grammar.options.compileUnitStart.empty()) return;

  SourcePos pkgPos = root.package.empty() ? SourcePos{file, 1, 1} : root.parse.packagePos;
  if (expectedPackage) {
    if (root.package != *expectedPackage)
      root.diags.error(pkgPos, "package '" + root.package + "' does not match its location (expected '" +
                                   *expectedPackage + "')");
  } else if (!root.package.empty()) {
    auto parts = split_dots(root.package);
    std::vector<std::string> dirs;
    for (const auto& d : root.sourceFile.parent_path()) dirs.push_back(d.string());
    bool ok = dirs.size() >= parts.size() && std::equal(parts.rbegin(), parts.rend(), dirs.rbegin());
    if (!ok) {
      std::string want;
      for (const auto& p : parts) want += (want.empty() ? "" : "/") + p;
      root.diags.error(pkgPos, "package '" + root.package + "' requires the file to be in directory '" + want + "'");
    }
  }
  std::string stem = root.sourceFile.stem().string();
  if (root.name != stem)
    root.diags.error(top->pos, "model name '" + root.name + "' does not match file name '" +
                                   root.sourceFile.filename().string() + "'");
}

// ---- output ----

Result<bool> write_output(const fs::path& path, std::string_view content, const ToolConfig& config) {
  Result<bool> r;
  fs::path base = config.outputRoot.lexically_normal();
  fs::path full = (path.is_absolute() ? path : config.outputRoot / path).lexically_normal();
  fs::path rel = full.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") {
    r.diags.error({path.string(), 1, 1}, "output path is outside the output root '" + config.outputRoot.string() + "'");
    return r;
  }
  if (config.dryRun) {
    r.value = false;
    return r;
  }
  std::error_code ec;
  if (fs::exists(full, ec)) {
    auto old = read_file(full);
    if (old && *old == content) {
      r.value = false;
      return r;
    }
  }
  fs::create_directories(full.parent_path(), ec);
  if (ec) {
    r.diags.error({full.string(), 1, 1}, "cannot create directory: " + ec.message());
    return r;
  }
  std::ofstream out(full, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    r.diags.error({full.string(), 1, 1}, "cannot write file");
    return r;
  }
  r.value = true;
  return r;
}

// ---- model loading ----

void ModelLoader::remember(const RootPtr& root) {
  if (root && !root->name.empty()) cache_.emplace(root->qualified_name(), root);
}

RootPtr ModelLoader::load(const std::string& qualifiedName, Diagnostics& diags, const SourcePos& from) {
  if (auto it = cache_.find(qualifiedName); it != cache_.end()) return it->second;
  auto parts = split_dots(qualifiedName);
  if (parts.empty()) {
    diags.error(from, "empty model name");
    return nullptr;
  }
  std::string name = parts.back();
  parts.pop_back();
  std::string pkg;
  for (const auto& p : parts) pkg += (pkg.empty() ? "" : ".") + p;
  for (const auto& dir : config_.modelPath) {
    fs::path d = dir;
    for (const auto& p : parts) d /= p;
    for (const auto& ext : config_.factory.extensions()) {
      fs::path f = d / (name + "." + ext);
      if (!fs::exists(f)) continue;
      RootPtr root = config_.factory.create(f, diags);
      if (!root) return nullptr;
      ++filesRead_;
      root->imported = true;
      cache_[qualifiedName] = root;
      parse_root(*root, &pkg);
      diags.append(root->diags);
      load_imports(*root, diags);
      return root;
    }
  }
  diags.error(from, "model '" + qualifiedName + "' not found on the model path");
  return nullptr;
}

void ModelLoader::load_imports(RootObject& root, Diagnostics& diags) {
  for (const auto& [imp, pos] : root.parse.imports) load(imp, diags, pos);
}

Result<RootPtr> load_model(const std::string& qualifiedName, const ToolConfig& config) {
  Result<RootPtr> r;
  ModelLoader loader(config);
  RootPtr root = loader.load(qualifiedName, r.diags);
  if (root && !r.diags.has_errors()) r.value = root;
  return r;
}

// ---- workflow ----

std::vector<RootPtr> ToolContext::all_roots() const {
  std::vector<RootPtr> out = roots;
  for (const auto& [_, r] : loader.cache())
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  return out;
}

Result<bool> ToolContext::write(const fs::path& rel, std::string_view content) {
  auto r = write_output(rel, content, config);
  diags.append(r.diags);
  if (r.value && *r.value) written.push_back(config.outputRoot / rel);
  return r;
}

const ExecutionUnit* UnitRegistry::find(std::string_view key) const {
  auto it = units_.find(key);
  return it == units_.end() ? nullptr : &it->second;
}

std::vector<std::string> UnitRegistry::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : units_) out.push_back(k);
  return out;
}

const Metamodel* metamodel_for(const LanguageComponent& c, const std::string& language) {
  std::set<const LanguageComponent*> seen;
  std::function<const Metamodel*(const LanguageComponent&)> find = [&](const LanguageComponent& x) -> const Metamodel* {
    if (x.language() == language) return &x.metamodel;
    if (!seen.insert(&x).second) return nullptr;
    for (const auto& [_, b] : x.embeddings)
      for (const auto& cand : b.candidates)
        if (const auto* m = find(*cand.component)) return m;
    return nullptr;
  };
  return find(c);
}

std::vector<std::string> lineage_for(const LanguageComponent& c, const std::string& language) {
  std::set<const LanguageComponent*> seen;
  std::function<const LanguageComponent*(const LanguageComponent&)> find =
      [&](const LanguageComponent& x) -> const LanguageComponent* {
    if (x.language() == language) return &x;
    if (!seen.insert(&x).second) return nullptr;
    for (const auto& [_, b] : x.embeddings)
      for (const auto& cand : b.candidates)
        if (const auto* m = find(*cand.component)) return m;
    return nullptr;
  };
  const LanguageComponent* hit = find(c);
  return hit ? hit->grammar.lineage : std::vector<std::string>{language};
}

namespace {

fs::path output_dir(const RootObject& r) {
  fs::path p;
  for (const auto& part : split_dots(r.package)) p /= part;
  return p;
}

void unit_parse(ToolContext& ctx) {
  for (auto& r : ctx.roots) {
    if (r->root() || r->parse.diags.has_errors()) continue;
    parse_root(*r);
    ctx.loader.remember(r);
  }
  for (auto& r : ctx.roots)
    if (r->root()) ctx.loader.load_imports(*r, r->diags);
}

void unit_link(ToolContext& ctx) {
  std::map<const LanguageComponent*, std::vector<AstNode*>> groups;
  for (const auto& r : ctx.all_roots())
    if (r->root()) groups[r->component.get()].push_back(r->root());
  for (const auto& [c, nodes] : groups) {
    SymbolTable table = build_symbols(nodes, c->metamodel, c->resolver, ctx.diags);
    LinkReport rep = establish_links(nodes, c->metamodel, table, c->resolver);
    ctx.diags.append(rep.diagnostics(ctx.config.strictLinks ? Severity::error : Severity::warning));
    for (const auto& r : ctx.all_roots())
      if (r->component.get() == c) r->annotations["links"] = rep.established;
  }
}

void unit_check(ToolContext& ctx) {
  for (const auto& r : ctx.all_roots()) {
    if (!r->root()) continue;
    const LanguageComponent& c = *r->component;
    r->diags.append(check_conformance(*r->root(), c.metamodel,
                                      [&c](const std::string& lang) { return metamodel_for(c, lang); }));
  }
}

void unit_eval(ToolContext& ctx) {
  if (!ctx.config.calculators) {
    ctx.diags.error({}, "eval-attrs: no attribute calculators configured");
    return;
  }
  for (const auto& r : ctx.roots) {
    if (!r->root()) continue;
    const LanguageComponent& c = *r->component;
    AttributeEvaluator::Options o;
    o.lineage = [&c](const std::string& lang) { return lineage_for(c, lang); };
    o.metamodel = [&c](const AstNode& n) { return metamodel_for(c, n.language); };
    for (const auto& attr : ctx.config.evalAttributes) {
      AttributeEvaluator first(*ctx.config.calculators, o);
      auto v = first.eval(*r->root(), attr);
      r->diags.append(v.diags);
      if (!v) continue;
      // Calculators must not depend on hidden state.
      AttributeEvaluator second(*ctx.config.calculators, o);
      auto w = second.eval(*r->root(), attr);
      if (!w || *w != *v)
        r->diags.error(r->root()->pos, "attribute '" + attr + "' gives different values on re-evaluation");
      r->annotations["attr:" + attr] = *v;
    }
  }
}

void unit_pretty(ToolContext& ctx) {
  for (const auto& r : ctx.roots) {
    if (!r->root()) continue;
    auto text = pretty_print(*r->root(), *r->component);
    r->diags.append(text.diags);
    if (!text) continue;
    std::string out = *text;
    if (!r->package.empty()) out = "package " + r->package + ";\n" + out;
    ctx.write(output_dir(*r) / r->sourceFile.filename(), out);
  }
}

void unit_json(ToolContext& ctx) {
  for (const auto& r : ctx.roots) {
    if (!r->root()) continue;
    ctx.write(output_dir(*r) / (r->sourceFile.stem().string() + ".json"), to_json(*r->root()) + "\n");
  }
}

}  // namespace

UnitRegistry UnitRegistry::with_builtins() {
  UnitRegistry u;
  u.add("parse", unit_parse);
  u.add("link", unit_link);
  u.add("check-constraints", unit_check);
  u.add("eval-attrs", unit_eval);
  u.add("pretty-print", unit_pretty);
  u.add("emit-json", unit_json);
  return u;
}

WorkflowReport run_workflow(const ToolConfig& config, const std::vector<fs::path>& inputs, const UnitRegistry& units) {
  WorkflowReport rep;
  ToolContext ctx(config);
  for (const auto& in : inputs)
    if (auto r = config.factory.create(in, ctx.diags)) ctx.roots.push_back(r);
  for (const auto& key : config.units) {
    const ExecutionUnit* u = units.find(key);
    if (!u) {
      ctx.diags.error({}, "unknown execution unit '" + key + "'");
      break;
    }
    try {
      (*u)(ctx);
    } catch (const std::exception& e) {
      ctx.diags.error({}, "execution unit '" + key + "' failed: " + e.what());
      break;
    }
  }
  rep.diags = ctx.diags;
  rep.roots = ctx.all_roots();
  for (const auto& r : rep.roots) rep.diags.append(r->diags);
  rep.written = ctx.written;
  rep.exitStatus = rep.diags.has_errors() ? 1 : 0;
  return rep;
}

ToolConfig tool_config_from(const Composition& comp) {
  ToolConfig t;
  const auto& cfg = comp.config;
  auto rel = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : cfg.baseDir / p; };
  for (const auto& spec : cfg.components) {
    FactoryRoute route{comp.find(spec.name), spec.start.empty() ? std::string() : spec.start.front()};
    for (const auto& e : spec.extensions) t.factory.add_extension(e, route);
    for (const auto& k : spec.keywords) t.factory.add_keyword(k, route);
  }
  if (cfg.components.size() == 1) t.factory.set_default({comp.find(cfg.components.front().name), {}});
  if (!cfg.tool.units.empty()) t.units = cfg.tool.units;
  for (const auto& p : cfg.tool.modelPath) t.modelPath.push_back(rel(p));
  t.outputRoot = rel(cfg.tool.outputRoot);
  t.dryRun = cfg.tool.dryRun;
  t.strictLinks = cfg.tool.strictLinks;
  return t;
}

}  // namespace lwb
