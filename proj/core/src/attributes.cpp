#include "lwb/attributes.hpp"

#include <cctype>

namespace lwb {

// ---- .amap dialect ----

namespace {

struct AmapTok {
  enum class Kind { name, punct, eof } kind = Kind::eof;
  std::string text;
  SourcePos pos;
};

Result<std::vector<AmapTok>> amap_tokens(std::string_view t, const std::string& file) {
  Result<std::vector<AmapTok>> r;
  std::vector<AmapTok> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto step = [&] {
    if (t[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < t.size()) {
    char c = t[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      step();
    } else if (t.substr(i, 2) == "//") {
      while (i < t.size() && t[i] != '\n') step();
    } else if (t.substr(i, 2) == "/*") {
      while (i < t.size() && t.substr(i, 2) != "*/") step();
      if (i < t.size()) {
        step();
        step();
      }
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      AmapTok k{AmapTok::Kind::name, {}, {file, line, col}};
      while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_' || t[i] == '.')) {
        k.text += t[i];
        step();
      }
      out.push_back(std::move(k));
    } else if (c == '{' || c == '}' || c == '=' || c == '/' || c == ';') {
      out.push_back({AmapTok::Kind::punct, std::string(1, c), {file, line, col}});
      step();
    } else {
      r.diags.error({file, line, col}, std::string("unexpected character '") + c + "' in attribute map");
      return r;
    }
  }
  out.push_back({AmapTok::Kind::eof, {}, {file, line, col}});
  r.value = std::move(out);
  return r;
}

}  // namespace

Result<std::vector<VirtualAttributeMap>> parse_amap(std::string_view text, const std::string& file) {
  Result<std::vector<VirtualAttributeMap>> r;
  auto toks = amap_tokens(text, file);
  if (!toks) {
    r.diags = toks.diags;
    return r;
  }
  const auto& ts = *toks;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    const auto& t = ts[i];
    r.diags.error(t.pos, "expected " + what + ", found " + (t.kind == AmapTok::Kind::eof ? "end of file" : "'" + t.text + "'"));
  };
  auto punct = [&](char p) {
    if (ts[i].kind == AmapTok::Kind::punct && ts[i].text[0] == p) {
      ++i;
      return true;
    }
    return false;
  };
  std::vector<VirtualAttributeMap> maps;
  while (ts[i].kind != AmapTok::Kind::eof) {
    VirtualAttributeMap m;
    if (ts[i].kind != AmapTok::Kind::name || ts[i].text.find('.') != std::string::npos) {
      fail("virtual attribute name");
      return r;
    }
    m.name = ts[i].text;
    m.pos = ts[i].pos;
    ++i;
    if (!punct('{')) {
      fail("'{'");
      return r;
    }
    while (!punct('}')) {
      if (ts[i].kind != AmapTok::Kind::name) {
        fail("qualified attribute or '}'");
        return r;
      }
      VirtualBinding b;
      b.pos = ts[i].pos;
      const std::string& q = ts[i].text;
      auto dot = q.rfind('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == q.size()) {
        r.diags.error(b.pos, "'" + q + "' must be <grammar>.<attribute>");
        return r;
      }
      b.grammar = q.substr(0, dot);
      b.attribute = q.substr(dot + 1);
      ++i;
      if (!punct('=')) {
        fail("'='");
        return r;
      }
      if (!punct('/')) {
        fail("'/' before the calculator key");
        return r;
      }
      if (ts[i].kind != AmapTok::Kind::name) {
        fail("calculator key");
        return r;
      }
      b.calculatorKey = ts[i++].text;
      if (!punct(';')) {
        fail("';'");
        return r;
      }
      m.bindings.push_back(std::move(b));
    }
    maps.push_back(std::move(m));
  }
  r.value = std::move(maps);
  return r;
}

// ---- registry ----

void CalculatorRegistry::declare(const AttributeDecl& d) { decls_[{d.owningGrammar, d.name}] = d; }

void CalculatorRegistry::declare_all(const LinkedGrammar& g) {
  for (const auto& d : g.attributeDecls) declare(d);
}

void CalculatorRegistry::add(Calculation c) {
  std::string key = c.key;
  calculations_[key] = std::move(c);
}

Diagnostics CalculatorRegistry::bind(const std::string& grammar, const std::string& attr, const std::string& key) {
  Diagnostics d;
  if (!find_calculation(key)) d.error({}, "unknown calculator '" + key + "' for " + grammar + "." + attr);
  if (!d.has_errors()) bindings_[{grammar, attr}] = key;
  return d;
}

const AttributeDecl* CalculatorRegistry::find_decl(std::string_view grammar, std::string_view attr) const {
  auto it = decls_.find({std::string(grammar), std::string(attr)});
  return it == decls_.end() ? nullptr : &it->second;
}

const Calculation* CalculatorRegistry::find_calculation(std::string_view key) const {
  auto it = calculations_.find(key);
  return it == calculations_.end() ? nullptr : &it->second;
}

const std::string* CalculatorRegistry::binding(std::string_view grammar, std::string_view attr) const {
  auto it = bindings_.find({std::string(grammar), std::string(attr)});
  return it == bindings_.end() ? nullptr : &it->second;
}

bool compatible_value_kinds(std::string_view a, std::string_view b) {
  auto numeric = [](std::string_view k) { return k == "int" || k == "float"; };
  return a == b || (numeric(a) && numeric(b));
}

Diagnostics register_virtual(const VirtualAttributeMap& map, CalculatorRegistry& registry) {
  Diagnostics d;
  if (map.bindings.empty()) d.error(map.pos, "virtual attribute '" + map.name + "' binds no attribute");
  const AttributeDecl* first = nullptr;
  for (const auto& b : map.bindings) {
    const AttributeDecl* decl = registry.find_decl(b.grammar, b.attribute);
    if (!decl) {
      d.error(b.pos, "attribute '" + b.attribute + "' is not declared by grammar '" + b.grammar + "'");
    } else if (!first) {
      first = decl;
    } else if (!compatible_value_kinds(first->valueKind, decl->valueKind)) {
      d.error(b.pos, "virtual attribute '" + map.name + "' mixes kinds " + first->valueKind + " (" + first->owningGrammar +
                         "." + first->name + ") and " + decl->valueKind + " (" + b.grammar + "." + b.attribute + ")");
    }
    if (!registry.find_calculation(b.calculatorKey))
      d.error(b.pos, "unknown calculator '" + b.calculatorKey + "'");
  }
  if (d.has_errors()) return d;
  for (const auto& b : map.bindings) registry.bindings_[{b.grammar, b.attribute}] = b.calculatorKey;
  registry.virtuals_[map.name] = map;
  return d;
}

// ---- evaluation ----

std::vector<std::string> AttributeEvaluator::lineage_of(const AstNode& node) const {
  if (options_.lineage) {
    auto l = options_.lineage(node.language);
    if (!l.empty()) return l;
  }
  return {node.language};
}

AttributeEvaluator::Target AttributeEvaluator::resolve(const AstNode& node, std::string_view attr) const {
  auto lineage = lineage_of(node);
  const auto& virtuals = registry_.virtuals();
  if (auto it = virtuals.find(attr); it != virtuals.end()) {
    for (const auto& g : lineage)
      for (const auto& b : it->second.bindings)
        if (b.grammar == g) return {g, b.attribute, b.calculatorKey};
    throw AttributeError(node.pos, "virtual attribute '" + std::string(attr) + "' has no binding for language '" +
                                       node.language + "'");
  }
  for (const auto& g : lineage)
    if (const auto* key = registry_.binding(g, attr)) return {g, std::string(attr), *key};
  // Another language's name for the same thing, through a virtual map.
  for (const auto& [_, vm] : virtuals) {
    bool mentions = false;
    for (const auto& b : vm.bindings) mentions = mentions || b.attribute == attr;
    if (!mentions) continue;
    for (const auto& g : lineage)
      for (const auto& b : vm.bindings)
        if (b.grammar == g) return {g, b.attribute, b.calculatorKey};
  }
  throw AttributeError(node.pos, "no calculation for attribute '" + std::string(attr) + "' in language '" +
                                     node.language + "'");
}

namespace {
std::string frame(const std::pair<const AstNode*, std::string>& f) {
  return f.second + "@" + f.first->type + "(" + std::to_string(f.first->pos.line) + ":" +
         std::to_string(f.first->pos.column) + ")";
}
}  // namespace

Value AttributeEvaluator::get(AstNode& node, std::string_view attr) {
  Target t = resolve(node, attr);
  std::pair<const AstNode*, std::string> key{&node, t.grammar + "." + t.attribute};
  if (options_.memoize)
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  for (std::size_t i = 0; i < inProgress_.size(); ++i) {
    if (inProgress_[i] != key) continue;
    std::string path;
    for (std::size_t j = i; j < inProgress_.size(); ++j) path += frame(inProgress_[j]) + " -> ";
    path += frame(key);
    throw AttributeError(node.pos, "cyclic attribute dependency: " + path);
  }
  const Calculation* calc = registry_.find_calculation(t.key);
  if (!calc) throw AttributeError(node.pos, "unknown calculator '" + t.key + "'");
  std::vector<std::string> chain{node.type};
  if (options_.metamodel)
    if (const Metamodel* m = options_.metamodel(node); m && m->has_type(node.type)) chain = m->dispatch_chain(node.type);
  const Calculator* fn = nullptr;
  for (const auto& type : chain)
    if (auto it = calc->byType.find(type); it != calc->byType.end()) {
      fn = &it->second;
      break;
    }
  if (!fn)
    throw AttributeError(node.pos, "calculator '" + t.key + "' cannot compute '" + t.attribute + "' for " + node.type);

  struct Guard {
    std::vector<std::pair<const AstNode*, std::string>>& stack;
    ~Guard() { stack.pop_back(); }
  };
  inProgress_.push_back(key);
  Guard guard{inProgress_};
  ++calls_;
  Value v = (*fn)(node, *this);
  if (options_.memoize) cache_[key] = v;
  return v;
}

Value AttributeEvaluator::inherited(AstNode& node, std::string_view attr) {
  if (!node.parent)
    throw AttributeError(node.pos, "inherited attribute '" + std::string(attr) + "' requested at the root");
  return get(*node.parent, attr);
}

Result<Value> AttributeEvaluator::eval(AstNode& node, std::string_view attr) {
  Result<Value> r;
  try {
    r.value = get(node, attr);
  } catch (const AttributeError& e) {
    r.diags.error(e.pos, e.what());
  } catch (const std::exception& e) {
    r.diags.error(node.pos, std::string("attribute '") + std::string(attr) + "': " + e.what());
  }
  inProgress_.clear();
  return r;
}

Result<Value> eval_attribute(AstNode& node, std::string_view attr, const CalculatorRegistry& registry,
                             AttributeEvaluator::Options options) {
  AttributeEvaluator ev(registry, std::move(options));
  return ev.eval(node, attr);
}

}  // namespace lwb
