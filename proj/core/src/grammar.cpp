#include <cctype>
#include <map>
#include <set>

#include "lwb/grammar.hpp"

namespace lwb {

const char* cardinality_suffix(Cardinality c) {
  switch (c) {
    case Cardinality::one: return "";
    case Cardinality::optional: return "?";
    case Cardinality::star: return "*";
    case Cardinality::plus: return "+";
  }
  return "";
}

std::string CardRange::to_string() const {
  switch (kind) {
    case Kind::exactly_one: return "1";
    case Kind::unbounded: return "*";
    case Kind::range:
      if (lo == hi) return std::to_string(lo);
      return std::to_string(lo) + ".." + (hi < 0 ? std::string("*") : std::to_string(hi));
  }
  return "*";
}

const char* to_string(ProductionKind k) {
  switch (k) {
    case ProductionKind::node: return "node";
    case ProductionKind::interface_: return "interface";
    case ProductionKind::abstract_: return "abstract";
    case ProductionKind::external: return "external";
  }
  return "node";
}

const char* to_string(TokenValueKind k) {
  switch (k) {
    case TokenValueKind::string: return "string";
    case TokenValueKind::int_: return "int";
    case TokenValueKind::float_: return "float";
    case TokenValueKind::custom: return "custom";
  }
  return "string";
}

const ProductionDef* GrammarDef::find_production(std::string_view n) const {
  for (const auto& p : productions)
    if (p.name == n) return &p;
  return nullptr;
}

const TokenDef* GrammarDef::find_token(std::string_view n) const {
  for (const auto& t : tokens)
    if (t.name == n) return &t;
  return nullptr;
}

bool is_token_name(std::string_view name) {
  // Single capitals (`A`, `B`) stay nonterminals, as in textbook grammars.
  if (name.size() < 2 || !std::isupper(static_cast<unsigned char>(name.front()))) return false;
  for (char c : name)
    if (std::islower(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string decapitalize(std::string_view name) {
  std::string out(name);
  if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

std::string sanitize_identifier(std::string_view text) {
  std::string out;
  bool upper_next = false;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += upper_next && !out.empty() ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      upper_next = false;
    } else {
      upper_next = true;
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "c" + out;
  return decapitalize(out);
}

std::string attribute_name(const BodyElement& e) {
  if (!e.label.empty()) return e.label;
  switch (e.kind) {
    case BodyElement::Kind::nonterminal: return decapitalize(e.target);
    case BodyElement::Kind::token: {
      std::string out;
      for (char c : e.target) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return out;
    }
    case BodyElement::Kind::constants:
      return e.constants.empty() ? std::string() : sanitize_identifier(e.constants.front());
    default: return {};
  }
}

namespace {

void walk(const BodyElement& e, const auto& fn) {
  fn(e);
  for (const auto& c : e.items) walk(c, fn);
}

void check_body(const RuleBody& body, const std::string& owner, Diagnostics& d) {
  // attribute name -> (element kind, target) of its first use
  std::map<std::string, std::pair<BodyElement::Kind, std::string>> seen;
  walk(body, [&](const BodyElement& e) {
    if (e.kind == BodyElement::Kind::constants) {
      if (e.constants.size() > 1 && e.label.empty())
        d.error(e.pos, "constant group with several alternatives in '" + owner + "' needs a label");
    }
    if (e.kind == BodyElement::Kind::terminal && e.label.empty()) return;
    if (!e.is_reference() && e.kind != BodyElement::Kind::constants &&
        e.kind != BodyElement::Kind::terminal)
      return;
    std::string name = attribute_name(e);
    std::string target = e.kind == BodyElement::Kind::constants ? std::string("<const>") : e.target;
    auto kind = e.kind == BodyElement::Kind::terminal ? BodyElement::Kind::token : e.kind;
    if (e.kind == BodyElement::Kind::terminal) target = "<terminal>";
    auto [it, fresh] = seen.emplace(name, std::make_pair(kind, target));
    if (!fresh && it->second != std::make_pair(kind, target) &&
        !(kind == BodyElement::Kind::constants && it->second.first == BodyElement::Kind::constants))
      d.error(e.pos, "attribute '" + name + "' in '" + owner + "' is bound to different elements");
  });
}

bool body_has_label(const RuleBody& body, std::string_view label) {
  bool found = false;
  walk(body, [&](const BodyElement& e) {
    if (e.label == label || (e.label.empty() && e.is_reference() && attribute_name(e) == label))
      found = true;
  });
  return found;
}

}  // namespace

Diagnostics validate_grammar(const GrammarDef& g) {
  Diagnostics d;
  std::map<std::string, const ProductionDef*> prods;
  for (const auto& p : g.productions) {
    if (!prods.emplace(p.name, &p).second)
      d.error(p.pos, "duplicate production '" + p.name + "'");
    if (is_token_name(p.name))
      d.error(p.pos, "production '" + p.name + "' is spelled like a token class (all upper case)");
    if (p.kind == ProductionKind::external && p.body)
      d.error(p.pos, "external production must not define a body");
    if (p.kind != ProductionKind::external && !p.requiredContract.empty())
      d.error(p.pos, "only external productions can require a contract");
    if (p.body) check_body(*p.body, p.name, d);
  }
  std::set<std::string> toks;
  for (const auto& t : g.tokens) {
    if (!toks.insert(t.name).second) d.error(t.pos, "duplicate token '" + t.name + "'");
    if (!is_token_name(t.name)) d.error(t.pos, "token name '" + t.name + "' must be upper case");
    if (prods.count(t.name)) d.error(t.pos, "token '" + t.name + "' clashes with a production name");
    if (t.valueKind == TokenValueKind::custom && t.converterKey.empty())
      d.error(t.pos, "custom token '" + t.name + "' needs a converter key");
    auto compiled = CompiledPattern::compile(t.pattern, t.pos);
    d.append(compiled.diags);
  }
  std::set<std::string> assocs;
  for (const auto& a : g.associations)
    if (!assocs.insert(a.name).second) d.error(a.pos, "duplicate association '" + a.name + "'");
  std::set<std::string> attrs;
  for (const auto& a : g.attributeDecls)
    if (!attrs.insert(a.name).second) d.error(a.pos, "duplicate attribute declaration '" + a.name + "'");
  for (const auto& a : g.astAugmentations) check_body(a.body, a.target, d);
  if (g.options.lookaheadK < 1) d.error(g.pos, "lookahead must be at least 1");
  if (!g.options.compileUnitStart.empty()) {
    auto it = prods.find(g.options.compileUnitStart);
    if (it != prods.end()) {
      const ProductionDef& p = *it->second;
      if (p.kind != ProductionKind::node)
        d.error(p.pos, "compileunit start '" + p.name + "' must be an ordinary production");
      else if (p.body && !body_has_label(*p.body, "name"))
        d.error(p.pos, "compileunit start '" + p.name + "' must define a 'name' attribute");
    }
  }
  return d;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

void print_element(const BodyElement& e, std::string& out) {
  using K = BodyElement::Kind;
  if (!e.label.empty()) out += e.label + ":";
  switch (e.kind) {
    case K::sequence:
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        print_element(e.items[i], out);
      }
      break;
    case K::alternative:
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += " | ";
        print_element(e.items[i], out);
      }
      break;
    case K::block:
      out += '(';
      print_element(e.items.front(), out);
      out += ')';
      out += cardinality_suffix(e.card);
      break;
    case K::nonterminal:
    case K::token:
      out += e.target;
      out += cardinality_suffix(e.card);
      break;
    case K::terminal:
      out += quote(e.target);
      out += cardinality_suffix(e.card);
      break;
    case K::constants:
      out += '[';
      for (std::size_t i = 0; i < e.constants.size(); ++i) {
        if (i) out += " | ";
        out += quote(e.constants[i]);
      }
      out += ']';
      break;
  }
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

}  // namespace

std::string print_body(const RuleBody& body) {
  std::string out;
  print_element(body, out);
  return out;
}

std::string print_grammar(const GrammarDef& g) {
  std::string out;
  if (!g.package.empty()) out += "package " + g.package + ";\n\n";
  out += "grammar " + g.name;
  if (!g.supers.empty()) out += " extends " + join(g.supers);
  out += " {\n";
  const auto& o = g.options;
  if (!o.compileUnitStart.empty() || !o.defaultTokensEnabled || o.lookaheadSet) {
    out += "  options {\n";
    if (!o.compileUnitStart.empty()) out += "    compileunit " + o.compileUnitStart + ";\n";
    if (!o.defaultTokensEnabled) out += "    nodefaulttokens;\n";
    if (o.lookaheadSet) out += "    lookahead " + std::to_string(o.lookaheadK) + ";\n";
    out += "  }\n";
  }
  for (const auto& t : g.tokens) {
    out += "  token " + t.name + " = " + print_pattern(t.pattern);
    if (t.valueKind == TokenValueKind::custom)
      out += " : /" + t.converterKey;
    else if (t.valueKind != TokenValueKind::string)
      out += std::string(" : ") + to_string(t.valueKind);
    out += ";\n";
  }
  for (const auto& p : g.productions) {
    out += "  ";
    if (p.kind != ProductionKind::node) out += std::string(to_string(p.kind)) + " ";
    out += p.name;
    if (!p.extends.empty()) out += " extends " + join(p.extends);
    if (!p.implements.empty()) out += " implements " + join(p.implements);
    if (!p.astExtends.empty()) out += " astextends " + join(p.astExtends);
    if (!p.astImplements.empty()) out += " astimplements " + join(p.astImplements);
    if (!p.requiredContract.empty()) out += " / " + p.requiredContract;
    if (p.body) out += " = " + print_body(*p.body);
    out += ";\n";
  }
  for (const auto& a : g.astAugmentations) out += "  ast " + a.target + " = " + print_body(a.body) + ";\n";
  for (const auto& a : g.associations) {
    out += "  association " + a.name + " " + a.sourceType;
    if (!a.sourceRole.empty()) out += "." + a.sourceRole;
    out += " " + a.sourceCard.to_string() + (a.directed ? " -> " : " <-> ") + a.targetCard.to_string() + " " +
           a.targetType;
    if (!a.targetRole.empty()) out += "." + a.targetRole;
    out += ";\n";
  }
  for (const auto& a : g.attributeDecls)
    out += std::string("  ") + (a.direction == AttributeDirection::synthesized ? "syn " : "inh ") + a.name +
           ": /" + a.valueKind + ";\n";
  out += "}\n";
  return out;
}

namespace {
void strip(BodyElement& e) {
  e.pos = {};
  for (auto& c : e.items) strip(c);
}
}  // namespace

GrammarDef strip_positions(GrammarDef g) {
  g.pos = {};
  for (auto& p : g.productions) {
    p.pos = {};
    if (p.body) strip(*p.body);
  }
  for (auto& t : g.tokens) t.pos = {};
  for (auto& a : g.associations) a.pos = {};
  for (auto& a : g.astAugmentations) {
    a.pos = {};
    strip(a.body);
  }
  for (auto& a : g.attributeDecls) a.pos = {};
  return g;
}

}  // namespace lwb
