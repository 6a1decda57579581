#include "lwb/linked_grammar.hpp"

#include <algorithm>
#include <set>

namespace lwb {

const LinkedProduction* LinkedGrammar::find(std::string_view name) const {
  for (const auto& p : productions)
    if (!p.shadowed && p.def.name == name) return &p;
  return nullptr;
}

const LinkedProduction* LinkedGrammar::find_type(std::string_view typeName) const {
  for (const auto& p : productions)
    if (p.typeName == typeName) return &p;
  return nullptr;
}

const TokenDef* LinkedGrammar::find_token(std::string_view name) const {
  for (const auto& t : tokens)
    if (t.name == name) return &t;
  return nullptr;
}

bool LinkedGrammar::derives_from(std::string_view grammar) const {
  return std::find(lineage.begin(), lineage.end(), grammar) != lineage.end();
}

std::vector<const LinkedProduction*> LinkedGrammar::direct_subrules(std::string_view name) const {
  std::vector<const LinkedProduction*> out;
  for (const auto& p : productions) {
    if (p.shadowed || p.def.name == name) continue;
    auto lists = {&p.def.extends, &p.def.implements};
    for (const auto* l : lists)
      if (std::find(l->begin(), l->end(), name) != l->end()) {
        out.push_back(&p);
        break;
      }
  }
  return out;
}

namespace {
void collect_terminals(const BodyElement& e, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (e.kind == BodyElement::Kind::terminal && seen.insert(e.target).second) out.push_back(e.target);
  if (e.kind == BodyElement::Kind::constants)
    for (const auto& c : e.constants)
      if (seen.insert(c).second) out.push_back(c);
  for (const auto& c : e.items) collect_terminals(c, out, seen);
}
}  // namespace

std::vector<std::string> LinkedGrammar::terminals() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : productions)
    if (!p.shadowed && p.def.body) collect_terminals(*p.def.body, out, seen);
  return out;
}

LinkedGrammar link_single(const GrammarDef& g) {
  LinkedGrammar lg;
  lg.qualifiedName = g.qualified_name();
  lg.lineage = {lg.qualifiedName};
  for (const auto& p : g.productions) lg.productions.push_back({p, lg.qualifiedName, p.name, {}, false});
  lg.tokens = g.tokens;
  lg.associations = g.associations;
  lg.augmentations = g.astAugmentations;
  lg.attributeDecls = g.attributeDecls;
  for (auto& a : lg.attributeDecls)
    if (a.owningGrammar.empty()) a.owningGrammar = lg.qualifiedName;
  lg.options = g.options;
  lg.pos = g.pos;
  return lg;
}

}  // namespace lwb
