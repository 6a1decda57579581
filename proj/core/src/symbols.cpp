#include "lwb/symbols.hpp"

#include <algorithm>
#include <set>

namespace lwb {

namespace {

const AstNode* root_of(const AstNode* n) {
  while (n && n->parent) n = n->parent;
  return n;
}

std::vector<AttrDef> attributes_of(const Metamodel& m, std::string_view type) {
  if (const auto* i = m.find_interface(type)) return i->declaredAttributes;
  return m.all_attributes(type);
}

bool has_attribute(const Metamodel& m, std::string_view type, std::string_view name) {
  auto attrs = attributes_of(m, type);
  return std::any_of(attrs.begin(), attrs.end(), [&](const AttrDef& a) { return a.name == name; });
}

std::string string_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return {};
}

}  // namespace

std::string key_attribute(const Metamodel& m, const ResolverConfig& cfg, std::string_view type) {
  for (const auto& t : m.dispatch_chain(type))
    if (auto it = cfg.keyAttr.find(t); it != cfg.keyAttr.end()) return it->second;
  return "name";
}

namespace {

// Dotted path of the named nodes enclosing `n`, `n` itself included.
std::string scope_path(const AstNode* n, const Metamodel& m, const ResolverConfig& cfg) {
  std::vector<std::string> parts;
  for (const AstNode* p = n; p; p = p->parent) {
    std::string v = string_value(p->get(key_attribute(m, cfg, p->type)));
    if (!v.empty()) parts.push_back(v);
  }
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += (out.empty() ? "" : ".") + *it;
  return out;
}

}  // namespace

std::vector<AstNode*> SymbolTable::lookup(const Metamodel& m, std::string_view type, std::string_view name,
                                          const AstNode* from) const {
  std::vector<const SymbolEntry*> typed;
  for (const auto& e : entries)
    if (m.is_subtype(e.type, type)) typed.push_back(&e);
  auto collect = [&](std::string_view qn, bool sameRootOnly) {
    std::vector<AstNode*> out;
    const AstNode* r = root_of(from);
    for (const auto* e : typed)
      if (e->name == qn && (!sameRootOnly || e->root == r)) out.push_back(e->node);
    return out;
  };
  if (scheme == SymbolScheme::flat) {
    if (from)
      if (auto local = collect(name, true); !local.empty()) return local;
    return collect(name, false);
  }
  // Hierarchical: innermost enclosing scope first.
  std::vector<std::string> scopes;
  for (const AstNode* p = from; p; p = p->parent)
    for (const auto& e : entries)
      if (e.node == p) scopes.push_back(e.name);
  for (const auto& s : scopes)
    if (auto hit = collect(s + "." + std::string(name), false); !hit.empty()) return hit;
  return collect(name, false);
}

std::string SymbolTable::name_of(const AstNode* n) const {
  for (const auto& e : entries)
    if (e.node == n) return e.name;
  return {};
}

SymbolTable build_symbols(const std::vector<AstNode*>& roots, const Metamodel& m, const ResolverConfig& cfg,
                          Diagnostics& diags) {
  SymbolTable t;
  t.scheme = cfg.scheme;
  for (AstNode* root : roots) {
    for (AstNode* n : Ast::preorder(root)) {
      std::string v = string_value(n->get(key_attribute(m, cfg, n->type)));
      if (v.empty()) continue;
      SymbolEntry e{n->type, t.scheme == SymbolScheme::flat ? v : scope_path(n, m, cfg), n, root};
      auto dup = std::find_if(t.entries.begin(), t.entries.end(), [&](const SymbolEntry& o) {
        bool related = m.is_subtype(o.type, e.type) || m.is_subtype(e.type, o.type) || o.type == e.type;
        bool sameScope = t.scheme == SymbolScheme::hierarchical || o.root == e.root;
        return related && sameScope && o.name == e.name;
      });
      if (dup != t.entries.end()) {
        const SourcePos& p = dup->node->pos;
        diags.error(n->pos, "duplicate definition of " + e.type + " '" + e.name + "'; first defined at " + p.file +
                                ":" + std::to_string(p.line) + ":" + std::to_string(p.column));
        continue;
      }
      t.entries.push_back(std::move(e));
    }
  }
  return t;
}

const CustomResolver* ResolverRegistry::find(std::string_view association) const {
  auto it = resolvers_.find(association);
  return it == resolvers_.end() ? nullptr : &it->second;
}

Diagnostics LinkReport::diagnostics(Severity s) const {
  Diagnostics d;
  for (const auto& e : errors) d.add(s, e.pos, e.message);
  return d;
}

namespace {

struct KeySide {
  bool fromTarget = false;  // the referring nodes are on the target side
  std::string attr;
};

std::optional<KeySide> key_side(const AssocEdge& a, const Metamodel& m, const ResolverConfig& cfg) {
  if (auto it = cfg.sourceKey.find(a.name); it != cfg.sourceKey.end()) {
    if (has_attribute(m, a.target, it->second)) return KeySide{true, it->second};
    if (has_attribute(m, a.source, it->second)) return KeySide{false, it->second};
    return std::nullopt;
  }
  std::vector<std::string> onTarget, onSource;
  if (!a.targetRole.empty()) onTarget.push_back(a.targetRole + "Name");
  onTarget.push_back(decapitalize(a.source) + "Name");
  if (!a.sourceRole.empty()) onSource.push_back(a.sourceRole + "Name");
  onSource.push_back(decapitalize(a.target) + "Name");
  for (const auto& k : onTarget)
    if (has_attribute(m, a.target, k)) return KeySide{true, k};
  for (const auto& k : onSource)
    if (has_attribute(m, a.source, k)) return KeySide{false, k};
  return std::nullopt;
}

std::string describe(const AstNode* n, const SymbolTable& t) {
  std::string name = t.name_of(n);
  return name.empty() ? n->type : n->type + " '" + name + "'";
}

}  // namespace

LinkReport establish_links(const std::vector<AstNode*>& roots, const Metamodel& m, const SymbolTable& table,
                           const ResolverConfig& cfg, const ResolverRegistry* registry) {
  LinkReport report;
  std::vector<AstNode*> nodes;
  for (AstNode* r : roots) {
    auto pre = Ast::preorder(r);
    nodes.insert(nodes.end(), pre.begin(), pre.end());
  }
  for (AstNode* n : nodes) n->links.clear();

  for (const auto& a : m.associations) {
    std::vector<std::pair<AstNode*, AstNode*>> pairs;  // (source, target)
    std::set<const AstNode*> failed;
    const CustomResolver* custom = registry ? registry->find(a.name) : nullptr;
    if (custom) {
      for (AstNode* n : nodes)
        if (m.is_subtype(n->type, a.source))
          for (AstNode* t : (*custom)(*n, table)) pairs.emplace_back(n, t);
    } else {
      bool anySource = std::any_of(nodes.begin(), nodes.end(), [&](const AstNode* n) {
        return m.is_subtype(n->type, a.source) || m.is_subtype(n->type, a.target);
      });
      auto side = key_side(a, m, cfg);
      if (!side) {
        if (anySource)
          report.errors.push_back({a.name, nullptr, {}, {},
                                   "association " + a.name + " has no name attribute to resolve it; register a resolver"});
        continue;
      }
      const std::string& referring = side->fromTarget ? a.target : a.source;
      const std::string& referred = side->fromTarget ? a.source : a.target;
      for (AstNode* n : nodes) {
        if (!m.is_subtype(n->type, referring)) continue;
        const Slot* s = n->slot(side->attr);
        if (!s) continue;
        for (const auto& v : s->values) {
          std::string name = string_value(v);
          if (name.empty()) continue;
          auto hits = table.lookup(m, referred, name, n);
          if (hits.empty()) {
            failed.insert(n);
            report.errors.push_back({a.name, n, name, n->pos,
                                     "cannot resolve '" + name + "' in " + n->type + "." + side->attr + ": no " +
                                         referred + " named '" + name + "' (association " + a.name + ")"});
            continue;
          }
          AstNode* hit = hits.front();
          if (side->fromTarget)
            pairs.emplace_back(hit, n);
          else
            pairs.emplace_back(n, hit);
        }
      }
    }
    std::vector<std::pair<AstNode*, AstNode*>> unique;
    std::set<std::pair<AstNode*, AstNode*>> seen;
    for (const auto& p : pairs)
      if (seen.insert(p).second) unique.push_back(p);
    for (const auto& [src, tgt] : unique) {
      if (!a.sourceRole.empty()) src->links[a.sourceRole].push_back(tgt);
      if (!a.targetRole.empty()) tgt->links[a.targetRole].push_back(src);
    }
    report.established += unique.size();

    std::map<const AstNode*, std::size_t> outCount, inCount;
    for (const auto& [src, tgt] : unique) {
      ++outCount[src];
      ++inCount[tgt];
    }
    for (AstNode* n : nodes) {
      if (failed.count(n)) continue;
      if (m.is_subtype(n->type, a.source) && !a.targetCard.admits(outCount[n]))
        report.errors.push_back({a.name, n, std::to_string(outCount[n]), n->pos,
                                 describe(n, table) + " is linked to " + std::to_string(outCount[n]) + " " + a.target +
                                     " object(s); association " + a.name + " allows " + a.targetCard.to_string()});
      if (m.is_subtype(n->type, a.target) && !a.sourceCard.admits(inCount[n]))
        report.errors.push_back({a.name, n, std::to_string(inCount[n]), n->pos,
                                 describe(n, table) + " is linked to " + std::to_string(inCount[n]) + " " + a.source +
                                     " object(s); association " + a.name + " allows " + a.sourceCard.to_string()});
    }
  }
  return report;
}

Result<std::vector<AstNode*>> navigate(const AstNode& node, std::string_view role, const Metamodel& m) {
  Result<std::vector<AstNode*>> r;
  for (const auto& [edge, fromSource] : m.roles_of(node.type)) {
    const std::string& name = fromSource ? edge->sourceRole : edge->targetRole;
    if (name != role) continue;
    auto it = node.links.find(role);
    r.value = it == node.links.end() ? std::vector<AstNode*>{} : it->second;
    return r;
  }
  if (auto a = m.find_attribute(node.type, role); a && a->kind == AttrDef::Kind::composition) {
    r.value = node.children(role);
    return r;
  }
  r.diags.error(node.pos, "type '" + node.type + "' has no role '" + std::string(role) + "'");
  return r;
}

}  // namespace lwb
