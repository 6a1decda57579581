#include "lwb/metamodel.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace lwb {

namespace {

constexpr int kUnbounded = -1;

int add_max(int a, int b) { return (a < 0 || b < 0) ? kUnbounded : a + b; }
int max_max(int a, int b) { return (a < 0 || b < 0) ? kUnbounded : std::max(a, b); }

Occurrence apply_card(Occurrence o, Cardinality c) {
  switch (c) {
    case Cardinality::one: return o;
    case Cardinality::optional: return {0, o.max};
    case Cardinality::star: return {0, o.max == 0 ? 0 : kUnbounded};
    case Cardinality::plus: return {o.min, o.max == 0 ? 0 : kUnbounded};
  }
  return o;
}

Occurrence occurs(const BodyElement& e, const std::function<bool(const BodyElement&)>& match) {
  using K = BodyElement::Kind;
  switch (e.kind) {
    case K::sequence: {
      Occurrence acc{0, 0};
      for (const auto& c : e.items) {
        Occurrence o = occurs(c, match);
        acc = {acc.min + o.min, add_max(acc.max, o.max)};
      }
      return acc;
    }
    case K::alternative: {
      if (e.items.empty()) return {0, 0};
      Occurrence acc = occurs(e.items.front(), match);
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        Occurrence o = occurs(e.items[i], match);
        acc = {std::min(acc.min, o.min), max_max(acc.max, o.max)};
      }
      return acc;
    }
    case K::block: return apply_card(occurs(e.items.front(), match), e.card);
    case K::constants: return match(e) ? Occurrence{1, 1} : Occurrence{0, 0};
    default: return match(e) ? apply_card({1, 1}, e.card) : Occurrence{0, 0};
  }
}

bool defines_attribute(const BodyElement& e) {
  return e.is_reference() || e.kind == BodyElement::Kind::constants ||
         (e.kind == BodyElement::Kind::terminal && !e.label.empty());
}

void for_each_leaf(const BodyElement& e, const std::function<void(const BodyElement&)>& fn) {
  if (defines_attribute(e)) fn(e);
  for (const auto& c : e.items) for_each_leaf(c, fn);
}

}  // namespace

Occurrence occurrence_analysis(const RuleBody& body, std::string_view label, std::string_view target) {
  return occurs(body, [&](const BodyElement& e) {
    if (!e.is_reference() && e.kind != BodyElement::Kind::terminal) return false;
    return e.target == target && e.label == label;
  });
}

const char* to_string(AttrDef::Kind k) {
  switch (k) {
    case AttrDef::Kind::composition: return "composition";
    case AttrDef::Kind::token: return "token";
    case AttrDef::Kind::boolean_constant: return "boolean";
    case AttrDef::Kind::enum_constant: return "enum";
  }
  return "token";
}

bool AttrDef::same_signature(const AttrDef& o) const {
  if (name != o.name || kind != o.kind) return false;
  switch (kind) {
    case Kind::composition: return target == o.target;
    case Kind::token: return valueType == o.valueType;
    default: return true;
  }
}

const NodeTypeDef* Metamodel::find_node(std::string_view name) const {
  for (const auto& t : nodeTypes)
    if (t.name == name) return &t;
  return nullptr;
}

const InterfaceDef* Metamodel::find_interface(std::string_view name) const {
  for (const auto& t : interfaces)
    if (t.name == name) return &t;
  return nullptr;
}

bool Metamodel::is_subtype(std::string_view sub, std::string_view super) const {
  std::set<std::string, std::less<>> seen;
  std::deque<std::string> work{std::string(sub)};
  while (!work.empty()) {
    std::string cur = work.front();
    work.pop_front();
    if (cur == super) return true;
    if (!seen.insert(cur).second) continue;
    if (const auto* n = find_node(cur)) {
      if (!n->superType.empty()) work.push_back(n->superType);
      for (const auto& i : n->implementedInterfaces) work.push_back(i);
    } else if (const auto* i = find_interface(cur)) {
      for (const auto& e : i->extendsList) work.push_back(e);
    }
  }
  return false;
}

std::vector<AttrDef> Metamodel::all_attributes(std::string_view type) const {
  std::vector<const NodeTypeDef*> chain;
  std::set<std::string, std::less<>> seen;
  for (const auto* n = find_node(type); n && seen.insert(n->name).second;
       n = n->superType.empty() ? nullptr : find_node(n->superType))
    chain.push_back(n);
  std::vector<AttrDef> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    for (const auto& a : (*it)->attributes) out.push_back(a);
  if (chain.empty())
    if (const auto* i = find_interface(type)) out = i->declaredAttributes;
  return out;
}

std::optional<AttrDef> Metamodel::find_attribute(std::string_view type, std::string_view attr) const {
  for (auto& a : all_attributes(type))
    if (a.name == attr) return a;
  return std::nullopt;
}

std::vector<std::string> Metamodel::dispatch_chain(std::string_view type) const {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  std::vector<const NodeTypeDef*> classes;
  for (const auto* n = find_node(type); n && seen.insert(n->name).second;
       n = n->superType.empty() ? nullptr : find_node(n->superType)) {
    out.push_back(n->name);
    classes.push_back(n);
  }
  if (classes.empty() && seen.insert(std::string(type)).second) out.emplace_back(type);
  std::deque<std::string> work;
  for (const auto* c : classes)
    for (const auto& i : c->implementedInterfaces) work.push_back(i);
  if (classes.empty())
    if (const auto* i = find_interface(type))
      for (const auto& e : i->extendsList) work.push_back(e);
  while (!work.empty()) {
    std::string cur = work.front();
    work.pop_front();
    if (!seen.insert(cur).second) continue;
    out.push_back(cur);
    if (const auto* i = find_interface(cur))
      for (const auto& e : i->extendsList) work.push_back(e);
  }
  return out;
}

std::vector<std::pair<const AssocEdge*, bool>> Metamodel::roles_of(std::string_view type) const {
  std::vector<std::pair<const AssocEdge*, bool>> out;
  for (const auto& a : associations) {
    if (is_subtype(type, a.source)) out.emplace_back(&a, true);
    if (!a.directed && is_subtype(type, a.target)) out.emplace_back(&a, false);
  }
  return out;
}

namespace {

class Deriver {
 public:
  Deriver(const LinkedGrammar& lg, Diagnostics& d) : lg_(lg), d_(d) {}

  Metamodel run() {
    Metamodel m;
    for (const auto& p : lg_.productions) {
      const auto& def = p.def;
      bool iface = def.kind == ProductionKind::interface_ || def.kind == ProductionKind::external;
      if (iface) {
        InterfaceDef i;
        i.name = p.typeName;
        i.external = def.kind == ProductionKind::external;
        i.requiredContract = def.requiredContract;
        i.sourceGrammar = p.origin;
        m.interfaces.push_back(std::move(i));
      } else {
        NodeTypeDef n;
        n.name = p.typeName;
        n.isAbstract = def.kind == ProductionKind::abstract_;
        n.sourceGrammar = p.origin;
        m.nodeTypes.push_back(std::move(n));
      }
    }
    // Inheritance edges.
    for (const auto& p : lg_.productions) {
      const auto& def = p.def;
      if (auto* i = mutable_interface(m, p.typeName)) {
        if (!p.overrides.empty()) i->extendsList.push_back(p.overrides);
        for (const auto* list : {&def.extends, &def.astExtends})
          for (const auto& s : *list) {
            std::string t = resolve(s, def.pos);
            if (t.empty()) continue;
            if (!m.find_interface(t))
              d_.error(def.pos, "interface '" + def.name + "' can only extend interfaces, not '" + s + "'");
            else if (std::find(i->extendsList.begin(), i->extendsList.end(), t) == i->extendsList.end() &&
                     !m.is_subtype(p.overrides, t))
              i->extendsList.push_back(t);
          }
        if (!def.implements.empty() || !def.astImplements.empty())
          d_.error(def.pos, "interface '" + def.name + "' uses extends, not implements");
        continue;
      }
      NodeTypeDef* n = mutable_node(m, p.typeName);
      std::vector<std::string> classes;
      for (const auto* list : {&def.extends, &def.astExtends})
        for (const auto& s : *list) {
          std::string t = resolve(s, def.pos);
          if (t.empty()) continue;
          if (m.find_interface(t))
            d_.error(def.pos, "'" + def.name + "' extends interface '" + s + "'; use implements");
          else if (std::find(classes.begin(), classes.end(), t) == classes.end())
            classes.push_back(t);
        }
      if (!p.overrides.empty()) {
        n->superType = p.overrides;
        const auto* overridden = lg_.find_type(p.overrides);
        for (const auto& c : classes) {
          bool inherited = overridden && (std::find(overridden->def.extends.begin(), overridden->def.extends.end(),
                                                    lg_.find_type(c) ? lg_.find_type(c)->def.name : c) !=
                                              overridden->def.extends.end());
          if (!inherited && c != p.overrides)
            d_.error(def.pos, "override of '" + def.name + "' cannot add superclass '" + c + "'");
        }
      } else if (classes.size() > 1) {
        d_.error(def.pos, "'" + def.name + "' extends more than one class");
      } else if (classes.size() == 1) {
        n->superType = classes.front();
      }
      for (const auto* list : {&def.implements, &def.astImplements})
        for (const auto& s : *list) {
          std::string t = resolve(s, def.pos);
          if (t.empty()) continue;
          if (!m.find_interface(t))
            d_.error(def.pos, "'" + def.name + "' implements non-interface '" + s + "'");
          else if (std::find(n->implementedInterfaces.begin(), n->implementedInterfaces.end(), t) ==
                   n->implementedInterfaces.end())
            n->implementedInterfaces.push_back(t);
        }
    }
    check_cycles(m);
    if (d_.has_errors()) return m;

    // Attributes.
    std::map<std::string, std::vector<AttrDef>> raw;
    for (const auto& p : lg_.productions) {
      const auto& def = p.def;
      bool iface = m.find_interface(p.typeName) != nullptr;
      std::vector<AttrDef> attrs;
      if (def.body && !iface) {
        attrs = body_attributes(*def.body, def.name);
        if (auto* n = mutable_node(m, p.typeName)) n->exclusive = exclusivity(*def.body);
      }
      if (!p.shadowed)
        for (const auto& aug : lg_.augmentations)
          if (aug.target == def.name)
            for (auto& a : body_attributes(aug.body, def.name)) merge(attrs, std::move(a), aug.pos);
      raw[p.typeName] = std::move(attrs);
    }
    for (const auto& aug : lg_.augmentations)
      if (!lg_.find(aug.target))
        d_.error(aug.pos, "ast augmentation for unknown production '" + aug.target + "'");

    for (auto& i : m.interfaces) i.declaredAttributes = raw[i.name];
    for (auto& n : m.nodeTypes) {
      std::vector<AttrDef> inherited;
      std::set<std::string> seen{n.name};
      for (std::string s = n.superType; !s.empty() && seen.insert(s).second;) {
        const auto& r = raw[s];
        inherited.insert(inherited.end(), r.begin(), r.end());
        const auto* sn = m.find_node(s);
        s = sn ? sn->superType : std::string();
      }
      for (auto& a : raw[n.name]) {
        auto it = std::find_if(inherited.begin(), inherited.end(),
                               [&](const AttrDef& b) { return b.name == a.name; });
        if (it == inherited.end()) {
          n.attributes.push_back(a);
        } else if (!it->same_signature(a)) {
          const auto* lp = lg_.find_type(n.name);
          d_.error(lp ? lp->def.pos : SourcePos{},
                   "attribute '" + a.name + "' of '" + n.name + "' conflicts with an inherited attribute");
        }
      }
    }

    for (const auto& a : lg_.associations) {
      AssocEdge e;
      e.name = a.name;
      e.source = resolve(a.sourceType, a.pos);
      e.target = resolve(a.targetType, a.pos);
      e.sourceCard = a.sourceCard;
      e.targetCard = a.targetCard;
      e.directed = a.directed;
      e.sourceRole = a.sourceRole.empty() ? decapitalize(a.targetType) : a.sourceRole;
      e.targetRole = a.directed ? std::string() : (a.targetRole.empty() ? decapitalize(a.sourceType) : a.targetRole);
      if (a.directed && !a.targetRole.empty())
        d_.warning(a.pos, "directed association '" + a.name + "' ignores the target role");
      if (e.source.empty() || e.target.empty()) continue;
      m.associations.push_back(std::move(e));
    }
    return m;
  }

 private:
  static NodeTypeDef* mutable_node(Metamodel& m, std::string_view n) {
    for (auto& t : m.nodeTypes)
      if (t.name == n) return &t;
    return nullptr;
  }
  static InterfaceDef* mutable_interface(Metamodel& m, std::string_view n) {
    for (auto& t : m.interfaces)
      if (t.name == n) return &t;
    return nullptr;
  }

  std::string resolve(const std::string& name, const SourcePos& pos) {
    if (const auto* p = lg_.find(name)) return p->typeName;
    if (const auto* p = lg_.find_type(name)) return p->typeName;
    d_.error(pos, "unknown production '" + name + "'");
    return {};
  }

  void check_cycles(const Metamodel& m) {
    std::map<std::string, std::vector<std::string>> edges;
    for (const auto& n : m.nodeTypes) {
      if (!n.superType.empty()) edges[n.name].push_back(n.superType);
      for (const auto& i : n.implementedInterfaces) edges[n.name].push_back(i);
    }
    for (const auto& i : m.interfaces) edges[i.name] = i.extendsList;
    std::map<std::string, int> state;  // 1 = on stack, 2 = done
    std::function<bool(const std::string&, std::vector<std::string>&)> dfs =
        [&](const std::string& v, std::vector<std::string>& path) {
          state[v] = 1;
          path.push_back(v);
          for (const auto& w : edges[v]) {
            if (state[w] == 1) {
              std::string cyc;
              auto it = std::find(path.begin(), path.end(), w);
              for (; it != path.end(); ++it) cyc += *it + " -> ";
              cyc += w;
              const auto* lp = lg_.find_type(v);
              d_.error(lp ? lp->def.pos : SourcePos{}, "inheritance cycle: " + cyc);
              return true;
            }
            if (state[w] == 0 && dfs(w, path)) return true;
          }
          path.pop_back();
          state[v] = 2;
          return false;
        };
    for (const auto& [v, _] : edges)
      if (state[v] == 0) {
        std::vector<std::string> path;
        if (dfs(v, path)) return;
      }
  }

  std::string token_value_type(const std::string& token, const SourcePos& pos) {
    if (const auto* t = lg_.find_token(token)) {
      if (t->valueKind == TokenValueKind::custom) return "custom:" + t->converterKey;
      return to_string(t->valueKind);
    }
    if (lg_.options.defaultTokensEnabled && (token == "IDENT" || token == "STRING")) return "string";
    d_.error(pos, "unknown token class '" + token + "'");
    return "string";
  }

  void merge(std::vector<AttrDef>& attrs, AttrDef a, const SourcePos& pos) {
    auto it = std::find_if(attrs.begin(), attrs.end(), [&](const AttrDef& b) { return b.name == a.name; });
    if (it == attrs.end())
      attrs.push_back(std::move(a));
    else if (!it->same_signature(a))
      d_.error(pos, "attribute '" + a.name + "' is declared with different types");
  }

  std::vector<AttrDef> body_attributes(const RuleBody& body, const std::string& owner) {
    std::vector<AttrDef> out;
    std::map<std::string, std::size_t> index;
    for_each_leaf(body, [&](const BodyElement& e) {
      std::string name = attribute_name(e);
      AttrDef a;
      a.name = name;
      switch (e.kind) {
        case BodyElement::Kind::nonterminal: {
          a.kind = AttrDef::Kind::composition;
          const auto* p = lg_.find(e.target);
          if (!p) {
            d_.error(e.pos, "unknown production '" + e.target + "' referenced in '" + owner + "'");
            return;
          }
          a.target = p->typeName;
          break;
        }
        case BodyElement::Kind::token:
          a.kind = AttrDef::Kind::token;
          a.target = e.target;
          a.valueType = token_value_type(e.target, e.pos);
          break;
        case BodyElement::Kind::terminal:
          a.kind = AttrDef::Kind::token;
          a.valueType = "string";
          a.values = {e.target};
          break;
        case BodyElement::Kind::constants:
          a.kind = AttrDef::Kind::boolean_constant;
          a.values = e.constants;
          break;
        default: return;
      }
      auto [it, fresh] = index.emplace(name, out.size());
      if (fresh) {
        out.push_back(std::move(a));
        return;
      }
      AttrDef& prev = out[it->second];
      bool both_const = prev.kind != AttrDef::Kind::composition && prev.kind != AttrDef::Kind::token &&
                        e.kind == BodyElement::Kind::constants;
      bool both_terminal = prev.kind == AttrDef::Kind::token && prev.target.empty() &&
                           e.kind == BodyElement::Kind::terminal;
      if (both_const || both_terminal) {
        for (auto& v : a.values)
          if (std::find(prev.values.begin(), prev.values.end(), v) == prev.values.end()) prev.values.push_back(v);
      } else if (!prev.same_signature(a)) {
        d_.error(e.pos, "attribute '" + name + "' in '" + owner + "' is bound to different elements");
      }
    });
    for (auto& a : out) {
      if (a.kind == AttrDef::Kind::boolean_constant && a.values.size() > 1) a.kind = AttrDef::Kind::enum_constant;
      Occurrence o = occurs(body, [&](const BodyElement& e) {
        return defines_attribute(e) && attribute_name(e) == a.name;
      });
      if (a.kind == AttrDef::Kind::boolean_constant) {
        // A flag is always present; it is false when the constant is absent.
        a.minOccurs = 1;
        a.maxOccurs = 1;
      } else {
        a.minOccurs = o.min;
        a.maxOccurs = o.max == 0 ? 1 : o.max;
      }
    }
    return out;
  }

  // Alternatives outside any repetition: the attributes that live only in one
  // branch are mutually exclusive with those of the other branches.
  std::vector<std::vector<std::vector<std::string>>> exclusivity(const RuleBody& body) {
    std::map<std::string, int> total;
    for_each_leaf(body, [&](const BodyElement& e) { ++total[attribute_name(e)]; });
    std::vector<std::vector<std::vector<std::string>>> out;
    std::function<void(const BodyElement&, bool)> visit = [&](const BodyElement& e, bool repeated) {
      bool rep = repeated || e.card == Cardinality::star || e.card == Cardinality::plus;
      if (e.kind == BodyElement::Kind::alternative && !repeated) {
        std::vector<std::vector<std::string>> groups;
        int populated = 0;
        for (const auto& branch : e.items) {
          std::map<std::string, int> local;
          for_each_leaf(branch, [&](const BodyElement& l) {
            if (l.kind != BodyElement::Kind::constants) ++local[attribute_name(l)];
          });
          std::vector<std::string> names;
          for (auto& [n, c] : local)
            if (c == total[n]) names.push_back(n);
          if (!names.empty()) ++populated;
          groups.push_back(std::move(names));
        }
        if (populated >= 2) out.push_back(std::move(groups));
      }
      for (const auto& c : e.items) visit(c, rep);
    };
    visit(body, false);
    return out;
  }

  const LinkedGrammar& lg_;
  Diagnostics& d_;
};

}  // namespace

Result<Metamodel> derive_metamodel(const LinkedGrammar& linked) {
  Result<Metamodel> r;
  Deriver dv(linked, r.diags);
  Metamodel m = dv.run();
  if (!r.diags.has_errors()) r.value = std::move(m);
  return r;
}

namespace {

std::string ebnf_element(const BodyElement& e) {
  using K = BodyElement::Kind;
  std::string out;
  switch (e.kind) {
    case K::sequence:
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        out += ebnf_element(e.items[i]);
      }
      return out;
    case K::alternative:
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += " | ";
        out += ebnf_element(e.items[i]);
      }
      return out;
    case K::block: return "(" + ebnf_element(e.items.front()) + ")" + cardinality_suffix(e.card);
    case K::nonterminal:
    case K::token: return e.target + cardinality_suffix(e.card);
    case K::terminal: return "\"" + e.target + "\"" + cardinality_suffix(e.card);
    case K::constants: {
      if (e.constants.size() == 1) return "\"" + e.constants.front() + "\"";
      out = "(";
      for (std::size_t i = 0; i < e.constants.size(); ++i) {
        if (i) out += " | ";
        out += "\"" + e.constants[i] + "\"";
      }
      return out + ")";
    }
  }
  return out;
}

}  // namespace

std::string emit_ebnf(const LinkedGrammar& linked) {
  std::string out;
  bool first = true;
  for (const auto& p : linked.productions) {
    if (p.shadowed || p.def.kind == ProductionKind::external) continue;
    std::vector<std::string> alts;
    if (p.def.body) {
      std::string b = ebnf_element(*p.def.body);
      alts.push_back(b);
    }
    for (const auto* s : linked.direct_subrules(p.def.name)) alts.push_back(s->def.name);
    if (!first) out += '\n';
    first = false;
    out += p.def.name + " ::=";
    for (std::size_t i = 0; i < alts.size(); ++i) {
      out += i ? " | " : " ";
      out += alts[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace lwb
