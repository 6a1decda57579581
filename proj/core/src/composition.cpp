#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lwb/component.hpp"

namespace lwb {

namespace fs = std::filesystem;

const char* to_string(SelectionRule::Kind k) {
  switch (k) {
    case SelectionRule::Kind::fixed: return "fixed";
    case SelectionRule::Kind::by_attribute: return "by-attribute";
    case SelectionRule::Kind::by_first_token: return "by-first-token";
  }
  return "?";
}

namespace {

void collect_refs(const BodyElement& e, std::vector<std::string>& out) {
  if (e.kind == BodyElement::Kind::nonterminal) out.push_back(e.target);
  for (const auto& c : e.items) collect_refs(c, out);
}

std::string identity(const LinkedProduction& p) { return p.origin + "." + p.def.name; }

class InheritanceLinker {
 public:
  InheritanceLinker(const std::map<std::string, GrammarDef>& available, Diagnostics& d) : available_(available), d_(d) {}

  const LinkedGrammar* link(const GrammarDef& g) {
    std::string qn = g.qualified_name();
    if (auto it = done_.find(qn); it != done_.end()) return &it->second;
    if (!active_.insert(qn).second) {
      d_.error(g.pos, "grammar '" + qn + "' inherits from itself");
      return nullptr;
    }
    std::vector<const LinkedGrammar*> supers;
    for (const auto& s : g.supers) {
      auto it = available_.find(s);
      if (it == available_.end()) {
        // Unqualified names resolve against the grammar's own package.
        it = available_.find(g.package.empty() ? s : g.package + "." + s);
      }
      if (it == available_.end()) {
        d_.error(g.pos, "cannot resolve supergrammar '" + s + "' of '" + qn + "'");
        continue;
      }
      if (const auto* l = link(it->second)) supers.push_back(l);
    }
    active_.erase(qn);
    if (d_.has_errors()) return nullptr;
    LinkedGrammar lg = merge(g, supers);
    return &done_.emplace(qn, std::move(lg)).first->second;
  }

 private:
  const Metamodel* metamodel_of(const LinkedGrammar& lg) {
    auto it = metamodels_.find(lg.qualifiedName);
    if (it == metamodels_.end()) {
      auto m = derive_metamodel(lg);
      it = metamodels_.emplace(lg.qualifiedName, m ? std::optional<Metamodel>(std::move(*m.value)) : std::nullopt).first;
    }
    return it->second ? &*it->second : nullptr;
  }

  // True when `sub` is `super` or overrides it, directly or transitively.
  static bool specializes(const std::vector<LinkedProduction>& ps, const LinkedProduction& sub,
                          const LinkedProduction& super) {
    std::string target = identity(super);
    const LinkedProduction* cur = &sub;
    std::set<std::string> seen;
    while (cur && seen.insert(identity(*cur)).second) {
      if (identity(*cur) == target) return true;
      if (cur->overrides.empty()) return false;
      const LinkedProduction* next = nullptr;
      for (const auto& p : ps)
        if (identity(p) == cur->overrides) next = &p;
      cur = next;
    }
    return false;
  }

  bool same_attributes(const LinkedGrammar& ga, const LinkedProduction& a, const LinkedGrammar& gb,
                       const LinkedProduction& b) {
    const Metamodel* ma = metamodel_of(ga);
    const Metamodel* mb = metamodel_of(gb);
    if (!ma || !mb) return false;
    auto xa = ma->all_attributes(a.typeName);
    auto xb = mb->all_attributes(b.typeName);
    if (xa.size() != xb.size()) return false;
    for (const auto& x : xa) {
      auto it = std::find_if(xb.begin(), xb.end(), [&](const AttrDef& y) { return y.name == x.name; });
      if (it == xb.end() || !x.same_signature(*it)) return false;
    }
    return true;
  }

  static void shadow(LinkedProduction& p) {
    p.shadowed = true;
    p.typeName = identity(p);
  }

  LinkedGrammar merge(const GrammarDef& g, const std::vector<const LinkedGrammar*>& supers) {
    LinkedGrammar out;
    out.qualifiedName = g.qualified_name();
    out.lineage = {out.qualifiedName};
    out.pos = g.pos;
    for (const auto* s : supers)
      for (const auto& l : s->lineage)
        if (std::find(out.lineage.begin(), out.lineage.end(), l) == out.lineage.end()) out.lineage.push_back(l);

    // Which super delivered the active production of a name.
    std::map<std::string, const LinkedGrammar*> from;
    for (const auto* s : supers) {
      for (const auto& p : s->productions) {
        auto dup = std::find_if(out.productions.begin(), out.productions.end(),
                                [&](const LinkedProduction& q) { return identity(q) == identity(p); });
        if (dup != out.productions.end()) continue;
        LinkedProduction copy = p;
        if (copy.shadowed) {
          out.productions.push_back(std::move(copy));
          continue;
        }
        auto prev = std::find_if(out.productions.begin(), out.productions.end(), [&](const LinkedProduction& q) {
          return !q.shadowed && q.def.name == p.def.name;
        });
        if (prev == out.productions.end()) {
          from[p.def.name] = s;
          out.productions.push_back(std::move(copy));
          continue;
        }
        // Same name from two supergrammars.
        std::vector<LinkedProduction> all = out.productions;
        all.insert(all.end(), s->productions.begin(), s->productions.end());
        if (specializes(all, copy, *prev)) {
          shadow(*prev);
          from[p.def.name] = s;
          out.productions.push_back(std::move(copy));
        } else if (specializes(all, *prev, copy) || same_attributes(*from[p.def.name], *prev, *s, copy)) {
          shadow(copy);
          out.productions.push_back(std::move(copy));
        } else {
          d_.error(g.pos, "clashing inherited productions '" + p.def.name + "' from " + prev->origin + " and " +
                              copy.origin + " in grammar '" + out.qualifiedName + "'");
          shadow(copy);
          out.productions.push_back(std::move(copy));
        }
      }
      for (const auto& t : s->tokens)
        if (!out.find_token(t.name)) out.tokens.push_back(t);
      for (const auto& a : s->associations)
        if (std::none_of(out.associations.begin(), out.associations.end(),
                         [&](const AssociationDef& b) { return b.name == a.name; }))
          out.associations.push_back(a);
      for (const auto& a : s->augmentations)
        if (std::find(out.augmentations.begin(), out.augmentations.end(), a) == out.augmentations.end())
          out.augmentations.push_back(a);
      for (const auto& a : s->attributeDecls)
        if (std::find(out.attributeDecls.begin(), out.attributeDecls.end(), a) == out.attributeDecls.end())
          out.attributeDecls.push_back(a);
    }

    for (const auto& own : g.productions) {
      LinkedProduction p{own, out.qualifiedName, own.name, {}, false};
      auto prev = std::find_if(out.productions.begin(), out.productions.end(), [&](const LinkedProduction& q) {
        return !q.shadowed && q.def.name == own.name;
      });
      if (prev != out.productions.end()) {
        shadow(*prev);
        p.overrides = prev->typeName;
        if (!p.def.body) {
          p.def.body = prev->def.body;
          if (p.def.kind == ProductionKind::node) p.def.kind = prev->def.kind;
        }
        for (const auto& e : prev->def.extends)
          if (std::find(p.def.extends.begin(), p.def.extends.end(), e) == p.def.extends.end())
            p.def.extends.push_back(e);
        for (const auto& e : prev->def.implements)
          if (std::find(p.def.implements.begin(), p.def.implements.end(), e) == p.def.implements.end())
            p.def.implements.push_back(e);
        if (p.def.requiredContract.empty()) p.def.requiredContract = prev->def.requiredContract;
      }
      out.productions.push_back(std::move(p));
    }
    for (const auto& t : g.tokens) {
      auto it = std::find_if(out.tokens.begin(), out.tokens.end(), [&](const TokenDef& x) { return x.name == t.name; });
      if (it != out.tokens.end())
        *it = t;
      else
        out.tokens.push_back(t);
    }
    for (const auto& a : g.associations) {
      auto it = std::find_if(out.associations.begin(), out.associations.end(),
                             [&](const AssociationDef& b) { return b.name == a.name; });
      if (it != out.associations.end())
        *it = a;
      else
        out.associations.push_back(a);
    }
    for (const auto& a : g.astAugmentations) out.augmentations.push_back(a);
    for (auto a : g.attributeDecls) {
      if (a.owningGrammar.empty()) a.owningGrammar = out.qualifiedName;
      out.attributeDecls.push_back(std::move(a));
    }

    out.options = g.options;
    for (const auto* s : supers) {
      if (out.options.compileUnitStart.empty()) out.options.compileUnitStart = s->options.compileUnitStart;
      if (!out.options.lookaheadSet && s->options.lookaheadSet) {
        out.options.lookaheadK = s->options.lookaheadK;
        out.options.lookaheadSet = true;
      }
      if (!s->options.defaultTokensEnabled) out.options.defaultTokensEnabled = false;
    }
    return out;
  }

  const std::map<std::string, GrammarDef>& available_;
  Diagnostics& d_;
  std::map<std::string, LinkedGrammar> done_;
  std::set<std::string> active_;
  std::map<std::string, std::optional<Metamodel>> metamodels_;
};

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Candidate start type must carry the contract's attributes.
void check_contract(const EmbeddingBinding& b, const Contract& contract, const SourcePos& pos, Diagnostics& d) {
  for (const auto& cand : b.candidates) {
    const auto* sp = cand.component->grammar.find(cand.start);
    if (!sp) continue;
    const Metamodel& m = cand.component->metamodel;
    std::vector<AttrDef> attrs;
    if (const auto* i = m.find_interface(sp->typeName))
      attrs = i->declaredAttributes;
    else
      attrs = m.all_attributes(sp->typeName);
    for (const auto& r : contract.requiredAttrs)
      if (std::none_of(attrs.begin(), attrs.end(), [&](const AttrDef& a) { return a.name == r; }))
        d.error(pos, "candidate '" + cand.component->name + "' start type '" + sp->typeName +
                         "' does not satisfy contract '" + contract.name + "': missing attribute '" + r + "'");
  }
}

}  // namespace

std::vector<std::string> LanguageComponent::reachable_externals() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::deque<std::string> work(startRules.begin(), startRules.end());
  while (!work.empty()) {
    std::string n = work.front();
    work.pop_front();
    if (!seen.insert(n).second) continue;
    const auto* p = grammar.find(n);
    if (!p) continue;
    if (p->def.kind == ProductionKind::external) {
      out.push_back(n);
      continue;
    }
    std::vector<std::string> refs;
    if (p->def.body) collect_refs(*p->def.body, refs);
    for (const auto* s : grammar.direct_subrules(n)) refs.push_back(s->def.name);
    work.insert(work.end(), refs.begin(), refs.end());
  }
  return out;
}

Result<LinkedGrammar> link_inheritance(const GrammarDef& root, const std::map<std::string, GrammarDef>& available) {
  Result<LinkedGrammar> r;
  InheritanceLinker linker(available, r.diags);
  const LinkedGrammar* lg = linker.link(root);
  if (lg && !r.diags.has_errors()) r.value = *lg;
  return r;
}

namespace {

Result<ComponentPtr> finish(std::shared_ptr<LanguageComponent> c) {
  Result<ComponentPtr> r;
  auto llk = analyze_llk(c->grammar, c->k, c->startRules);
  for (const auto& d : llk.diags) {
    r.diags.add(d);
    if (d.severity != Severity::error) c->buildNotes.add(d);
  }
  if (llk.diags.has_errors()) return r;
  c->decisions = std::move(llk.table);
  r.value = std::move(c);
  return r;
}

}  // namespace

Result<ComponentPtr> build_component(LinkedGrammar grammar, ComponentOptions options) {
  Result<ComponentPtr> r;
  auto c = std::make_shared<LanguageComponent>();
  c->name = options.name.empty() ? grammar.qualifiedName : options.name;
  c->k = options.k > 0 ? options.k : grammar.options.lookaheadK;
  c->resolver = std::move(options.resolver);
  c->grammar = std::move(grammar);

  auto lexer = build_lexer(c->grammar, options.converters);
  r.diags.append(lexer.diags);
  auto mm = derive_metamodel(c->grammar);
  r.diags.append(mm.diags);
  if (!lexer || !mm || r.diags.has_errors()) return r;
  c->lexer = std::move(*lexer.value);
  c->metamodel = std::move(*mm.value);
  c->buildNotes.append(r.diags);

  c->startRules = std::move(options.startRules);
  if (c->startRules.empty()) {
    if (!c->grammar.options.compileUnitStart.empty()) {
      c->startRules.push_back(c->grammar.options.compileUnitStart);
    } else {
      for (const auto& p : c->grammar.productions)
        if (!p.shadowed && p.def.kind != ProductionKind::external) {
          c->startRules.push_back(p.def.name);
          break;
        }
    }
  }
  if (c->startRules.empty()) {
    r.diags.error(c->grammar.pos, "grammar '" + c->grammar.qualifiedName + "' has no start production");
    return r;
  }
  for (const auto& s : c->startRules)
    if (!c->grammar.find(s)) r.diags.error(c->grammar.pos, "unknown start production '" + s + "'");
  if (r.diags.has_errors()) return r;

  auto f = finish(std::move(c));
  r.diags.append(f.diags);
  r.value = std::move(f.value);
  return r;
}

Result<ComponentPtr> bind_embedding(const ComponentPtr& host, const std::vector<EmbeddingBinding>& bindings) {
  Result<ComponentPtr> r;
  for (const auto& b : bindings) {
    const auto* p = host->grammar.find(b.externalNT);
    SourcePos pos = p ? p->def.pos : host->grammar.pos;
    if (!p || p->def.kind != ProductionKind::external) {
      r.diags.error(pos, "'" + b.externalNT + "' is not an external nonterminal of '" + host->name + "'");
      continue;
    }
    if (b.candidates.empty()) {
      r.diags.error(pos, "binding of '" + b.externalNT + "' has no candidate");
      continue;
    }
    for (const auto& cand : b.candidates) {
      if (!cand.component) {
        r.diags.error(pos, "binding of '" + b.externalNT + "' has an empty candidate");
      } else if (!cand.component->grammar.find(cand.start)) {
        r.diags.error(pos, "candidate '" + cand.component->name + "' has no production '" + cand.start + "'");
      }
    }
    if (r.diags.has_errors()) continue;
    const auto& sel = b.selection;
    for (const auto& [key, idx] : sel.cases)
      if (idx >= b.candidates.size())
        r.diags.error(pos, "selection case '" + key + "' names candidate " + std::to_string(idx) + " of " +
                               std::to_string(b.candidates.size()));
    if (sel.otherwise && *sel.otherwise >= b.candidates.size())
      r.diags.error(pos, "selection fallback names candidate " + std::to_string(*sel.otherwise) + " of " +
                             std::to_string(b.candidates.size()));
    if (sel.kind == SelectionRule::Kind::by_attribute) {
      // The attribute must belong to every node type whose body enters the hole.
      for (const auto& q : host->grammar.productions) {
        if (q.shadowed || !q.def.body) continue;
        std::vector<std::string> refs;
        collect_refs(*q.def.body, refs);
        if (std::find(refs.begin(), refs.end(), b.externalNT) == refs.end()) continue;
        if (!host->metamodel.find_attribute(q.typeName, sel.attribute))
          r.diags.error(pos, "selection attribute '" + sel.attribute + "' is not an attribute of '" + q.def.name + "'");
      }
    }
    if (b.contract) {
      if (!p->def.requiredContract.empty() && p->def.requiredContract != b.contract->name)
        r.diags.error(pos, "'" + b.externalNT + "' requires contract '" + p->def.requiredContract + "', binding gives '" +
                               b.contract->name + "'");
      check_contract(b, *b.contract, pos, r.diags);
    } else if (!p->def.requiredContract.empty()) {
      r.diags.warning(pos, "contract '" + p->def.requiredContract + "' of '" + b.externalNT +
                               "' has no registered attribute set; not checked");
    }
  }
  if (r.diags.has_errors()) return r;

  auto c = std::make_shared<LanguageComponent>();
  c->name = host->name;
  c->grammar = host->grammar;
  c->lexer = host->lexer;
  c->metamodel = host->metamodel;
  c->k = host->k;
  c->startRules = host->startRules;
  c->embeddings = host->embeddings;
  c->resolver = host->resolver;
  c->buildNotes = host->buildNotes;
  c->buildNotes.append(r.diags);
  for (const auto& b : bindings) c->embeddings[b.externalNT] = b;
  auto f = finish(std::move(c));
  r.value = std::move(f.value);
  if (!r.value) r.diags.append(f.diags);
  return r;
}

Diagnostics compose_check(const LanguageComponent& c) {
  Diagnostics d;
  std::set<const LanguageComponent*> seen;
  std::function<void(const LanguageComponent&)> check = [&](const LanguageComponent& x) {
    if (!seen.insert(&x).second) return;
    for (const auto& ext : x.reachable_externals()) {
      if (x.embeddings.count(ext)) continue;
      const auto* p = x.grammar.find(ext);
      d.error(p ? p->def.pos : x.grammar.pos,
              "external nonterminal '" + ext + "' of '" + x.name + "' is not bound to a language");
    }
    for (const auto& [ext, b] : x.embeddings) {
      const auto* p = x.grammar.find(ext);
      SourcePos pos = p ? p->def.pos : x.grammar.pos;
      if (b.candidates.size() > 1 && b.selection.kind == SelectionRule::Kind::fixed)
        d.warning(pos, "'" + ext + "' has " + std::to_string(b.candidates.size()) +
                           " candidates but fixed selection: only first candidate reachable");
      for (const auto& cand : b.candidates) check(*cand.component);
    }
    for (const auto& dec : x.decisions.decisions) {
      if (!dec.conflict) continue;
      for (const auto& s : dec.witness)
        if (is_external_symbol(s)) {
          d.warning(dec.pos, "decision in '" + dec.production + "' next to embedded " + s +
                                 " is not decided by lookahead; backtracking picks the first branch");
          break;
        }
    }
  };
  check(c);
  return d;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_artifact(const LanguageComponent& c) {
  std::ostringstream os;
  os << "component " << c.name << "\n";
  os << "language " << c.language() << "\n";
  os << "k " << c.k << "\n";
  os << "start";
  for (const auto& s : c.startRules) os << ' ' << s;
  os << "\nlineage";
  for (const auto& l : c.grammar.lineage) os << ' ' << l;
  os << "\n";
  for (const auto& p : c.grammar.productions) {
    os << "production " << p.typeName << " " << to_string(p.def.kind) << " origin=" << p.origin;
    if (!p.overrides.empty()) os << " overrides=" << p.overrides;
    if (p.shadowed) os << " shadowed";
    for (const auto& e : p.def.extends) os << " extends=" << e;
    for (const auto& e : p.def.implements) os << " implements=" << e;
    for (const auto& e : p.def.astExtends) os << " astextends=" << e;
    for (const auto& e : p.def.astImplements) os << " astimplements=" << e;
    if (!p.def.requiredContract.empty()) os << " contract=" << p.def.requiredContract;
    if (p.def.body) os << " = " << print_body(*p.def.body);
    os << "\n";
  }
  for (const auto& t : c.grammar.tokens) {
    os << "token " << t.name << " = " << print_pattern(t.pattern) << " : " << to_string(t.valueKind);
    if (!t.converterKey.empty()) os << " /" << t.converterKey;
    os << "\n";
  }
  for (const auto& rule : c.lexer.tokenRules) os << "lexrule " << rule.name << "\n";
  for (const auto& t : c.lexer.reservedTerminals) os << "reserved " << t << "\n";
  for (const auto& a : c.grammar.associations)
    os << "association " << a.name << " " << a.sourceType << "." << a.sourceRole << " " << a.sourceCard.to_string()
       << (a.directed ? " -> " : " <-> ") << a.targetCard.to_string() << " " << a.targetType << "." << a.targetRole
       << "\n";
  for (const auto& a : c.grammar.attributeDecls)
    os << "attribute " << (a.direction == AttributeDirection::synthesized ? "syn " : "inh ") << a.name << " /"
       << a.valueKind << "\n";
  // Bound languages by name only: rebuilding them must not touch this artifact.
  for (const auto& [ext, b] : c.embeddings) {
    os << "embed " << ext << " " << to_string(b.selection.kind);
    if (!b.selection.attribute.empty()) os << " attr=" << b.selection.attribute;
    for (const auto& cand : b.candidates) os << " " << cand.component->name << ":" << cand.start;
    for (const auto& [key, idx] : b.selection.cases) os << " case " << key << "=" << idx;
    if (b.selection.otherwise) os << " otherwise=" << *b.selection.otherwise;
    if (b.contract) {
      os << " contract=" << b.contract->name;
      for (const auto& a : b.contract->requiredAttrs) os << "," << a;
    }
    os << "\n";
  }
  os << emit_metamodel_report(c.metamodel, ReportFormat::json) << "\n";
  return os.str();
}

ArtifactStore::Entry ArtifactStore::store(const LanguageComponent& c) const {
  std::string text = serialize_artifact(c);
  Entry e;
  e.hash = fnv1a64(text);
  std::string stem = c.name;
  std::replace(stem.begin(), stem.end(), '/', '_');
  e.path = dir_ / (stem + "-" + hex64(e.hash) + ".lwc");
  if (fs::exists(e.path)) return e;
  fs::create_directories(dir_);
  std::ofstream out(e.path, std::ios::binary);
  out << text;
  e.written = true;
  return e;
}

// ---- configuration ----

namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else {
    for (const auto& s : v) out.push_back(s.get<std::string>());
  }
  return out;
}

ResolverConfig resolver_of(const json& j) {
  ResolverConfig rc;
  if (j.value("scheme", std::string("flat")) == "hierarchical") rc.scheme = SymbolScheme::hierarchical;
  if (j.contains("keyAttr"))
    for (const auto& [k, v] : j.at("keyAttr").items()) rc.keyAttr[k] = v.get<std::string>();
  if (j.contains("sourceKey"))
    for (const auto& [k, v] : j.at("sourceKey").items()) rc.sourceKey[k] = v.get<std::string>();
  return rc;
}

}  // namespace

Result<CompositionConfig> parse_composition_config(std::string_view text, const fs::path& baseDir) {
  Result<CompositionConfig> r;
  SourcePos pos{baseDir.string(), 1, 1};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    r.diags.error(pos, std::string("composition config is not valid JSON: ") + e.what());
    return r;
  }
  CompositionConfig cfg;
  cfg.baseDir = baseDir;
  try {
    for (const auto& cj : j.value("components", json::array())) {
      ComponentSpec s;
      s.name = cj.at("name").get<std::string>();
      s.grammars = string_list(cj, "grammars");
      s.start = string_list(cj, "start");
      s.extensions = string_list(cj, "extensions");
      s.keywords = string_list(cj, "keywords");
      s.k = cj.value("k", 0);
      if (cj.contains("resolver")) s.resolver = resolver_of(cj.at("resolver"));
      if (cj.contains("symbols")) s.resolver = resolver_of(cj.at("symbols"));
      if (s.grammars.empty()) r.diags.error(pos, "component '" + s.name + "' lists no grammar");
      cfg.components.push_back(std::move(s));
    }
    for (const auto& ej : j.value("embeddings", json::array())) {
      EmbeddingSpec e;
      e.host = ej.at("host").get<std::string>();
      e.external = ej.at("external").get<std::string>();
      for (const auto& c : ej.at("candidates"))
        e.candidates.emplace_back(c.at("component").get<std::string>(), c.value("start", std::string()));
      if (ej.contains("selection")) {
        const auto& sj = ej.at("selection");
        std::string kind = sj.value("kind", std::string("fixed"));
        if (kind == "fixed")
          e.selection.kind = SelectionRule::Kind::fixed;
        else if (kind == "by-attribute")
          e.selection.kind = SelectionRule::Kind::by_attribute;
        else if (kind == "by-first-token")
          e.selection.kind = SelectionRule::Kind::by_first_token;
        else
          r.diags.error(pos, "unknown selection kind '" + kind + "'");
        e.selection.attribute = sj.value("attribute", std::string());
        if (sj.contains("cases"))
          for (const auto& [k, v] : sj.at("cases").items()) e.selection.cases[k] = v.get<std::size_t>();
        if (sj.contains("otherwise")) e.selection.otherwise = sj.at("otherwise").get<std::size_t>();
      }
      if (ej.contains("contract")) {
        Contract c;
        c.name = ej.at("contract").value("name", std::string());
        c.requiredAttrs = string_list(ej.at("contract"), "requiredAttrs");
        e.contract = std::move(c);
      }
      cfg.embeddings.push_back(std::move(e));
    }
    if (j.contains("tool")) {
      const auto& tj = j.at("tool");
      cfg.tool.units = string_list(tj, "units");
      cfg.tool.modelPath = string_list(tj, "modelPath");
      cfg.tool.outputRoot = tj.value("outputRoot", std::string("out"));
      cfg.tool.dryRun = tj.value("dryRun", false);
      cfg.tool.strictLinks = tj.value("strictLinks", false);
      cfg.tool.attributeMaps = string_list(tj, "attributeMaps");
    }
  } catch (const json::exception& e) {
    r.diags.error(pos, std::string("malformed composition config: ") + e.what());
    return r;
  }
  if (!r.diags.has_errors()) r.value = std::move(cfg);
  return r;
}

namespace {

Result<std::string> read_file(const fs::path& p) {
  Result<std::string> r;
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    r.diags.error({p.string(), 1, 1}, "cannot read file");
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  r.value = ss.str();
  return r;
}

}  // namespace

Result<CompositionConfig> load_composition_config(const fs::path& file) {
  auto text = read_file(file);
  if (!text) return {std::nullopt, text.diags};
  auto r = parse_composition_config(*text, file.parent_path());
  return r;
}

Result<GrammarDef> load_grammar_file(const fs::path& file) {
  auto text = read_file(file);
  if (!text) return {std::nullopt, text.diags};
  auto g = parse_grammar(*text, file.string());
  if (!g) return g;
  auto v = validate_grammar(*g);
  g.diags.append(v);
  if (v.has_errors()) g.value.reset();
  return g;
}

ComponentPtr Composition::find(std::string_view name) const {
  auto it = components.find(std::string(name));
  return it == components.end() ? nullptr : it->second;
}

Result<Composition> compose(const CompositionConfig& config, std::shared_ptr<const ConverterRegistry> converters) {
  Result<Composition> r;
  Composition comp;
  comp.config = config;
  std::map<std::string, std::string> mainOf;  // component -> main grammar
  for (const auto& spec : config.components) {
    for (std::size_t i = 0; i < spec.grammars.size(); ++i) {
      fs::path p = config.baseDir / spec.grammars[i];
      auto g = load_grammar_file(p);
      r.diags.append(g.diags);
      if (!g) continue;
      std::string qn = g->qualified_name();
      if (i == 0) mainOf[spec.name] = qn;
      comp.grammars.emplace(qn, std::move(*g.value));
    }
  }
  if (r.diags.has_errors()) return r;

  std::map<std::string, ComponentPtr> plain;
  for (const auto& spec : config.components) {
    auto lg = link_inheritance(comp.grammars.at(mainOf.at(spec.name)), comp.grammars);
    r.diags.append(lg.diags);
    if (!lg) continue;
    ComponentOptions o;
    o.name = spec.name;
    o.startRules = spec.start;
    o.k = spec.k;
    o.converters = converters;
    o.resolver = spec.resolver;
    auto c = build_component(std::move(*lg.value), std::move(o));
    r.diags.append(c.diags);
    if (c) plain[spec.name] = *c;
  }
  if (r.diags.has_errors()) return r;

  // Bind embedded languages before their hosts.
  std::set<std::string> visiting;
  std::function<ComponentPtr(const std::string&)> resolve = [&](const std::string& name) -> ComponentPtr {
    if (auto it = comp.components.find(name); it != comp.components.end()) return it->second;
    auto base = plain.find(name);
    if (base == plain.end()) {
      r.diags.error({config.baseDir.string(), 1, 1}, "unknown component '" + name + "'");
      return nullptr;
    }
    if (!visiting.insert(name).second) {
      r.diags.error({config.baseDir.string(), 1, 1}, "component '" + name + "' embeds itself");
      return nullptr;
    }
    std::vector<EmbeddingBinding> bindings;
    for (const auto& e : config.embeddings) {
      if (e.host != name) continue;
      EmbeddingBinding b;
      b.externalNT = e.external;
      b.selection = e.selection;
      b.contract = e.contract;
      for (const auto& [cn, start] : e.candidates) {
        ComponentPtr cc = resolve(cn);
        if (!cc) return nullptr;
        b.candidates.push_back({cc, start.empty() ? cc->default_start() : start});
      }
      bindings.push_back(std::move(b));
    }
    visiting.erase(name);
    ComponentPtr out = base->second;
    if (!bindings.empty()) {
      auto bound = bind_embedding(out, bindings);
      r.diags.append(bound.diags);
      if (!bound) return nullptr;
      out = *bound;
    }
    comp.components[name] = out;
    return out;
  };
  for (const auto& spec : config.components) resolve(spec.name);
  if (r.diags.has_errors()) return r;
  for (const auto& [name, c] : comp.components) r.diags.append(compose_check(*c));
  if (r.diags.has_errors()) return r;
  r.value = std::move(comp);
  return r;
}

}  // namespace lwb
