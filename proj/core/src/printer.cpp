#include <algorithm>
#include <functional>
#include <map>

#include "lwb/parser.hpp"

namespace lwb {

namespace {

// Where printing of one node stands: emitted tokens and how many values of
// each slot have been used.
struct State {
  std::vector<std::string> out;
  std::map<std::string, std::size_t, std::less<>> used;

  std::size_t progress() const {
    std::size_t n = 0;
    for (const auto& [_, u] : used) n += u;
    return n;
  }
};

using Cont = std::function<bool(State&)>;

class Printer {
 public:
  explicit Printer(const LanguageComponent& c) : c_(c) {}

  Result<std::string> print(const AstNode& n) {
    Result<std::string> r;
    std::vector<std::string> toks;
    if (!node(n, toks, r.diags)) {
      if (!r.diags.has_errors()) r.diags.error(n.pos, "cannot print node of type '" + n.type + "'");
      return r;
    }
    std::string text;
    for (const auto& t : toks) {
      if (!text.empty() && text.back() != '\n') text += ' ';
      text += t;
      if (t == ";" || t == "{" || t == "}") text += '\n';
    }
    if (!text.empty() && text.back() != '\n') text += '\n';
    r.value = std::move(text);
    return r;
  }

 private:
  static const LanguageComponent* find_language(const LanguageComponent& c, const std::string& lang,
                                                std::vector<const LanguageComponent*>& seen) {
    if (c.language() == lang) return &c;
    if (std::find(seen.begin(), seen.end(), &c) != seen.end()) return nullptr;
    seen.push_back(&c);
    for (const auto& [_, b] : c.embeddings)
      for (const auto& cand : b.candidates)
        if (auto* f = find_language(*cand.component, lang, seen)) return f;
    return nullptr;
  }

  bool node(const AstNode& n, std::vector<std::string>& out, Diagnostics& d) {
    if (!n.language.empty() && n.language != c_.language()) {
      std::vector<const LanguageComponent*> seen;
      const LanguageComponent* other = find_language(c_, n.language, seen);
      if (!other) {
        d.error(n.pos, "no component for language '" + n.language + "'");
        return false;
      }
      Printer sub(*other);
      return sub.node(n, out, d);
    }
    const LinkedProduction* p = c_.grammar.find_type(n.type);
    if (!p || !p->def.body) {
      d.error(n.pos, "no production prints type '" + n.type + "'");
      return false;
    }
    State st;
    State result;
    bool ok = gen(*p->def.body, n, st, [&](State& s) {
      if (!complete(n, s)) return false;
      result = s;
      return true;
    });
    if (!ok) {
      if (!d.has_errors()) d.error(n.pos, "attributes of '" + n.type + "' do not fit its production");
      return false;
    }
    out.insert(out.end(), result.out.begin(), result.out.end());
    return true;
  }

  static bool complete(const AstNode& n, const State& s) {
    for (const auto& slot : n.slots) {
      auto it = s.used.find(slot.name);
      std::size_t u = it == s.used.end() ? 0 : it->second;
      std::size_t need = slot.size();
      if (!slot.composition && slot.values.size() == 1 && slot.values.front() == Value(false)) need = 0;
      if (u != need) return false;
    }
    return true;
  }

  static std::size_t used(const State& s, const std::string& name) {
    auto it = s.used.find(name);
    return it == s.used.end() ? 0 : it->second;
  }

  bool gen(const BodyElement& e, const AstNode& n, State& st, const Cont& k) {
    switch (e.card) {
      case Cardinality::one: return once(e, n, st, k);
      case Cardinality::optional: {
        State saved = st;
        std::size_t before = st.progress();
        if (once(e, n, st, [&](State& s) { return s.progress() > before && k(s); })) return true;
        st = saved;
        return k(st);
      }
      case Cardinality::star: return star(e, n, st, k);
      case Cardinality::plus:
        return once(e, n, st, [&](State& s) { return star(e, n, s, k); });
    }
    return false;
  }

  bool star(const BodyElement& e, const AstNode& n, State& st, const Cont& k) {
    State saved = st;
    std::size_t before = st.progress();
    if (once(e, n, st, [&](State& s) { return s.progress() > before && star(e, n, s, k); })) return true;
    st = saved;
    return k(st);
  }

  bool seq(const BodyElement& e, std::size_t i, const AstNode& n, State& st, const Cont& k) {
    if (i == e.items.size()) return k(st);
    return gen(e.items[i], n, st, [&](State& s) { return seq(e, i + 1, n, s, k); });
  }

  bool once(const BodyElement& e, const AstNode& n, State& st, const Cont& k) {
    using K = BodyElement::Kind;
    switch (e.kind) {
      case K::sequence: return seq(e, 0, n, st, k);
      case K::block: return gen(e.items.front(), n, st, k);
      case K::alternative:
        for (const auto& item : e.items) {
          State saved = st;
          if (gen(item, n, st, k)) return true;
          st = saved;
        }
        return false;
      case K::terminal: {
        if (!e.label.empty()) {
          const Slot* s = n.slot(e.label);
          std::size_t u = used(st, e.label);
          if (!s || u >= s->values.size() || to_display(s->values[u]) != e.target) return false;
          st.used[e.label] = u + 1;
        }
        st.out.push_back(e.target);
        return k(st);
      }
      case K::token: {
        std::string name = attribute_name(e);
        const Slot* s = n.slot(name);
        std::size_t u = used(st, name);
        if (!s || u >= s->values.size()) return false;
        st.out.push_back(render_token(c_.lexer, e.target, s->values[u]));
        st.used[name] = u + 1;
        return k(st);
      }
      case K::constants: {
        std::string name = attribute_name(e);
        const Slot* s = n.slot(name);
        std::size_t u = used(st, name);
        if (!s || u >= s->values.size()) return false;
        const Value& v = s->values[u];
        if (const bool* b = std::get_if<bool>(&v)) {
          if (!*b) return false;
          st.out.push_back(e.constants.front());
        } else {
          std::string text = to_display(v);
          if (std::find(e.constants.begin(), e.constants.end(), text) == e.constants.end()) return false;
          st.out.push_back(text);
        }
        st.used[name] = u + 1;
        return k(st);
      }
      case K::nonterminal: {
        const LinkedProduction* p = c_.grammar.find(e.target);
        if (!p) return false;
        std::string name = attribute_name(e);
        const Slot* s = n.slot(name);
        std::size_t u = used(st, name);
        if (!s || u >= s->children.size()) return false;
        const AstNode* child = s->children[u];
        bool foreign = !child->language.empty() && child->language != c_.language();
        if (p->def.kind == ProductionKind::external) {
          if (!foreign) return false;
        } else if (foreign || !c_.metamodel.is_subtype(child->type, p->typeName)) {
          return false;
        }
        auto& cached = childText_[child];
        if (!cached) {
          std::vector<std::string> toks;
          Diagnostics ignored;
          cached = node(*child, toks, ignored) ? std::optional(toks) : std::optional<std::vector<std::string>>();
          if (!cached) cached = std::vector<std::string>{};
          failed_[child] = ignored.has_errors();
        }
        if (failed_[child]) return false;
        std::size_t mark = st.out.size();
        st.out.insert(st.out.end(), cached->begin(), cached->end());
        st.used[name] = u + 1;
        if (k(st)) return true;
        st.out.resize(mark);
        return false;
      }
    }
    return false;
  }

  const LanguageComponent& c_;
  std::map<const AstNode*, std::optional<std::vector<std::string>>> childText_;
  std::map<const AstNode*, bool> failed_;
};

}  // namespace

Result<std::string> pretty_print(const AstNode& root, const LanguageComponent& c) {
  Printer p(c);
  return p.print(root);
}

}  // namespace lwb
