#include "lwb/llk.hpp"

#include <algorithm>
#include <functional>

namespace lwb {

Symbol terminal_symbol(std::string_view text) { return "\"" + std::string(text) + "\""; }
Symbol external_symbol(std::string_view production) { return "<" + std::string(production) + ">"; }
Symbol symbol_of(const Lexeme& lx) { return lx.terminal ? terminal_symbol(lx.raw) : lx.kind; }
bool is_external_symbol(std::string_view s) { return s.size() > 2 && s.front() == '<' && s.back() == '>'; }

SeqSet concat_k(const SeqSet& a, const SeqSet& b, int k) {
  SeqSet out;
  for (const auto& x : a) {
    if (static_cast<int>(x.size()) >= k || (!x.empty() && x.back() == kEndSymbol)) {
      out.insert(x);
      continue;
    }
    for (const auto& y : b) {
      SymbolSeq s = x;
      for (const auto& sym : y) {
        if (static_cast<int>(s.size()) >= k) break;
        s.push_back(sym);
      }
      out.insert(std::move(s));
    }
  }
  return out;
}

std::string format_seq(const SymbolSeq& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += s[i];
  }
  return out + "]";
}

const Decision* DecisionTable::at(const BodyElement* e) const {
  auto it = byElement_.find(e);
  return it == byElement_.end() ? nullptr : &decisions[it->second];
}

const Decision* DecisionTable::for_production(std::string_view name) const {
  auto it = byProduction_.find(name);
  return it == byProduction_.end() ? nullptr : &decisions[it->second];
}

ProductionAlternatives alternatives_of(const LinkedGrammar& g, const LinkedProduction& p) {
  ProductionAlternatives a;
  if (p.def.body) a.body = &*p.def.body;
  if (p.def.kind != ProductionKind::external) a.subrules = g.direct_subrules(p.def.name);
  return a;
}

namespace {

void insert_all(SeqSet& into, const SeqSet& from) { into.insert(from.begin(), from.end()); }

const SeqSet& epsilon() {
  static const SeqSet e{SymbolSeq{}};
  return e;
}

}  // namespace

class LlkAnalyzer {
 public:
  LlkAnalyzer(const LinkedGrammar& g, int k, LlkResult& r) : g_(g), k_(k), r_(r) {}

  void run(const std::vector<std::string>& starts) {
    r_.table.k = k_;
    for (const auto& p : g_.productions)
      if (!p.shadowed) active_.push_back(&p);

    compute_first();
    if (check_left_recursion()) return;

    std::vector<std::string> roots = starts;
    if (roots.empty() && !active_.empty()) {
      roots.push_back(g_.options.compileUnitStart.empty() ? active_.front()->def.name
                                                          : g_.options.compileUnitStart);
    }
    for (const auto& s : roots) follow_[s].insert(SymbolSeq{std::string(kEndSymbol)});
    // FOLLOW sets grow monotonically; iterate until stable.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto* p : active_) changed |= follow_pass(*p, false);
    }
    for (const auto* p : active_) follow_pass(*p, true);
    r_.table.follow = follow_;
    report_conflicts();
  }

 private:
  // ---- FIRST_k -----------------------------------------------------------

  SeqSet symbol_set(const Symbol& s) const { return SeqSet{SymbolSeq{s}}; }

  SeqSet repeat(const SeqSet& once, Cardinality c) const {
    switch (c) {
      case Cardinality::one: return once;
      case Cardinality::optional: {
        SeqSet out = once;
        out.insert(SymbolSeq{});
        return out;
      }
      case Cardinality::star:
      case Cardinality::plus: {
        SeqSet star = epsilon();
        for (;;) {
          SeqSet next = star;
          insert_all(next, concat_k(once, star, k_));
          if (next == star) break;
          star = std::move(next);
        }
        return c == Cardinality::star ? star : concat_k(once, star, k_);
      }
    }
    return once;
  }

  SeqSet first_of_ref(const std::string& target) const {
    const auto* p = g_.find(target);
    if (!p) return {};
    if (p->def.kind == ProductionKind::external) return symbol_set(external_symbol(target));
    auto it = r_.table.first.find(target);
    return it == r_.table.first.end() ? SeqSet{} : it->second;
  }

  SeqSet first_once(const BodyElement& e) const {
    using K = BodyElement::Kind;
    switch (e.kind) {
      case K::sequence: {
        SeqSet acc = epsilon();
        for (const auto& c : e.items) {
          acc = concat_k(acc, first(c), k_);
          if (acc.empty()) break;
        }
        return acc;
      }
      case K::alternative: {
        SeqSet acc;
        for (const auto& c : e.items) insert_all(acc, first(c));
        return acc;
      }
      case K::block: return first(e.items.front());
      case K::nonterminal: return first_of_ref(e.target);
      case K::token: return symbol_set(e.target);
      case K::terminal: return symbol_set(terminal_symbol(e.target));
      case K::constants: {
        SeqSet out;
        for (const auto& c : e.constants) out.insert(SymbolSeq{terminal_symbol(c)});
        return out;
      }
    }
    return {};
  }

  SeqSet first(const BodyElement& e) const {
    if (e.kind == BodyElement::Kind::sequence || e.kind == BodyElement::Kind::alternative ||
        e.kind == BodyElement::Kind::constants)
      return first_once(e);
    return repeat(first_once(e), e.card);
  }

  SeqSet first_of_production(const LinkedProduction& p) const {
    if (p.def.kind == ProductionKind::external) return symbol_set(external_symbol(p.def.name));
    auto alts = alternatives_of(g_, p);
    SeqSet out;
    if (alts.body) insert_all(out, first(*alts.body));
    for (const auto* s : alts.subrules) insert_all(out, first_of_ref(s->def.name));
    return out;
  }

  void compute_first() {
    auto& F = r_.table.first;
    for (const auto* p : active_) F[p->def.name];
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto* p : active_) {
        SeqSet s = first_of_production(*p);
        auto& cur = F[p->def.name];
        if (s != cur) {
          cur = std::move(s);
          changed = true;
        }
      }
    }
  }

  // ---- left recursion ----------------------------------------------------

  bool nullable(const BodyElement& e) const { return first(e).count(SymbolSeq{}) > 0; }

  // Nonterminals that can be reached from `e` without consuming input.
  void leading(const BodyElement& e, std::vector<std::string>& out) const {
    using K = BodyElement::Kind;
    switch (e.kind) {
      case K::sequence:
        for (const auto& c : e.items) {
          leading(c, out);
          if (!nullable(c)) break;
        }
        break;
      case K::alternative:
        for (const auto& c : e.items) leading(c, out);
        break;
      case K::block: leading(e.items.front(), out); break;
      case K::nonterminal:
        if (const auto* p = g_.find(e.target); p && p->def.kind != ProductionKind::external)
          out.push_back(e.target);
        break;
      default: break;
    }
  }

  bool check_left_recursion() {
    std::map<std::string, std::vector<std::string>> edges;
    for (const auto* p : active_) {
      if (p->def.kind == ProductionKind::external) continue;
      auto& out = edges[p->def.name];
      auto alts = alternatives_of(g_, *p);
      if (alts.body) leading(*alts.body, out);
      for (const auto* s : alts.subrules) out.push_back(s->def.name);
    }
    // Tarjan's strongly connected components.
    std::map<std::string, int> index, low;
    std::map<std::string, bool> onStack;
    std::vector<std::string> stack;
    int counter = 0;
    bool found = false;
    std::function<void(const std::string&)> strong = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      onStack[v] = true;
      for (const auto& w : edges[v]) {
        if (!index.count(w)) {
          strong(w);
          low[v] = std::min(low[v], low[w]);
        } else if (onStack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] != index[v]) return;
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        onStack[w] = false;
        comp.push_back(w);
      } while (w != v);
      bool selfLoop = std::find(edges[v].begin(), edges[v].end(), v) != edges[v].end();
      if (comp.size() < 2 && !selfLoop) return;
      std::reverse(comp.begin(), comp.end());
      std::sort(comp.begin(), comp.end(), [&](const std::string& a, const std::string& b) {
        return position(a) < position(b);
      });
      std::string cycle;
      for (const auto& c : comp) cycle += c + " -> ";
      cycle += comp.front();
      for (const auto& c : comp) {
        const auto* p = g_.find(c);
        r_.diags.error(p ? p->def.pos : SourcePos{},
                       "left recursion in production '" + c + "' (" + cycle + "); rewrite it with repetition");
      }
      found = true;
    };
    for (const auto* p : active_)
      if (!index.count(p->def.name)) strong(p->def.name);
    r_.leftRecursive = found;
    return found;
  }

  std::size_t position(const std::string& name) const {
    for (std::size_t i = 0; i < active_.size(); ++i)
      if (active_[i]->def.name == name) return i;
    return active_.size();
  }

  // ---- FOLLOW_k and decisions --------------------------------------------

  bool add_follow(const std::string& prod, const SeqSet& s) {
    auto& f = follow_[prod];
    std::size_t before = f.size();
    insert_all(f, s);
    return f.size() != before;
  }

  std::string describe(const BodyElement& e) const {
    std::string s = print_body(e);
    return s.size() > 40 ? s.substr(0, 37) + "..." : s;
  }

  void record(Decision d, const BodyElement* e) {
    if (e) {
      auto [it, fresh] = r_.table.byElement_.emplace(e, r_.table.decisions.size());
      if (!fresh) return;
    } else {
      auto [it, fresh] = r_.table.byProduction_.emplace(d.production, r_.table.decisions.size());
      if (!fresh) return;
    }
    r_.table.decisions.push_back(std::move(d));
  }

  // Walks `e` whose continuation lookahead is `cont`.
  bool walk(const BodyElement& e, const SeqSet& cont, const LinkedProduction& owner, bool emit) {
    using K = BodyElement::Kind;
    bool changed = false;
    switch (e.kind) {
      case K::sequence: {
        // Continuations from right to left.
        std::vector<SeqSet> conts(e.items.size());
        SeqSet acc = cont;
        for (std::size_t i = e.items.size(); i-- > 0;) {
          conts[i] = acc;
          acc = concat_k(first(e.items[i]), acc, k_);
        }
        for (std::size_t i = 0; i < e.items.size(); ++i) changed |= walk(e.items[i], conts[i], owner, emit);
        return changed;
      }
      case K::alternative: {
        if (emit) {
          Decision d;
          d.kind = Decision::Kind::alternative;
          d.production = owner.def.name;
          d.element = &e;
          d.pos = e.pos;
          for (const auto& c : e.items) {
            d.branches.push_back(describe(c));
            d.lookahead.push_back(concat_k(first(c), cont, k_));
          }
          record(std::move(d), &e);
        }
        for (const auto& c : e.items) changed |= walk(c, cont, owner, emit);
        return changed;
      }
      default: break;
    }

    // Leaf or block, possibly repeated.
    SeqSet inner_cont = cont;
    if (e.card == Cardinality::star || e.card == Cardinality::plus)
      inner_cont = concat_k(repeat(first_once(e), Cardinality::star), cont, k_);
    if (emit && e.card != Cardinality::one && e.kind != K::constants) {
      Decision d;
      d.kind = e.card == Cardinality::optional ? Decision::Kind::optional : Decision::Kind::loop;
      d.production = owner.def.name;
      d.element = &e;
      d.pos = e.pos;
      d.branches = {"enter " + describe(e), "skip " + describe(e)};
      d.lookahead.push_back(concat_k(first_once(e), inner_cont, k_));
      d.lookahead.push_back(cont);
      record(std::move(d), &e);
    }
    if (e.kind == K::block) return walk(e.items.front(), inner_cont, owner, emit);
    if (e.kind == K::nonterminal) {
      const auto* p = g_.find(e.target);
      if (p && p->def.kind != ProductionKind::external) return add_follow(e.target, inner_cont);
    }
    return false;
  }

  bool follow_pass(const LinkedProduction& p, bool emit) {
    if (p.def.kind == ProductionKind::external) return false;
    const SeqSet& fol = follow_[p.def.name];
    auto alts = alternatives_of(g_, p);
    bool changed = false;
    if (alts.body) changed |= walk(*alts.body, fol, p, emit);
    for (const auto* s : alts.subrules) changed |= add_follow(s->def.name, fol);
    if (emit) {
      Decision d;
      d.kind = Decision::Kind::production;
      d.production = p.def.name;
      d.pos = p.def.pos;
      if (alts.body) {
        d.branches.push_back(p.def.name);
        d.lookahead.push_back(concat_k(first(*alts.body), fol, k_));
      }
      for (const auto* s : alts.subrules) {
        d.branches.push_back(s->def.name);
        d.lookahead.push_back(concat_k(first_of_ref(s->def.name), fol, k_));
      }
      if (d.branches.empty())
        r_.diags.warning(p.def.pos, "production '" + p.def.name + "' has no alternatives");
      record(std::move(d), nullptr);
    }
    return changed;
  }

  void report_conflicts() {
    for (auto& d : r_.table.decisions) {
      for (std::size_t i = 0; i < d.lookahead.size() && !d.conflict; ++i)
        for (std::size_t j = i + 1; j < d.lookahead.size() && !d.conflict; ++j) {
          std::vector<SymbolSeq> common;
          std::set_intersection(d.lookahead[i].begin(), d.lookahead[i].end(), d.lookahead[j].begin(),
                                d.lookahead[j].end(), std::back_inserter(common));
          if (common.empty()) continue;
          d.conflict = true;
          d.witness = common.front();
          r_.diags.warning(d.pos, "LL(" + std::to_string(k_) + ") conflict in '" + d.production + "' between " +
                                      d.branches[i] + " and " + d.branches[j] + " on " + format_seq(d.witness) +
                                      "; resolved by backtracking, first succeeding branch wins");
        }
    }
  }

  const LinkedGrammar& g_;
  int k_;
  LlkResult& r_;
  std::vector<const LinkedProduction*> active_;
  std::map<std::string, SeqSet, std::less<>> follow_;
};

LlkResult analyze_llk(const LinkedGrammar& g, int k, const std::vector<std::string>& starts) {
  LlkResult r;
  if (k < 1) {
    r.diags.error(g.pos, "lookahead must be at least 1");
    return r;
  }
  LlkAnalyzer a(g, k, r);
  a.run(starts);
  return r;
}

}  // namespace lwb
