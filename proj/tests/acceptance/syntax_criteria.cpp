#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "harness.hpp"
#include "lwb/llk.hpp"
#include "lwb/metamodel.hpp"
#include "lwb/parser.hpp"
#include "sentences.hpp"

namespace lwb::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string golden(const std::string& name) {
  return test::read_text(std::filesystem::path(LWB_ACCEPTANCE_DIR) / "golden" / name);
}

std::vector<std::string> attr_names(const std::vector<AttrDef>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(a.name);
  return out;
}

}  // namespace

// 1
Outcome shop_metamodel() {
  auto t0 = Clock::now();
  Check c;
  auto g = load_grammar_file(test::sample_path("grammars/ShopSystem.mcg"));
  if (!c.expect(g.ok(), "ShopSystem.mcg does not load")) return c.outcome("");
  auto m = derive_metamodel(link_single(*g));
  if (!c.expect(m.ok(), "metamodel derivation failed")) return c.outcome("");
  auto actual = nlohmann::json::parse(emit_metamodel_report(*m, ReportFormat::json));
  auto expected = nlohmann::json::parse(golden("shop_metamodel.json"));
  c.expect(actual["types"].size() == 6, "expected 6 types, got " + std::to_string(actual["types"].size()));
  c.expect(actual == expected, "metamodel JSON differs from golden:\n" + nlohmann::json::diff(expected, actual).dump());
  double s = seconds_since(t0);
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
  return c.outcome("6 types equal to golden, " + std::to_string(static_cast<int>(s * 1000)) + " ms");
}

// 2
Outcome inheritance_features() {
  auto t0 = Clock::now();
  Check c;
  auto g = load_grammar_file(test::sample_path("grammars/ShopSystem2.mcg"));
  if (!c.expect(g.ok(), "ShopSystem2.mcg does not load")) return c.outcome("");
  LinkedGrammar lg = link_single(*g);
  auto m = derive_metamodel(lg);
  if (!c.expect(m.ok(), "metamodel derivation failed")) return c.outcome("");
  const NodeTypeDef* pc = m->find_node("PremiumClient");
  c.expect(pc && pc->superType == "Client", "PremiumClient does not extend Client");
  c.expect(pc && attr_names(pc->attributes) == std::vector<std::string>{"Discount"},
           "PremiumClient must carry only Discount");
  auto all = m->all_attributes("PremiumClient");
  c.expect(attr_names(all) == std::vector<std::string>{"Name", "address", "Discount"},
           "PremiumClient inherited attributes wrong");
  const InterfaceDef* order = m->find_interface("Order");
  c.expect(order && attr_names(order->declaredAttributes) == std::vector<std::string>{"ClientName"},
           "Order interface must declare ClientName");
  for (const char* o : {"OrderCreditcard", "OrderCash"}) {
    const NodeTypeDef* t = m->find_node(o);
    c.expect(t && t->implementedInterfaces == std::vector<std::string>{"Order"},
             std::string(o) + " does not implement Order");
  }
  c.expect(m->nodeTypes.size() == 6 && m->interfaces.size() == 1, "expected 6 classes and 1 interface");
  std::string ebnf = emit_ebnf(lg);
  c.expect(squash(ebnf) == squash(golden("shop_inheritance.ebnf")), "EBNF differs from golden:\n" + ebnf);
  double s = seconds_since(t0);
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
  return c.outcome("metamodel and EBNF as expected, " + std::to_string(static_cast<int>(s * 1000)) + " ms");
}

// ---- 3: occurrence analysis against derivation enumeration ----

namespace {

struct BodyGen {
  std::mt19937 rng;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Cardinality card() {
    int r = pick(10);
    return r < 5 ? Cardinality::one : r < 7 ? Cardinality::optional : r < 9 ? Cardinality::star : Cardinality::plus;
  }

  BodyElement leaf() {
    BodyElement e;
    int r = pick(10);
    if (r < 6) {
      e.kind = BodyElement::Kind::nonterminal;
      e.target = std::string(1, "ABC"[pick(3)]);
      if (pick(3) == 0) e.label = std::string(1, "xy"[pick(2)]);
    } else if (r < 8) {
      e.kind = BodyElement::Kind::token;
      e.target = "IDENT";
      e.label = std::string(1, "xy"[pick(2)]);
    } else {
      e.kind = BodyElement::Kind::terminal;
      e.target = "k";
    }
    e.card = card();
    return e;
  }

  BodyElement gen(int depth) {
    if (depth >= 4 || pick(3) == 0) return leaf();
    BodyElement e;
    int r = pick(3);
    e.kind = r == 0 ? BodyElement::Kind::sequence : r == 1 ? BodyElement::Kind::alternative : BodyElement::Kind::block;
    int n = e.kind == BodyElement::Kind::block ? 1 : 2 + pick(2);
    for (int i = 0; i < n; ++i) e.items.push_back(gen(depth + 1));
    if (e.kind == BodyElement::Kind::block) e.card = card();
    return e;
  }
};

using Derivation = std::vector<const BodyElement*>;
using Derivations = std::set<Derivation>;

constexpr std::size_t kEnumerationLimit = 20000;

Derivations concat(const Derivations& a, const Derivations& b, bool& overflow) {
  Derivations out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Derivation d = x;
      d.insert(d.end(), y.begin(), y.end());
      out.insert(std::move(d));
      if (out.size() > kEnumerationLimit) {
        overflow = true;
        return out;
      }
    }
  return out;
}

// Every leaf sequence the body derives, with repetitions cut at two.
Derivations enumerate(const BodyElement& e, bool& overflow) {
  using K = BodyElement::Kind;
  Derivations one;
  switch (e.kind) {
    case K::sequence: {
      one = {{}};
      for (const auto& i : e.items) {
        one = concat(one, enumerate(i, overflow), overflow);
        if (overflow) return one;
      }
      break;
    }
    case K::alternative:
      for (const auto& i : e.items) {
        auto d = enumerate(i, overflow);
        one.insert(d.begin(), d.end());
      }
      break;
    case K::block: one = enumerate(e.items.front(), overflow); break;
    default: one = {{&e}}; break;
  }
  Derivations out;
  Derivations twice = concat(one, one, overflow);
  switch (e.card) {
    case Cardinality::one: return one;
    case Cardinality::optional:
      out = one;
      out.insert(Derivation{});
      return out;
    case Cardinality::star:
      out = one;
      out.insert(Derivation{});
      out.insert(twice.begin(), twice.end());
      return out;
    case Cardinality::plus:
      out = one;
      out.insert(twice.begin(), twice.end());
      return out;
  }
  return out;
}

}  // namespace

Outcome occurrence_oracle() {
  Check c;
  BodyGen gen{std::mt19937(20240611)};
  int bodies = 0;
  int comparisons = 0;
  while (bodies < 200) {
    BodyElement body;
    body.kind = BodyElement::Kind::sequence;
    body.items.push_back(gen.gen(1));
    body.items.push_back(gen.gen(1));
    bool overflow = false;
    Derivations ds = enumerate(body, overflow);
    if (overflow) continue;
    ++bodies;
    std::set<std::pair<std::string, std::string>> keys;
    std::function<void(const BodyElement&)> collect = [&](const BodyElement& e) {
      if (e.is_reference()) keys.insert({e.label, e.target});
      for (const auto& i : e.items) collect(i);
    };
    collect(body);
    for (const auto& [label, target] : keys) {
      int lo = INT32_MAX;
      int hi = 0;
      for (const auto& d : ds) {
        int n = static_cast<int>(std::count_if(d.begin(), d.end(), [&](const BodyElement* l) {
          return l->is_reference() && l->label == label && l->target == target;
        }));
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      Occurrence o = occurrence_analysis(body, label, target);
      ++comparisons;
      c.expect(o.min == lo && o.many() == (hi >= 2),
               print_body(body) + " / " + label + ":" + target + ": analysis {" + std::to_string(o.min) + "," +
                   std::to_string(o.max) + "} vs enumeration min " + std::to_string(lo) + " max " + std::to_string(hi));
    }
  }
  return c.outcome("200 bodies, " + std::to_string(comparisons) + " (label, target) pairs agree");
}

// ---- 4: FIRST_k against prefix enumeration ----

namespace {

struct RItem {
  std::string sym;  // terminal text or production name
  bool terminal = true;
  Cardinality card = Cardinality::one;
};
using RAlt = std::vector<RItem>;

struct RGrammar {
  std::vector<std::string> names;
  std::vector<std::vector<RAlt>> alts;

  std::string text() const {
    std::string s = "grammar R {\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      s += "  " + names[i] + " =";
      for (std::size_t a = 0; a < alts[i].size(); ++a) {
        if (a) s += " |";
        for (const auto& it : alts[i][a]) {
          std::string sym = it.terminal ? "\"" + it.sym + "\"" : it.sym;
          s += " " + (it.card == Cardinality::one ? sym : "(" + sym + ")" + cardinality_suffix(it.card));
        }
      }
      s += ";\n";
    }
    return s + "}\n";
  }

  std::size_t index(const std::string& n) const {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin());
  }
};

RGrammar random_grammar(std::mt19937& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  RGrammar g;
  int n = 3 + pick(18);
  for (int i = 0; i < n; ++i) g.names.push_back("Nt" + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    int na = 1 + pick(3);
    std::vector<RAlt> alts;
    for (int a = 0; a < na; ++a) {
      RAlt alt;
      int len = pick(4) + (a == 0 ? 1 : 0);
      for (int j = 0; j < len; ++j) {
        RItem it;
        // only later productions keep the grammar free of left recursion
        if (i + 1 < n && pick(5) < 2) {
          it.terminal = false;
          it.sym = g.names[i + 1 + pick(n - i - 1)];
        } else {
          it.sym = std::string(1, "abcd"[pick(4)]);
        }
        int r = pick(8);
        it.card = r < 5 ? Cardinality::one : r == 5 ? Cardinality::optional : r == 6 ? Cardinality::star : Cardinality::plus;
        alt.push_back(it);
      }
      if (alt.empty() && a > 0) alt.push_back({"e", true, Cardinality::one});
      alts.push_back(alt);
    }
    // occasionally reach back to an earlier production after a terminal
    if (i > 0 && pick(3) == 0) alts.push_back({{"c", true, Cardinality::one}, {g.names[pick(i)], false, Cardinality::one}});
    g.alts.push_back(alts);
  }
  return g;
}

// Stack entries: 't'+text, 'n'+name, 's'+index into `stars` (a pending Kleene loop).
SeqSet enumerate_first(const RGrammar& g, const std::string& start, int k) {
  std::vector<RItem> stars;
  std::map<std::string, std::size_t> starIds;
  auto star_id = [&](const RItem& it) {
    std::string key = std::string(it.terminal ? "t" : "n") + it.sym;
    auto [pos, fresh] = starIds.emplace(key, stars.size());
    if (fresh) stars.push_back(it);
    return "s" + std::to_string(pos->second);
  };
  using State = std::pair<SymbolSeq, std::vector<std::string>>;  // prefix, stack (top at back)
  SeqSet result;
  std::set<State> seen;
  std::vector<State> work{{{}, {"n" + start}}};
  while (!work.empty()) {
    State st = work.back();
    work.pop_back();
    if (!seen.insert(st).second) continue;
    auto& [prefix, stack] = st;
    if (static_cast<int>(prefix.size()) >= k || stack.empty()) {
      result.insert(prefix);
      continue;
    }
    std::string top = stack.back();
    stack.pop_back();
    auto push_item = [&](std::vector<std::string>& s, const RItem& it) {
      std::string sym = std::string(it.terminal ? "t" : "n") + it.sym;
      switch (it.card) {
        case Cardinality::one: s.push_back(sym); break;
        case Cardinality::optional: break;  // handled by caller
        case Cardinality::star: break;
        case Cardinality::plus:
          s.push_back(star_id(it));
          s.push_back(sym);
          break;
      }
    };
    auto expand_alt = [&](const RAlt& alt, std::size_t at, std::vector<std::string> base, const auto& self) -> void {
      // alternatives are pushed right to left so the first item ends on top
      if (at == alt.size()) {
        work.push_back({prefix, base});
        return;
      }
      std::size_t idx = alt.size() - 1 - at;
      const RItem& it = alt[idx];
      std::string sym = std::string(it.terminal ? "t" : "n") + it.sym;
      if (it.card == Cardinality::optional) {
        self(alt, at + 1, base, self);
        base.push_back(sym);
        self(alt, at + 1, base, self);
      } else if (it.card == Cardinality::star) {
        base.push_back(star_id(it));
        self(alt, at + 1, base, self);
      } else {
        push_item(base, it);
        self(alt, at + 1, base, self);
      }
    };
    if (top[0] == 't') {
      SymbolSeq p = prefix;
      p.push_back(terminal_symbol(top.substr(1)));
      work.push_back({p, stack});
    } else if (top[0] == 'n') {
      for (const auto& alt : g.alts[g.index(top.substr(1))]) expand_alt(alt, 0, stack, expand_alt);
    } else {
      const RItem& it = stars[std::stoul(top.substr(1))];
      work.push_back({prefix, stack});  // loop exit
      auto s = stack;
      s.push_back(top);
      s.push_back(std::string(it.terminal ? "t" : "n") + it.sym);
      work.push_back({prefix, s});
    }
  }
  return result;
}

void inject_left_recursion(RGrammar& g, std::mt19937& rng, bool direct) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  std::size_t p = static_cast<std::size_t>(pick(static_cast<int>(g.names.size())));
  if (direct) {
    g.alts[p].push_back({{g.names[p], false, Cardinality::one}, {"z", true, Cardinality::one}});
    return;
  }
  std::size_t q = (p + 1 + static_cast<std::size_t>(pick(static_cast<int>(g.names.size()) - 1))) % g.names.size();
  // P -> Q? ... and Q -> P ...: the optional prefix hides the cycle one level
  g.alts[p].push_back({{"y", true, Cardinality::optional}, {g.names[q], false, Cardinality::one}});
  g.alts[q].push_back({{g.names[p], false, Cardinality::one}, {"z", true, Cardinality::one}});
}

}  // namespace

Outcome first_k_oracle() {
  Check c;
  std::mt19937 rng(7);
  int compared = 0;
  int detected = 0;
  for (int i = 0; i < 50; ++i) {
    RGrammar rg = random_grammar(rng);
    auto parsed = parse_grammar(rg.text(), "random.mcg");
    if (!c.expect(parsed.ok(), "random grammar does not parse:\n" + rg.text())) continue;
    LinkedGrammar lg = link_single(*parsed);
    for (int k = 1; k <= 3; ++k) {
      LlkResult r = analyze_llk(lg, k);
      c.expect(!r.leftRecursive, "false left recursion report:\n" + rg.text());
      for (const auto& name : rg.names) {
        SeqSet expected = enumerate_first(rg, name, k);
        auto it = r.table.first.find(name);
        bool same = it != r.table.first.end() && it->second == expected;
        ++compared;
        c.expect(same, "FIRST_" + std::to_string(k) + "(" + name + ") differs in\n" + rg.text());
      }
    }
    RGrammar bad = rg;
    inject_left_recursion(bad, rng, i % 2 == 0);
    auto badParsed = parse_grammar(bad.text(), "lr.mcg");
    if (!c.expect(badParsed.ok(), "injected grammar does not parse")) continue;
    LinkedGrammar blg = link_single(*badParsed);
    bool flagged = analyze_llk(blg, 1 + i % 3).leftRecursive;
    detected += flagged;
    c.expect(flagged, "injected left recursion not detected:\n" + bad.text());
  }
  return c.outcome("50 grammars, " + std::to_string(compared) + " FIRST_k sets equal, " + std::to_string(detected) +
                   "/50 left recursions detected");
}

// 5
Outcome parse_round_trip() {
  Check c;
  int done = 0;
  for (const char* file : {"ShopSystem.mcg", "ShopSystem2.mcg"}) {
    auto g = load_grammar_file(test::sample_path(std::string("grammars/") + file));
    if (!c.expect(g.ok(), std::string(file) + " does not load")) continue;
    auto comp = test::component_from_sample(file);
    auto terms = comp->grammar.terminals();
    SentenceGenerator gen({&*g}, {terms.begin(), terms.end()}, 99);
    for (int i = 0; i < 250; ++i) {
      std::string s = gen.sentence("ShopSystem");
      auto first = parse_text(*comp, s, "gen");
      if (!c.expect(first.ok(), std::string(file) + ": generated sentence rejected: " + s +
                                    (first.diags.empty() ? "" : " (" + first.diags[0].format() + ")")))
        continue;
      auto printed = pretty_print(*first.root(), *comp);
      if (!c.expect(printed.ok(), std::string(file) + ": cannot print tree of: " + s)) continue;
      auto second = parse_text(*comp, *printed, "printed");
      if (!c.expect(second.ok(), std::string(file) + ": printed text rejected: " + *printed)) continue;
      c.expect(structurally_equal(*first.root(), *second.root()), std::string(file) + ": trees differ for: " + s);
      auto conf = check_conformance(*first.root(), comp->metamodel);
      c.expect(!conf.has_errors(), std::string(file) + ": tree does not conform: " + (conf.has_errors() ? conf[0].message : ""));
      ++done;
    }
  }
  return c.outcome(std::to_string(done) + " sentences round-trip and conform");
}

// 7
Outcome inheritance_conservativity() {
  Check c;
  Composition comp = test::composition_from_sample("exprquery.json");
  auto super = comp.find("expr");
  auto sub = comp.find("exprquery");
  const GrammarDef& exprDef = comp.grammars.at("mc.expr.Expr");
  auto terms = sub->grammar.terminals();
  SentenceGenerator gen({&exprDef}, {terms.begin(), terms.end()}, 4242, 5);
  const Metamodel& sm = sub->metamodel;
  int widened = 0;
  auto typeEq = [&](const std::string& subType, const std::string& superType) {
    if (subType != superType) ++widened;
    return sm.is_subtype(subType, superType) && super->metamodel.has_type(superType);
  };
  for (int i = 0; i < 200; ++i) {
    std::string s = gen.sentence("Program");
    auto a = parse_text(*super, s, "super");
    if (!c.expect(a.ok(), "supergrammar rejects its own sentence: " + s)) continue;
    auto b = parse_text(*sub, s, "sub");
    if (!c.expect(b.ok(), "subgrammar rejects: " + s + (b.diags.empty() ? "" : " (" + b.diags[0].format() + ")")))
      continue;
    c.expect(structurally_equal(*b.root(), *a.root(), typeEq), "trees differ beyond widening: " + s);
  }
  return c.outcome("200 supergrammar sentences parse under the subgrammar with equal trees");
}

}  // namespace lwb::acceptance
