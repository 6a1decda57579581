#include "lwb/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>

#include "lwb/llk.hpp"

namespace lwb {

namespace {

Lexeme end_lexeme(std::size_t offset, SourcePos pos) {
  Lexeme lx;
  lx.kind = std::string(kEndOfInput);
  lx.offset = offset;
  lx.pos = std::move(pos);
  return lx;
}

constexpr std::string_view kErrorKind = "<error>";

// Token stream over either raw text (lazy, restartable at any character
// offset) or a pre-lexed list.
class Cursor {
 public:
  Cursor(const Scanner* sc, std::size_t offset) : sc_(sc), pos_(offset) {}
  explicit Cursor(const std::vector<Lexeme>* lexemes) : lexemes_(lexemes) {}

  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }
  bool textual() const { return sc_ != nullptr; }

  const Lexeme& peek(std::size_t ahead) {
    if (!sc_) {
      std::size_t i = pos_ + ahead;
      if (i < lexemes_->size()) return (*lexemes_)[i];
      if (!vecEnd_) {
        std::size_t off = lexemes_->empty() ? 0 : lexemes_->back().end();
        SourcePos p = lexemes_->empty() ? SourcePos{} : lexemes_->back().pos;
        vecEnd_ = end_lexeme(off, p);
      }
      return *vecEnd_;
    }
    std::size_t off = pos_;
    for (std::size_t i = 0;; ++i) {
      const Lexeme& lx = scan_at(off);
      if (i == ahead || lx.kind == kEndOfInput || lx.kind == kErrorKind) return lx;
      off = lx.end();
    }
  }

  void advance() {
    if (!sc_) {
      ++pos_;
      return;
    }
    pos_ = peek(0).end();
  }

  /// Offset just past the last consumed lexeme.
  std::size_t consumed_end() const {
    if (sc_) return pos_;
    return pos_ == 0 ? 0 : (*lexemes_)[pos_ - 1].end();
  }

  const Diagnostics* lex_error(std::size_t offset) const {
    auto it = lexErrors_.find(offset);
    return it == lexErrors_.end() ? nullptr : &it->second;
  }

 private:
  const Lexeme& scan_at(std::size_t off) {
    auto it = cache_.find(off);
    if (it != cache_.end()) return it->second;
    Diagnostics d;
    auto lx = sc_->scan(off, d);
    Lexeme out;
    if (lx) {
      out = std::move(*lx);
    } else {
      out.kind = std::string(kErrorKind);
      out.offset = off;
      while (out.offset < sc_->text().size() && std::isspace(static_cast<unsigned char>(sc_->text()[out.offset])))
        ++out.offset;
      out.pos = d.empty() ? sc_->position(out.offset) : d[0].pos;
      out.raw = out.offset < sc_->text().size() ? std::string(1, sc_->text()[out.offset]) : std::string();
      lexErrors_[out.offset] = std::move(d);
    }
    return cache_.emplace(off, std::move(out)).first->second;
  }

  const Scanner* sc_ = nullptr;
  const std::vector<Lexeme>* lexemes_ = nullptr;
  std::size_t pos_ = 0;
  std::optional<Lexeme> vecEnd_;
  std::unordered_map<std::size_t, Lexeme> cache_;
  std::map<std::size_t, Diagnostics> lexErrors_;
};

std::string display_symbol(const std::string& s) {
  if (s == kEndSymbol) return "end of input";
  return s;
}

// Shared by a host parser and the parsers of its embedded regions.
struct ParseContext {
  std::string_view text;
  std::string file;
  Ast* ast = nullptr;
  Diagnostics* diags = nullptr;
  std::map<const LanguageComponent*, std::unique_ptr<Scanner>> scanners;

  // Farthest failure.
  bool failed = false;
  std::size_t failOffset = 0;
  SourcePos failPos;
  std::string found;
  std::set<std::string> expected;
  std::string production;
  std::string message;
  const Diagnostics* lexError = nullptr;

  const Scanner& scanner_for(const LanguageComponent& c) {
    auto& s = scanners[&c];
    if (!s) s = std::make_unique<Scanner>(c.lexer, text, file);
    return *s;
  }

  void fail(const Lexeme& at, const std::string& prod, const std::set<std::string>& exp, const Diagnostics* lexErr,
            std::string msg = {}) {
    if (failed && at.offset < failOffset) return;
    if (!failed || at.offset > failOffset) {
      failed = true;
      failOffset = at.offset;
      failPos = at.pos;
      expected.clear();
      message.clear();
      lexError = nullptr;
      production = prod;
      found = at.kind == kEndOfInput ? std::string("end of input") : "'" + at.raw + "'";
    }
    expected.insert(exp.begin(), exp.end());
    if (lexErr && !lexErr->empty()) lexError = lexErr;
    if (!msg.empty() && message.empty()) message = std::move(msg);
  }

  void report() {
    if (!failed) {
      diags->error({file, 1, 1}, "parse failed");
      return;
    }
    if (lexError) {
      diags->append(*lexError);
      return;
    }
    if (!message.empty()) {
      diags->error(failPos, message);
      return;
    }
    std::string exp;
    for (const auto& e : expected) exp += (exp.empty() ? "" : ", ") + display_symbol(e);
    std::string msg = "unexpected " + found;
    if (!exp.empty()) msg += ", expected " + exp;
    if (!production.empty()) msg += " in " + production;
    diags->error(failPos, msg);
  }
};

class Parser {
 public:
  Parser(const LanguageComponent& c, Cursor& cur, ParseContext& ctx, bool embedded)
      : c_(c), cur_(cur), ctx_(ctx), embedded_(embedded) {}

  AstNode* run(const LinkedProduction& start, bool requireEnd) {
    AstNode* root = parse_production(start);
    if (root && requireEnd && cur_.peek(0).kind != kEndOfInput) {
      const Lexeme& lx = cur_.peek(0);
      ctx_.fail(lx, start.def.name, {std::string(kEndSymbol)}, cur_.lex_error(lx.offset));
      return nullptr;
    }
    return root;
  }

 private:
  struct Memo {
    AstNode* node;
    std::size_t end;
  };
  struct Snapshot {
    std::size_t pos;
    std::vector<Slot> slots;
  };

  Snapshot snapshot(const AstNode* node) const { return {cur_.pos(), node ? node->slots : std::vector<Slot>{}}; }
  void restore(AstNode* node, Snapshot& s) {
    cur_.reset(s.pos);
    if (node) node->slots = s.slots;
  }

  std::vector<Symbol> lookahead(std::size_t k) {
    std::vector<Symbol> out;
    for (std::size_t i = 0; i < k; ++i) {
      const Lexeme& lx = cur_.peek(i);
      out.push_back(lx.kind == kErrorKind ? std::string(kErrorKind) : symbol_of(lx));
      if (lx.kind == kEndOfInput || lx.kind == kErrorKind) break;
    }
    return out;
  }

  bool matches(const SymbolSeq& seq, const std::vector<Symbol>& la) const {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto& sym = seq[i];
      if (sym == kEndSymbol) return embedded_ || (i < la.size() && la[i] == kEndSymbol);
      if (is_external_symbol(sym)) return true;
      if (i >= la.size() || la[i] != sym) return false;
    }
    return true;
  }

  bool viable(const SeqSet& set, const std::vector<Symbol>& la) const {
    return std::any_of(set.begin(), set.end(), [&](const SymbolSeq& s) { return matches(s, la); });
  }

  // Records what would have been accepted. A sequence that agrees with the
  // input for a while reports at the lexeme where it stops agreeing.
  void expect(const std::vector<const SeqSet*>& sets, const std::vector<Symbol>& la) {
    std::map<std::size_t, std::set<std::string>> at;
    for (const auto* set : sets)
      for (const auto& seq : *set) {
        std::size_t i = 0;
        while (i < seq.size() && i < la.size() && seq[i] == la[i]) ++i;
        if (i < seq.size()) at[i].insert(seq[i]);
      }
    if (at.empty()) {
      fail_here({});
      return;
    }
    for (const auto& [i, exp] : at) {
      const Lexeme& lx = cur_.peek(i);
      ctx_.fail(lx, stack_.empty() ? std::string() : stack_.back(), exp, cur_.lex_error(lx.offset));
    }
  }

  void fail_here(const std::set<std::string>& exp, std::string msg = {}) {
    const Lexeme& lx = cur_.peek(0);
    ctx_.fail(lx, stack_.empty() ? std::string() : stack_.back(), exp, cur_.lex_error(lx.offset), std::move(msg));
  }

  AstNode* parse_production(const LinkedProduction& p) {
    auto key = std::make_pair(p.def.name, cur_.pos());
    if (auto it = memo_.find(key); it != memo_.end()) {
      if (it->second.node) cur_.reset(it->second.end);
      return it->second.node;
    }
    std::size_t start = cur_.pos();
    stack_.push_back(p.def.name);
    AstNode* result = parse_alternatives(p);
    stack_.pop_back();
    if (!result) cur_.reset(start);
    memo_[key] = {result, cur_.pos()};
    return result;
  }

  AstNode* parse_alternatives(const LinkedProduction& p) {
    auto alts = alternatives_of(c_.grammar, p);
    const Decision* d = c_.decisions.for_production(p.def.name);
    if (!d || d->lookahead.size() != alts.size()) {
      fail_here({}, "production '" + p.def.name + "' cannot be parsed (no decision data)");
      return nullptr;
    }
    auto la = lookahead(static_cast<std::size_t>(c_.k));
    std::vector<std::size_t> viableIdx;
    for (std::size_t i = 0; i < alts.size(); ++i)
      if (viable(d->lookahead[i], la)) viableIdx.push_back(i);
    if (viableIdx.empty()) {
      std::vector<const SeqSet*> sets;
      for (const auto& s : d->lookahead) sets.push_back(&s);
      expect(sets, la);
      return nullptr;
    }
    std::size_t start = cur_.pos();
    for (std::size_t i : viableIdx) {
      AstNode* n = nullptr;
      if (alts.body && i == 0) {
        n = parse_own_body(p, *alts.body);
      } else {
        n = parse_production(*alts.subrules[i - (alts.body ? 1 : 0)]);
      }
      if (n) return n;
      cur_.reset(start);
    }
    return nullptr;
  }

  AstNode* new_node(const std::string& type) {
    const Lexeme& first = cur_.peek(0);
    AstNode* n = ctx_.ast->create(type, first.pos);
    n->offset = first.offset;
    n->language = c_.language();
    init_slots(*n, c_.metamodel);
    return n;
  }

  AstNode* parse_own_body(const LinkedProduction& p, const BodyElement& body) {
    if (p.def.kind == ProductionKind::interface_ || p.def.kind == ProductionKind::abstract_) {
      // Such a body only names implementors; pass the child through.
      AstNode holder;
      if (!parse_element(body, &holder)) return nullptr;
      auto kids = holder.all_children();
      if (kids.size() != 1) {
        fail_here({}, "interface '" + p.def.name + "' must derive exactly one node");
        return nullptr;
      }
      return kids.front();
    }
    AstNode* n = new_node(p.typeName);
    return parse_element(body, n) ? n : nullptr;
  }

  bool parse_element(const BodyElement& e, AstNode* node) {
    switch (e.card) {
      case Cardinality::one: return parse_once(e, node);
      case Cardinality::optional: {
        const Decision* d = c_.decisions.at(&e);
        auto la = lookahead(static_cast<std::size_t>(c_.k));
        bool enter = !d || viable(d->lookahead[0], la);
        bool exit = d && viable(d->lookahead[1], la);
        if (!enter) {
          expect({&d->lookahead[0]}, la);
          return true;
        }
        if (!exit) return parse_once(e, node);
        Snapshot s = snapshot(node);
        if (parse_once(e, node)) return true;
        restore(node, s);
        return true;
      }
      case Cardinality::plus:
        if (!parse_once(e, node)) return false;
        [[fallthrough]];
      case Cardinality::star: {
        const Decision* d = c_.decisions.at(&e);
        for (;;) {
          auto la = lookahead(static_cast<std::size_t>(c_.k));
          bool enter = !d || viable(d->lookahead[0], la);
          bool exit = d && viable(d->lookahead[1], la);
          if (!enter) {
            if (d) expect({&d->lookahead[0]}, la);
            break;
          }
          std::size_t before = cur_.pos();
          if (!exit) {
            if (!parse_once(e, node)) return false;
          } else {
            Snapshot s = snapshot(node);
            if (!parse_once(e, node)) {
              restore(node, s);
              break;
            }
          }
          if (cur_.pos() == before) break;
        }
        return true;
      }
    }
    return false;
  }

  void store(AstNode* node, const std::string& name, Value v) {
    Slot& s = node->ensure_slot(name, false, false);
    if (s.list)
      s.values.push_back(std::move(v));
    else
      s.values.assign(1, std::move(v));
  }

  bool parse_once(const BodyElement& e, AstNode* node) {
    using K = BodyElement::Kind;
    switch (e.kind) {
      case K::sequence:
        for (const auto& c : e.items)
          if (!parse_element(c, node)) return false;
        return true;
      case K::block: return parse_element(e.items.front(), node);
      case K::alternative: {
        const Decision* d = c_.decisions.at(&e);
        auto la = lookahead(static_cast<std::size_t>(c_.k));
        std::vector<std::size_t> viableIdx;
        for (std::size_t i = 0; i < e.items.size(); ++i)
          if (!d || viable(d->lookahead[i], la)) viableIdx.push_back(i);
        if (viableIdx.empty()) {
          std::vector<const SeqSet*> sets;
          for (const auto& s : d->lookahead) sets.push_back(&s);
          expect(sets, la);
          return false;
        }
        if (viableIdx.size() == 1) return parse_element(e.items[viableIdx.front()], node);
        Snapshot s = snapshot(node);
        for (std::size_t i : viableIdx) {
          if (parse_element(e.items[i], node)) return true;
          restore(node, s);
        }
        return false;
      }
      case K::terminal: {
        const Lexeme& lx = cur_.peek(0);
        if (!lx.terminal || lx.raw != e.target) {
          fail_here({terminal_symbol(e.target)});
          return false;
        }
        if (!e.label.empty()) store(node, e.label, e.target);
        cur_.advance();
        return true;
      }
      case K::token: {
        const Lexeme& lx = cur_.peek(0);
        if (lx.terminal || lx.kind != e.target) {
          fail_here({e.target});
          return false;
        }
        store(node, attribute_name(e), lx.value);
        cur_.advance();
        return true;
      }
      case K::constants: {
        const Lexeme& lx = cur_.peek(0);
        if (!lx.terminal || std::find(e.constants.begin(), e.constants.end(), lx.raw) == e.constants.end()) {
          std::set<std::string> exp;
          for (const auto& c : e.constants) exp.insert(terminal_symbol(c));
          fail_here(exp);
          return false;
        }
        std::string name = attribute_name(e);
        auto a = c_.metamodel.find_attribute(node->type, name);
        bool flag = a ? a->kind == AttrDef::Kind::boolean_constant : e.constants.size() == 1;
        if (flag)
          store(node, name, true);
        else
          store(node, name, lx.raw);
        cur_.advance();
        return true;
      }
      case K::nonterminal: {
        const LinkedProduction* p = c_.grammar.find(e.target);
        if (!p) {
          fail_here({}, "unknown production '" + e.target + "'");
          return false;
        }
        AstNode* child = p->def.kind == ProductionKind::external ? embed(*p, node) : parse_production(*p);
        if (!child) return false;
        std::string name = attribute_name(e);
        const Slot* s = node->slot(name);
        node->add_child(name, child, s ? s->list : false);
        return true;
      }
    }
    return false;
  }

  AstNode* embed(const LinkedProduction& ext, AstNode* node) {
    auto it = c_.embeddings.find(ext.def.name);
    if (it == c_.embeddings.end()) {
      fail_here({external_symbol(ext.def.name)}, "external nonterminal '" + ext.def.name + "' is not bound");
      return nullptr;
    }
    if (!cur_.textual()) {
      fail_here({}, "embedded languages need character input ('" + ext.def.name + "')");
      return nullptr;
    }
    const EmbeddingBinding& b = it->second;
    std::size_t offset = cur_.pos();
    auto idx = select(b, node, offset);
    if (!idx) return nullptr;
    const EmbeddingCandidate& cand = b.candidates[*idx];
    const LinkedProduction* start = cand.component->grammar.find(cand.start);
    if (!start) {
      fail_here({}, "embedded start rule '" + cand.start + "' not found");
      return nullptr;
    }
    Cursor sub(&ctx_.scanner_for(*cand.component), offset);
    Parser nested(*cand.component, sub, ctx_, true);
    AstNode* child = nested.run(*start, false);
    if (!child) return nullptr;
    cur_.reset(sub.consumed_end());
    return child;
  }

  std::optional<std::size_t> select(const EmbeddingBinding& b, const AstNode* node, std::size_t offset) {
    const SelectionRule& r = b.selection;
    switch (r.kind) {
      case SelectionRule::Kind::fixed: return 0;
      case SelectionRule::Kind::by_attribute: {
        Value v = node->get(r.attribute);
        std::string key = to_display(v);
        if (auto it = r.cases.find(key); it != r.cases.end()) return it->second;
        if (r.otherwise) return *r.otherwise;
        fail_here({}, "no embedded language for '" + b.externalNT + "' when " + r.attribute + " = '" + key + "'");
        return std::nullopt;
      }
      case SelectionRule::Kind::by_first_token: {
        for (std::size_t i = 0; i < b.candidates.size(); ++i) {
          Diagnostics ignored;
          auto lx = ctx_.scanner_for(*b.candidates[i].component).scan(offset, ignored);
          if (!lx) continue;
          for (const std::string& key : {lx->kind, lx->raw})
            if (auto it = r.cases.find(key); it != r.cases.end() && it->second == i) return i;
        }
        if (r.otherwise) return *r.otherwise;
        fail_here({}, "no embedded language for '" + b.externalNT + "' starts here");
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  const LanguageComponent& c_;
  Cursor& cur_;
  ParseContext& ctx_;
  bool embedded_;
  std::vector<std::string> stack_;
  std::map<std::pair<std::string, std::size_t>, Memo> memo_;
};

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::size_t skip_layout(std::string_view t, std::size_t i) {
  for (;;) {
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    if (t.substr(i, 2) == "//") {
      while (i < t.size() && t[i] != '\n') ++i;
    } else if (t.substr(i, 2) == "/*") {
      auto e = t.find("*/", i + 2);
      if (e == std::string_view::npos) return t.size();
      i = e + 2;
    } else {
      return i;
    }
  }
}

// `keyword qualified.name ;` at `i`; advances `i` past it on success.
std::optional<std::string> header_line(std::string_view t, std::size_t& i, std::string_view keyword,
                                       Diagnostics& d, const Scanner& sc) {
  std::size_t j = skip_layout(t, i);
  if (t.substr(j, keyword.size()) != keyword || (j + keyword.size() < t.size() && is_ident_char(t[j + keyword.size()])))
    return std::nullopt;
  j = skip_layout(t, j + keyword.size());
  std::size_t s = j;
  while (j < t.size() && (is_ident_char(t[j]) || t[j] == '.')) ++j;
  std::string name(t.substr(s, j - s));
  j = skip_layout(t, j);
  if (name.empty() || j >= t.size() || t[j] != ';') {
    d.error(sc.position(j), "malformed " + std::string(keyword) + " declaration");
    i = j;
    return std::string();
  }
  i = j + 1;
  return name;
}

}  // namespace

ParseResult parse_text(const LanguageComponent& c, std::string_view text, const std::string& file,
                       const ParseOptions& options) {
  ParseResult r;
  std::string startName = options.start.empty() ? c.default_start() : options.start;
  const LinkedProduction* start = c.grammar.find(startName);
  if (!start) {
    r.diags.error({file, 1, 1}, "unknown start production '" + startName + "'");
    return r;
  }
  for (const auto& ext : c.reachable_externals())
    if (!c.embeddings.count(ext)) {
      const auto* p = c.grammar.find(ext);
      r.diags.error(p ? p->def.pos : SourcePos{file, 1, 1},
                    "external nonterminal '" + ext + "' must be bound before parsing");
    }
  if (r.diags.has_errors()) return r;

  ParseContext ctx;
  ctx.text = text;
  ctx.file = file;
  ctx.ast = &r.ast;
  ctx.diags = &r.diags;
  const Scanner& sc = ctx.scanner_for(c);

  std::size_t offset = options.offset;
  if (options.compileUnitHeader && !c.grammar.options.compileUnitStart.empty() &&
      c.grammar.options.compileUnitStart == startName) {
    std::size_t before = offset;
    if (auto pkg = header_line(text, offset, "package", r.diags, sc)) {
      r.package = *pkg;
      r.packagePos = sc.position(skip_layout(text, before));
    }
    for (;;) {
      std::size_t at = skip_layout(text, offset);
      auto imp = header_line(text, offset, "import", r.diags, sc);
      if (!imp) break;
      r.imports.push_back({*imp, sc.position(at)});
    }
    if (r.diags.has_errors()) return r;
  }

  Cursor cur(&sc, offset);
  Parser p(c, cur, ctx, false);
  AstNode* root = p.run(*start, options.requireEnd);
  if (!root) {
    ctx.report();
    return r;
  }
  r.endOffset = cur.consumed_end();
  r.ast.set_root(root);
  r.ast.finalize();
  return r;
}

ParseResult parse(const LanguageComponent& c, const std::vector<Lexeme>& lexemes, std::string_view start) {
  ParseResult r;
  std::string startName = start.empty() ? c.default_start() : std::string(start);
  const LinkedProduction* sp = c.grammar.find(startName);
  if (!sp) {
    r.diags.error({}, "unknown start production '" + startName + "'");
    return r;
  }
  ParseContext ctx;
  ctx.ast = &r.ast;
  ctx.diags = &r.diags;
  if (!lexemes.empty()) ctx.file = lexemes.front().pos.file;
  Cursor cur(&lexemes);
  Parser p(c, cur, ctx, false);
  AstNode* root = p.run(*sp, true);
  if (!root) {
    ctx.report();
    return r;
  }
  r.endOffset = cur.consumed_end();
  r.ast.set_root(root);
  r.ast.finalize();
  return r;
}

}  // namespace lwb
