// Hand-written reader for the `.mcg` grammar format.

#include <cctype>
#include <stdexcept>

#include "lwb/grammar.hpp"

namespace lwb {

namespace {

struct GTok {
  enum class Kind { ident, string, character, number, punct, eof } kind = Kind::eof;
  std::string text;
  SourcePos pos;
};

struct SyntaxError : std::runtime_error {
  SourcePos pos;
  SyntaxError(SourcePos p, const std::string& msg) : std::runtime_error(msg), pos(std::move(p)) {}
};

class GrammarLexer {
 public:
  GrammarLexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<GTok> run() {
    std::vector<GTok> out;
    for (;;) {
      skip_trivia();
      GTok t;
      t.pos = here();
      if (i_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = GTok::Kind::ident;
        while (i_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
          t.text += take();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = GTok::Kind::number;
        while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) t.text += take();
      } else if (c == '"' || c == '\'') {
        t.kind = c == '"' ? GTok::Kind::string : GTok::Kind::character;
        t.text = quoted(c);
      } else {
        t.kind = GTok::Kind::punct;
        static const char* multi[] = {"<->", "->", ".."};
        bool matched = false;
        for (const char* m : multi) {
          std::string_view mv(m);
          if (text_.substr(i_, mv.size()) == mv) {
            for (std::size_t k = 0; k < mv.size(); ++k) take();
            t.text = std::string(mv);
            matched = true;
            break;
          }
        }
        if (!matched) {
          static const std::string single = "=;:|()?*+{},./[]~<>-";
          if (single.find(c) == std::string::npos)
            throw SyntaxError(t.pos, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, take());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourcePos here() const { return {file_, line_, col_}; }

  char take() {
    char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (text_.substr(i_, 2) == "//") {
        while (i_ < text_.size() && text_[i_] != '\n') take();
      } else if (text_.substr(i_, 2) == "/*") {
        SourcePos start = here();
        take();
        take();
        while (i_ < text_.size() && text_.substr(i_, 2) != "*/") take();
        if (i_ >= text_.size()) throw SyntaxError(start, "unterminated block comment");
        take();
        take();
      } else {
        break;
      }
    }
  }

  std::string quoted(char q) {
    SourcePos start = here();
    take();
    std::string s;
    while (i_ < text_.size() && text_[i_] != q) {
      char c = take();
      if (c == '\n') throw SyntaxError(start, "unterminated literal");
      if (c == '\\') {
        if (i_ >= text_.size()) break;
        char e = take();
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case 'r': s += '\r'; break;
          default: s += e;
        }
      } else {
        s += c;
      }
    }
    if (i_ >= text_.size()) throw SyntaxError(start, "unterminated literal");
    take();
    return s;
  }

  std::string_view text_;
  std::string file_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class GrammarParser {
 public:
  explicit GrammarParser(std::vector<GTok> toks) : toks_(std::move(toks)) {}

  GrammarDef grammar() {
    GrammarDef g;
    g.pos = peek().pos;
    if (is_word("package")) {
      next();
      g.package = qualified_name();
      expect(";");
    }
    expect_word("grammar");
    g.name = ident("grammar name");
    if (is_word("extends")) {
      next();
      g.supers.push_back(qualified_name());
      while (accept(",")) g.supers.push_back(qualified_name());
    }
    expect("{");
    while (!is_punct("}")) {
      if (peek().kind == GTok::Kind::eof) throw SyntaxError(peek().pos, "missing '}' at end of grammar");
      member(g);
    }
    expect("}");
    if (peek().kind != GTok::Kind::eof) throw SyntaxError(peek().pos, "unexpected input after grammar");
    for (auto& a : g.attributeDecls) a.owningGrammar = g.qualified_name();
    return g;
  }

 private:
  const GTok& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const GTok& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == GTok::Kind::punct && peek(ahead).text == p;
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == GTok::Kind::ident && peek(ahead).text == w;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const GTok& t = peek();
    std::string found = t.kind == GTok::Kind::eof ? "end of file" : "'" + t.text + "'";
    throw SyntaxError(t.pos, "expected " + what + ", found " + found);
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("'" + std::string(p) + "'");
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("'" + std::string(w) + "'");
    next();
  }
  std::string ident(const std::string& what) {
    if (peek().kind != GTok::Kind::ident) fail(what);
    return next().text;
  }
  std::string qualified_name() {
    std::string n = ident("name");
    while (is_punct(".") && peek(1).kind == GTok::Kind::ident) {
      next();
      n += "." + next().text;
    }
    return n;
  }
  std::vector<std::string> name_list() {
    std::vector<std::string> out{qualified_name()};
    while (accept(",")) out.push_back(qualified_name());
    return out;
  }

  void member(GrammarDef& g) {
    const GTok& t = peek();
    if (t.kind != GTok::Kind::ident) fail("grammar member");
    if (t.text == "options" && is_punct("{", 1)) return options(g);
    if (t.text == "token" && peek(1).kind == GTok::Kind::ident) return token(g);
    if (t.text == "association" && peek(1).kind == GTok::Kind::ident) return association(g);
    if ((t.text == "syn" || t.text == "inh") && peek(1).kind == GTok::Kind::ident) return attribute(g);
    if (t.text == "ast" && peek(1).kind == GTok::Kind::ident) return augmentation(g);
    production(g);
  }

  void options(GrammarDef& g) {
    next();
    expect("{");
    while (!accept("}")) {
      SourcePos p = peek().pos;
      std::string key = ident("option");
      if (key == "compileunit") {
        g.options.compileUnitStart = ident("start production");
      } else if (key == "nodefaulttokens") {
        g.options.defaultTokensEnabled = false;
      } else if (key == "lookahead") {
        accept("=");
        if (peek().kind != GTok::Kind::number) fail("lookahead depth");
        g.options.lookaheadK = std::stoi(next().text);
        g.options.lookaheadSet = true;
      } else {
        throw SyntaxError(p, "unknown option '" + key + "'");
      }
      expect(";");
    }
  }

  void token(GrammarDef& g) {
    next();
    TokenDef t;
    t.pos = peek().pos;
    t.name = ident("token name");
    expect("=");
    t.pattern = pattern_alternative();
    if (accept(":")) {
      if (accept("/")) {
        t.valueKind = TokenValueKind::custom;
        t.converterKey = qualified_name();
      } else {
        SourcePos p = peek().pos;
        std::string kind = ident("token value type");
        if (kind == "int")
          t.valueKind = TokenValueKind::int_;
        else if (kind == "float")
          t.valueKind = TokenValueKind::float_;
        else if (kind == "string")
          t.valueKind = TokenValueKind::string;
        else
          throw SyntaxError(p, "unknown token value type '" + kind + "' (use int, float, string or /converter)");
      }
    }
    expect(";");
    g.tokens.push_back(std::move(t));
  }

  PatternNode pattern_alternative() {
    PatternNode first = pattern_sequence();
    if (!is_punct("|")) return first;
    PatternNode alt;
    alt.kind = PatternNode::Kind::alternative;
    alt.items.push_back(std::move(first));
    while (accept("|")) alt.items.push_back(pattern_sequence());
    return alt;
  }

  PatternNode pattern_sequence() {
    PatternNode seq;
    seq.kind = PatternNode::Kind::sequence;
    while (!(is_punct("|") || is_punct(")") || is_punct(";") || is_punct(":") ||
             peek().kind == GTok::Kind::eof)) {
      PatternNode atom = pattern_atom();
      while (is_punct("*") || is_punct("+") || is_punct("?")) {
        char op = next().text[0];
        auto k = op == '*' ? PatternNode::Kind::star
                 : op == '+' ? PatternNode::Kind::plus
                             : PatternNode::Kind::optional;
        atom = PatternNode::unary(k, std::move(atom));
      }
      seq.items.push_back(std::move(atom));
    }
    if (seq.items.empty()) throw SyntaxError(peek().pos, "empty token pattern");
    if (seq.items.size() == 1) return std::move(seq.items.front());
    return seq;
  }

  PatternNode pattern_atom() {
    const GTok& t = peek();
    if (accept("(")) {
      PatternNode inner = pattern_alternative();
      expect(")");
      return inner;
    }
    if (t.kind == GTok::Kind::character) {
      SourcePos p = t.pos;
      std::string lo = next().text;
      if (lo.size() != 1) throw SyntaxError(p, "character literal must hold exactly one character");
      if (accept("..")) {
        if (peek().kind != GTok::Kind::character || peek().text.size() != 1)
          fail("character after '..'");
        char hi = next().text[0];
        return PatternNode::range(lo[0], hi);
      }
      return PatternNode::literal(lo);
    }
    if (t.kind == GTok::Kind::string) {
      if (t.text.empty()) throw SyntaxError(t.pos, "empty string literal in token pattern");
      return PatternNode::literal(next().text);
    }
    throw SyntaxError(t.pos, "unsupported token pattern construct '" + t.text +
                                 "' (allowed: literals, 'a'..'z' ranges, grouping, |, *, +, ?)");
  }

  CardRange card_range() {
    SourcePos p = peek().pos;
    if (accept("*")) return CardRange::many();
    if (peek().kind != GTok::Kind::number) fail("cardinality");
    int lo = std::stoi(next().text);
    if (accept("..")) {
      if (accept("*")) return CardRange::between(lo, -1);
      if (peek().kind != GTok::Kind::number) fail("upper bound");
      int hi = std::stoi(next().text);
      if (hi < lo) throw SyntaxError(p, "cardinality range upper bound below lower bound");
      return CardRange::between(lo, hi);
    }
    if (lo == 1) return CardRange::one();
    return CardRange::between(lo, lo);
  }

  void association(GrammarDef& g) {
    next();
    AssociationDef a;
    a.pos = peek().pos;
    a.name = ident("association name");
    a.sourceType = ident("source type");
    if (accept(".")) a.sourceRole = ident("source role");
    a.sourceCard = card_range();
    if (accept("->"))
      a.directed = true;
    else if (!accept("<->"))
      fail("'->' or '<->'");
    a.targetCard = card_range();
    a.targetType = ident("target type");
    if (accept(".")) a.targetRole = ident("target role");
    expect(";");
    g.associations.push_back(std::move(a));
  }

  void attribute(GrammarDef& g) {
    AttributeDecl a;
    a.direction = next().text == "syn" ? AttributeDirection::synthesized : AttributeDirection::inherited;
    a.pos = peek().pos;
    a.name = ident("attribute name");
    expect(":");
    accept("/");
    a.valueKind = qualified_name();
    accept(";");
    g.attributeDecls.push_back(std::move(a));
  }

  void augmentation(GrammarDef& g) {
    next();
    AstAugmentation a;
    a.pos = peek().pos;
    a.target = ident("augmented production");
    expect("=");
    a.body = top_body();
    expect(";");
    g.astAugmentations.push_back(std::move(a));
  }

  void production(GrammarDef& g) {
    ProductionDef p;
    p.pos = peek().pos;
    if (is_word("interface") && peek(1).kind == GTok::Kind::ident) {
      next();
      p.kind = ProductionKind::interface_;
    } else if (is_word("abstract") && peek(1).kind == GTok::Kind::ident) {
      next();
      p.kind = ProductionKind::abstract_;
    } else if (is_word("external") && peek(1).kind == GTok::Kind::ident) {
      next();
      p.kind = ProductionKind::external;
    }
    p.name = ident("production name");
    for (;;) {
      if (is_word("extends")) {
        next();
        append(p.extends, name_list());
      } else if (is_word("implements")) {
        next();
        append(p.implements, name_list());
      } else if (is_word("astextends")) {
        next();
        append(p.astExtends, name_list());
      } else if (is_word("astimplements")) {
        next();
        append(p.astImplements, name_list());
      } else {
        break;
      }
    }
    if (accept("/")) p.requiredContract = qualified_name();
    if (accept("=")) p.body = top_body();
    expect(";");
    g.productions.push_back(std::move(p));
  }

  static void append(std::vector<std::string>& to, std::vector<std::string> from) {
    to.insert(to.end(), from.begin(), from.end());
  }

  // A production body is always a sequence unless it has several top-level
  // alternatives.
  RuleBody top_body() {
    SourcePos p = peek().pos;
    std::vector<BodyElement> branches{sequence()};
    while (accept("|")) branches.push_back(sequence());
    if (branches.size() == 1) return std::move(branches.front());
    BodyElement alt;
    alt.kind = BodyElement::Kind::alternative;
    alt.pos = p;
    for (auto& b : branches) alt.items.push_back(collapse(std::move(b)));
    return alt;
  }

  static BodyElement collapse(BodyElement seq) {
    if (seq.kind == BodyElement::Kind::sequence && seq.items.size() == 1)
      return std::move(seq.items.front());
    return seq;
  }

  BodyElement sequence() {
    BodyElement seq;
    seq.kind = BodyElement::Kind::sequence;
    seq.pos = peek().pos;
    while (!(is_punct("|") || is_punct(")") || is_punct(";") || peek().kind == GTok::Kind::eof))
      seq.items.push_back(element());
    return seq;
  }

  Cardinality cardinality() {
    if (accept("?")) return Cardinality::optional;
    if (accept("*")) return Cardinality::star;
    if (accept("+")) return Cardinality::plus;
    return Cardinality::one;
  }

  BodyElement element() {
    BodyElement e;
    e.pos = peek().pos;
    if (peek().kind == GTok::Kind::ident && is_punct(":", 1)) {
      e.label = next().text;
      next();
    }
    const GTok& t = peek();
    if (accept("(")) {
      if (!e.label.empty()) throw SyntaxError(e.pos, "blocks cannot be labeled");
      e.kind = BodyElement::Kind::block;
      std::vector<BodyElement> branches{sequence()};
      while (accept("|")) branches.push_back(sequence());
      expect(")");
      if (branches.size() == 1) {
        e.items.push_back(collapse(std::move(branches.front())));
      } else {
        BodyElement alt;
        alt.kind = BodyElement::Kind::alternative;
        alt.pos = branches.front().pos;
        for (auto& b : branches) alt.items.push_back(collapse(std::move(b)));
        e.items.push_back(std::move(alt));
      }
      e.card = cardinality();
      return e;
    }
    if (accept("[")) {
      e.kind = BodyElement::Kind::constants;
      do {
        if (peek().kind != GTok::Kind::string) fail("constant string");
        e.constants.push_back(next().text);
      } while (accept("|"));
      expect("]");
      if (is_punct("?") || is_punct("*") || is_punct("+"))
        throw SyntaxError(peek().pos, "constant groups take no cardinality; wrap them in a block");
      return e;
    }
    if (t.kind == GTok::Kind::string) {
      e.kind = BodyElement::Kind::terminal;
      if (t.text.empty()) throw SyntaxError(t.pos, "empty terminal");
      e.target = next().text;
      e.card = cardinality();
      return e;
    }
    if (t.kind == GTok::Kind::ident) {
      e.target = next().text;
      e.kind = is_token_name(e.target) ? BodyElement::Kind::token : BodyElement::Kind::nonterminal;
      e.card = cardinality();
      return e;
    }
    fail("body element");
  }

  std::vector<GTok> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Result<GrammarDef> parse_grammar(std::string_view text, const std::string& file) {
  Result<GrammarDef> r;
  try {
    GrammarLexer lx(text, file);
    GrammarParser p(lx.run());
    r.value = p.grammar();
  } catch (const SyntaxError& e) {
    r.diags.error(e.pos, e.what());
  }
  return r;
}

}  // namespace lwb
