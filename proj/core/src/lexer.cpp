#include "lwb/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <set>

namespace lwb {

const Converter* ConverterRegistry::find(std::string_view key) const {
  auto it = converters_.find(key);
  return it == converters_.end() ? nullptr : &it->second;
}

ConverterRegistry ConverterRegistry::with_builtins() {
  ConverterRegistry r;
  r.add("cardinality", {[](std::string_view raw, std::string& error) -> Value {
                          if (raw == "*") return std::int64_t{-1};
                          std::int64_t v = 0;
                          auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
                          if (ec != std::errc() || p != raw.data() + raw.size()) {
                            error = "not a cardinality: '" + std::string(raw) + "'";
                            return {};
                          }
                          return v;
                        },
                        [](const Value& v) {
                          const auto* i = std::get_if<std::int64_t>(&v);
                          return i && *i == -1 ? std::string("*") : to_display(v);
                        }});
  return r;
}

const LexRule* LexerSpec::find_rule(std::string_view name) const {
  for (const auto& r : tokenRules)
    if (r.name == name) return &r;
  return nullptr;
}

bool LexerSpec::is_reserved(std::string_view text) const {
  return std::binary_search(reservedTerminals.begin(), reservedTerminals.end(), text);
}

namespace {

PatternNode ident_pattern() {
  PatternNode letter;
  letter.kind = PatternNode::Kind::alternative;
  letter.items = {PatternNode::range('a', 'z'), PatternNode::range('A', 'Z')};
  PatternNode tail;
  tail.kind = PatternNode::Kind::alternative;
  tail.items = {PatternNode::range('a', 'z'), PatternNode::range('A', 'Z'), PatternNode::range('0', '9'),
                PatternNode::literal("_")};
  PatternNode seq;
  seq.kind = PatternNode::Kind::sequence;
  seq.items = {letter, PatternNode::unary(PatternNode::Kind::star, tail)};
  return seq;
}

void collect_token_refs(const BodyElement& e, std::vector<const BodyElement*>& out) {
  if (e.kind == BodyElement::Kind::token) out.push_back(&e);
  for (const auto& c : e.items) collect_token_refs(c, out);
}

// Length of a double-quoted string literal with backslash escapes at `i`, or 0.
std::size_t match_string_literal(std::string_view text, std::size_t i) {
  if (i >= text.size() || text[i] != '"') return 0;
  std::size_t j = i + 1;
  while (j < text.size()) {
    char c = text[j];
    if (c == '\n') return 0;
    if (c == '\\') {
      j += 2;
      continue;
    }
    if (c == '"') return j + 1 - i;
    ++j;
  }
  return 0;
}

std::string unescape(std::string_view quoted) {
  std::string out;
  for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c == '\\' && i + 2 < quoted.size()) {
      char e = quoted[++i];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: out += e;
      }
    } else {
      out += c;
    }
  }
  return out;
}

std::string escape(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

Result<LexerSpec> build_lexer(const LinkedGrammar& g, std::shared_ptr<const ConverterRegistry> converters) {
  Result<LexerSpec> r;
  LexerSpec spec;
  spec.language = g.qualifiedName;
  spec.defaultsEnabled = g.options.defaultTokensEnabled;
  spec.converters = converters ? std::move(converters)
                               : std::make_shared<const ConverterRegistry>(ConverterRegistry::with_builtins());

  for (const auto& t : g.tokens) {
    LexRule rule;
    rule.name = t.name;
    rule.valueKind = t.valueKind;
    rule.converterKey = t.converterKey;
    auto compiled = CompiledPattern::compile(t.pattern, t.pos);
    r.diags.append(compiled.diags);
    if (!compiled) continue;
    rule.pattern = std::move(*compiled.value);
    if (t.valueKind == TokenValueKind::custom && !spec.converters->contains(t.converterKey))
      r.diags.error(t.pos, "no converter registered under '" + t.converterKey + "' for token " + t.name);
    spec.tokenRules.push_back(std::move(rule));
  }
  if (spec.defaultsEnabled) {
    if (!spec.find_rule("IDENT")) {
      LexRule ident;
      ident.name = "IDENT";
      ident.builtin = LexRule::Builtin::ident;
      ident.pattern = std::move(*CompiledPattern::compile(ident_pattern()).value);
      spec.tokenRules.push_back(std::move(ident));
    }
    if (!spec.find_rule("STRING")) {
      LexRule str;
      str.name = "STRING";
      str.builtin = LexRule::Builtin::string;
      spec.tokenRules.push_back(std::move(str));
    }
  }

  std::set<std::string> terms;
  for (const auto& t : g.terminals()) terms.insert(t);
  spec.reservedTerminals.assign(terms.begin(), terms.end());

  // Every token class used by a production needs a rule.
  std::set<std::string> reported;
  for (const auto& p : g.productions) {
    if (p.shadowed || !p.def.body) continue;
    std::vector<const BodyElement*> refs;
    collect_token_refs(*p.def.body, refs);
    for (const auto* ref : refs)
      if (!spec.find_rule(ref->target) && reported.insert(ref->target).second)
        r.diags.error(ref->pos, "production '" + p.def.name + "' references token " + ref->target +
                                    " but no rule defines it");
  }
  for (const auto& aug : g.augmentations) {
    std::vector<const BodyElement*> refs;
    collect_token_refs(aug.body, refs);
    for (const auto* ref : refs)
      if (!spec.find_rule(ref->target) && reported.insert(ref->target).second)
        r.diags.error(ref->pos, "ast rule '" + aug.target + "' references token " + ref->target +
                                    " but no rule defines it");
  }

  // Overlapping token classes are legal; the earlier rule wins ties.
  for (std::size_t i = 0; i < spec.tokenRules.size(); ++i)
    for (std::size_t j = i + 1; j < spec.tokenRules.size(); ++j) {
      const auto& a = spec.tokenRules[i];
      const auto& b = spec.tokenRules[j];
      if (!a.pattern || !b.pattern) continue;
      if (auto w = CompiledPattern::overlap(*a.pattern, *b.pattern)) {
        const auto* def = g.find_token(b.name);
        r.diags.warning(def ? def->pos : g.pos, "token " + b.name + " overlaps " + a.name + " (e.g. '" + *w +
                                                   "'); " + a.name + " takes precedence");
      }
    }

  if (!r.diags.has_errors()) r.value = std::move(spec);
  return r;
}

Scanner::Scanner(const LexerSpec& spec, std::string_view text, std::string file)
    : spec_(&spec), text_(text), file_(std::move(file)) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < text_.size(); ++i)
    if (text_[i] == '\n') line_starts_.push_back(i + 1);
}

SourcePos Scanner::position(std::size_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
  std::size_t col = offset - line_starts_[line - 1] + 1;
  return {file_, static_cast<int>(line), static_cast<int>(col)};
}

std::size_t Scanner::skip_layout(std::size_t i) const {
  while (i < text_.size()) {
    char c = text_[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (text_.substr(i, 2) == "//") {
      while (i < text_.size() && text_[i] != '\n') ++i;
    } else if (text_.substr(i, 2) == "/*") {
      std::size_t end = text_.find("*/", i + 2);
      if (end == std::string_view::npos) return i;  // reported by scan()
      i = end + 2;
    } else {
      break;
    }
  }
  return i;
}

std::optional<Lexeme> Scanner::scan(std::size_t offset, Diagnostics& diags) const {
  std::size_t i = skip_layout(offset);
  Lexeme lx;
  lx.offset = i;
  lx.pos = position(i);
  if (i >= text_.size()) {
    lx.kind = std::string(kEndOfInput);
    return lx;
  }
  if (text_.substr(i, 2) == "/*") {
    diags.error(lx.pos, "unterminated block comment");
    return std::nullopt;
  }

  std::size_t bestLen = 0;
  const LexRule* bestRule = nullptr;
  for (const auto& rule : spec_->tokenRules) {
    std::size_t n = rule.builtin == LexRule::Builtin::string ? match_string_literal(text_, i)
                                                             : rule.pattern->longest_match(text_, i);
    if (n > bestLen) {
      bestLen = n;
      bestRule = &rule;
    }
  }
  std::size_t termLen = 0;
  for (const auto& t : spec_->reservedTerminals)
    if (t.size() > termLen && text_.substr(i, t.size()) == t) termLen = t.size();

  if (termLen == 0 && bestLen == 0) {
    diags.error(lx.pos, std::string("unexpected character '") + text_[i] + "' in " +
                            (spec_->language.empty() ? std::string("input") : spec_->language));
    return std::nullopt;
  }
  if (termLen >= bestLen) {
    lx.raw = std::string(text_.substr(i, termLen));
    lx.kind = lx.raw;
    lx.terminal = true;
    lx.value = lx.raw;
    return lx;
  }
  lx.raw = std::string(text_.substr(i, bestLen));
  lx.kind = bestRule->name;
  std::string error;
  switch (bestRule->valueKind) {
    case TokenValueKind::string:
      lx.value = bestRule->builtin == LexRule::Builtin::string ? unescape(lx.raw) : lx.raw;
      break;
    case TokenValueKind::int_: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(lx.raw.data(), lx.raw.data() + lx.raw.size(), v);
      if (ec != std::errc() || p != lx.raw.data() + lx.raw.size())
        error = "cannot convert '" + lx.raw + "' to int";
      lx.value = v;
      break;
    }
    case TokenValueKind::float_: {
      try {
        std::size_t used = 0;
        double d = std::stod(lx.raw, &used);
        if (used != lx.raw.size()) error = "cannot convert '" + lx.raw + "' to float";
        lx.value = d;
      } catch (const std::exception&) {
        error = "cannot convert '" + lx.raw + "' to float";
      }
      break;
    }
    case TokenValueKind::custom: {
      const Converter* c = spec_->converters->find(bestRule->converterKey);
      if (!c) {
        error = "no converter '" + bestRule->converterKey + "'";
        break;
      }
      try {
        lx.value = c->convert(lx.raw, error);
      } catch (const std::exception& e) {
        error = std::string("converter '") + bestRule->converterKey + "' failed: " + e.what();
      }
      break;
    }
  }
  if (!error.empty()) {
    diags.error(lx.pos, error + " (token " + bestRule->name + ")");
    return std::nullopt;
  }
  return lx;
}

Result<std::vector<Lexeme>> tokenize(const LexerSpec& spec, std::string_view text, const std::string& file) {
  Result<std::vector<Lexeme>> r;
  Scanner sc(spec, text, file);
  std::vector<Lexeme> out;
  std::size_t offset = 0;
  for (;;) {
    auto lx = sc.scan(offset, r.diags);
    if (!lx) return r;
    if (lx->kind == kEndOfInput) break;
    offset = lx->end();
    out.push_back(std::move(*lx));
  }
  r.value = std::move(out);
  return r;
}

std::string render_token(const LexerSpec& spec, std::string_view tokenName, const Value& v) {
  const LexRule* rule = spec.find_rule(tokenName);
  if (rule && rule->builtin == LexRule::Builtin::string) return escape(std::get<std::string>(v));
  if (rule && rule->valueKind == TokenValueKind::custom)
    if (const Converter* c = spec.converters->find(rule->converterKey); c && c->render) return c->render(v);
  return to_display(v);
}

}  // namespace lwb
