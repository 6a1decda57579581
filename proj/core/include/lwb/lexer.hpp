#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/diagnostics.hpp"
#include "lwb/linked_grammar.hpp"
#include "lwb/token_pattern.hpp"
#include "lwb/value.hpp"

namespace lwb {

/// Host-side conversion of raw token text into a value, plus the inverse used
/// by the pretty printer.
struct Converter {
  /// Returns the converted value or sets `error`.
  std::function<Value(std::string_view raw, std::string& error)> convert;
  /// Optional inverse; defaults to to_display().
  std::function<std::string(const Value&)> render;
};

class ConverterRegistry {
 public:
  void add(std::string key, Converter c) { converters_[std::move(key)] = std::move(c); }
  const Converter* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  /// Registry holding the stock converters (currently `cardinality`: `*` is -1).
  static ConverterRegistry with_builtins();

 private:
  std::map<std::string, Converter, std::less<>> converters_;
};

struct LexRule {
  enum class Builtin { none, ident, string };

  std::string name;
  TokenValueKind valueKind = TokenValueKind::string;
  std::string converterKey;
  std::optional<CompiledPattern> pattern;
  Builtin builtin = Builtin::none;
};

struct LexerSpec {
  std::string language;
  std::vector<LexRule> tokenRules;
  /// Terminal texts collected from production bodies, sorted.
  std::vector<std::string> reservedTerminals;
  bool defaultsEnabled = true;
  std::shared_ptr<const ConverterRegistry> converters;

  const LexRule* find_rule(std::string_view name) const;
  bool is_reserved(std::string_view text) const;
};

struct Lexeme {
  /// Token class name, or the terminal text for reserved terminals.
  std::string kind;
  std::string raw;
  Value value;
  SourcePos pos;
  std::size_t offset = 0;
  bool terminal = false;

  std::size_t end() const { return offset + raw.size(); }
};

/// Lexeme kind used for end of input.
inline constexpr std::string_view kEndOfInput = "$";

Result<LexerSpec> build_lexer(const LinkedGrammar& g,
                              std::shared_ptr<const ConverterRegistry> converters = nullptr);

/// Incremental scanner over one text, usable from any character offset.
class Scanner {
 public:
  Scanner(const LexerSpec& spec, std::string_view text, std::string file);

  /// Scans the lexeme that starts at or after `offset`, skipping layout. An
  /// end-of-input lexeme is returned at the end. Returns nullopt and records
  /// a diagnostic for unscannable input or failed conversions.
  std::optional<Lexeme> scan(std::size_t offset, Diagnostics& diags) const;

  /// Position of a character offset.
  SourcePos position(std::size_t offset) const;

  std::string_view text() const { return text_; }
  const LexerSpec& spec() const { return *spec_; }

 private:
  std::size_t skip_layout(std::size_t offset) const;

  const LexerSpec* spec_;
  std::string_view text_;
  std::string file_;
  std::vector<std::size_t> line_starts_;
};

/// Whole-input tokenization; the trailing end-of-input lexeme is not included.
Result<std::vector<Lexeme>> tokenize(const LexerSpec& spec, std::string_view text, const std::string& file = "");

/// Text for a value as a token of the given rule would spell it.
std::string render_token(const LexerSpec& spec, std::string_view tokenName, const Value& v);

}  // namespace lwb
