#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lwb/ast.hpp"
#include "lwb/component.hpp"
#include "lwb/diagnostics.hpp"
#include "lwb/lexer.hpp"

namespace lwb {

struct ParseOptions {
  /// Start production; empty means the component's default start rule.
  std::string start;
  /// Character offset to start at.
  std::size_t offset = 0;
  /// Reject trailing input. Embedded parses switch this off and report how
  /// far they got instead.
  bool requireEnd = true;
  /// Read `package a.b;` and `import a.b.C;` lines before the model when the
  /// grammar declares a compile unit.
  bool compileUnitHeader = true;
};

struct ParseResult {
  Ast ast;
  Diagnostics diags;
  /// Offset just past the last consumed lexeme.
  std::size_t endOffset = 0;
  std::string package;
  SourcePos packagePos;
  std::vector<std::pair<std::string, SourcePos>> imports;

  AstNode* root() const { return ast.root(); }
  bool ok() const { return ast.root() != nullptr && !diags.has_errors(); }
};

/// Parses text with the component's lexer, switching lexers at bound
/// external nonterminals.
ParseResult parse_text(const LanguageComponent& c, std::string_view text, const std::string& file = "",
                       const ParseOptions& options = {});

/// Parses an already tokenized input. External nonterminals cannot be
/// entered in this mode because embedded languages need the raw text.
ParseResult parse(const LanguageComponent& c, const std::vector<Lexeme>& lexemes, std::string_view start = {});

/// Prints a tree in the concrete syntax so that parsing the result yields a
/// structurally equal tree. Embedded subtrees are printed by the component
/// bound for them.
Result<std::string> pretty_print(const AstNode& root, const LanguageComponent& c);

}  // namespace lwb
