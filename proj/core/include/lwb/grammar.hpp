#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/diagnostics.hpp"
#include "lwb/token_pattern.hpp"

namespace lwb {

enum class Cardinality { one, optional, star, plus };

const char* cardinality_suffix(Cardinality c);

/// Multiplicity at one end of an association.
struct CardRange {
  enum class Kind { exactly_one, unbounded, range } kind = Kind::exactly_one;
  int lo = 0;
  int hi = 0;  // -1 encodes an open upper bound ("2..*")

  static CardRange one() { return {Kind::exactly_one, 1, 1}; }
  static CardRange many() { return {Kind::unbounded, 0, -1}; }
  static CardRange between(int lo, int hi) { return {Kind::range, lo, hi}; }

  int min() const { return kind == Kind::exactly_one ? 1 : kind == Kind::unbounded ? 0 : lo; }
  /// -1 when unbounded.
  int max() const { return kind == Kind::exactly_one ? 1 : kind == Kind::unbounded ? -1 : hi; }
  bool admits(std::size_t n) const {
    return static_cast<long>(n) >= min() && (max() < 0 || static_cast<long>(n) <= max());
  }
  std::string to_string() const;

  friend bool operator==(const CardRange&, const CardRange&) = default;
};

/// One element of a production body. Sequence, alternative and block carry
/// nested elements in `items` (a block has exactly one item); references and
/// terminals carry `target`; constant groups carry `constants`.
struct BodyElement {
  enum class Kind { sequence, alternative, block, nonterminal, token, terminal, constants };

  Kind kind = Kind::sequence;
  std::vector<BodyElement> items;
  std::string target;
  std::string label;
  Cardinality card = Cardinality::one;
  std::vector<std::string> constants;
  SourcePos pos;

  friend bool operator==(const BodyElement&, const BodyElement&) = default;

  bool is_reference() const { return kind == Kind::nonterminal || kind == Kind::token; }
};

using RuleBody = BodyElement;

enum class ProductionKind { node, interface_, abstract_, external };

const char* to_string(ProductionKind k);

struct ProductionDef {
  std::string name;
  ProductionKind kind = ProductionKind::node;
  std::vector<std::string> extends;
  std::vector<std::string> implements;
  std::vector<std::string> astExtends;
  std::vector<std::string> astImplements;
  std::optional<RuleBody> body;
  std::string requiredContract;  // `/Iface` annotation on external productions
  SourcePos pos;

  friend bool operator==(const ProductionDef&, const ProductionDef&) = default;
};

enum class TokenValueKind { string, int_, float_, custom };

const char* to_string(TokenValueKind k);

struct TokenDef {
  std::string name;
  PatternNode pattern;
  TokenValueKind valueKind = TokenValueKind::string;
  std::string converterKey;
  SourcePos pos;

  friend bool operator==(const TokenDef&, const TokenDef&) = default;
};

struct AssociationDef {
  std::string name;
  std::string sourceType;
  std::string targetType;
  CardRange sourceCard;
  CardRange targetCard;
  std::string sourceRole;  // attribute on source nodes; empty when omitted
  std::string targetRole;  // attribute on target nodes; empty when omitted
  bool directed = false;
  SourcePos pos;

  friend bool operator==(const AssociationDef&, const AssociationDef&) = default;
};

/// `ast Name = body;` adds attributes without touching the concrete syntax.
struct AstAugmentation {
  std::string target;
  RuleBody body;
  SourcePos pos;

  friend bool operator==(const AstAugmentation&, const AstAugmentation&) = default;
};

enum class AttributeDirection { synthesized, inherited };

/// `syn outstanding: /float;` or `inh depth: /int;`
struct AttributeDecl {
  std::string name;
  AttributeDirection direction = AttributeDirection::synthesized;
  std::string valueKind;
  std::string owningGrammar;
  SourcePos pos;

  friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

struct GrammarOptions {
  std::string compileUnitStart;
  bool defaultTokensEnabled = true;
  int lookaheadK = 3;
  bool lookaheadSet = false;

  friend bool operator==(const GrammarOptions&, const GrammarOptions&) = default;
};

struct GrammarDef {
  std::string package;
  std::string name;
  std::vector<std::string> supers;
  std::vector<ProductionDef> productions;
  std::vector<TokenDef> tokens;
  std::vector<AssociationDef> associations;
  std::vector<AstAugmentation> astAugmentations;
  std::vector<AttributeDecl> attributeDecls;
  GrammarOptions options;
  SourcePos pos;

  friend bool operator==(const GrammarDef&, const GrammarDef&) = default;

  std::string qualified_name() const { return package.empty() ? name : package + "." + name; }
  const ProductionDef* find_production(std::string_view n) const;
  const TokenDef* find_token(std::string_view n) const;
};

/// Token classes are spelled in upper case with at least two characters
/// (`IDENT`, `NUMBER`); productions are not. The parser uses this to tell token references from nonterminals.
bool is_token_name(std::string_view name);

/// Lower-cases the first character.
std::string decapitalize(std::string_view name);

/// Turns arbitrary terminal text into an identifier usable as attribute name.
std::string sanitize_identifier(std::string_view text);

/// Attribute name used for a body element in the abstract syntax.
std::string attribute_name(const BodyElement& e);

Result<GrammarDef> parse_grammar(std::string_view text, const std::string& file);

/// Local well-formedness checks; empty means well-formed.
Diagnostics validate_grammar(const GrammarDef& g);

/// Renders a grammar back to grammar-file syntax.
std::string print_grammar(const GrammarDef& g);
std::string print_body(const RuleBody& body);

/// Copy with every SourcePos reset; used for structural comparisons.
GrammarDef strip_positions(GrammarDef g);

}  // namespace lwb
