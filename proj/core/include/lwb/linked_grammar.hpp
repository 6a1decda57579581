#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/grammar.hpp"

namespace lwb {

/// A production after inheritance has been resolved.
struct LinkedProduction {
  /// Effective definition. An override without body carries the inherited
  /// body; `extends`/`implements` include the ones of the overridden rule.
  ProductionDef def;
  /// Qualified name of the grammar that defined this production.
  std::string origin;
  /// Key of the metamodel type derived from this production. Equal to the
  /// production name unless the production is shadowed by an override, in
  /// which case it is `origin.Name`.
  std::string typeName;
  /// Type name of the production this one overrides (empty if none).
  std::string overrides;
  /// Hidden by an override in a subgrammar; not reachable from bodies.
  bool shadowed = false;
};

/// The productions, tokens and declarations visible in one grammar once all
/// of its supergrammars have been folded in.
struct LinkedGrammar {
  std::string qualifiedName;
  /// The grammar itself first, then every transitive supergrammar.
  std::vector<std::string> lineage;
  std::vector<LinkedProduction> productions;  // link order, shadowed ones included
  std::vector<TokenDef> tokens;               // overrides applied in place
  std::vector<AssociationDef> associations;
  std::vector<AstAugmentation> augmentations;
  std::vector<AttributeDecl> attributeDecls;
  GrammarOptions options;
  SourcePos pos;

  /// Active (non-shadowed) production by simple name.
  const LinkedProduction* find(std::string_view name) const;
  const LinkedProduction* find_type(std::string_view typeName) const;
  const TokenDef* find_token(std::string_view name) const;

  bool derives_from(std::string_view grammar) const;

  /// Active productions that list `name` in `extends` or `implements`, in link
  /// order. These are the extra alternatives of `name` in the concrete syntax.
  std::vector<const LinkedProduction*> direct_subrules(std::string_view name) const;

  /// Every terminal text used in active production bodies.
  std::vector<std::string> terminals() const;
};

/// Wraps a single grammar without supergrammars.
LinkedGrammar link_single(const GrammarDef& g);

}  // namespace lwb
