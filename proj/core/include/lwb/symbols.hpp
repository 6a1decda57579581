#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/ast.hpp"
#include "lwb/component.hpp"
#include "lwb/metamodel.hpp"

namespace lwb {

struct SymbolEntry {
  std::string type;
  /// Simple name under the flat scheme, dotted path under the hierarchical one.
  std::string name;
  AstNode* node = nullptr;
  /// Root of the tree the node belongs to.
  const AstNode* root = nullptr;
};

class SymbolTable {
 public:
  SymbolScheme scheme = SymbolScheme::flat;
  std::vector<SymbolEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Nodes of type `type` (subtypes included) called `name`, seen from
  /// `from`. Entries of the referring tree win over other trees; under the
  /// hierarchical scheme relative names are tried from the innermost scope
  /// outwards.
  std::vector<AstNode*> lookup(const Metamodel& m, std::string_view type, std::string_view name,
                               const AstNode* from = nullptr) const;

  /// Qualified name under which `n` is registered (empty if it is not).
  std::string name_of(const AstNode* n) const;
};

/// Name attribute of a type: configured for the type or one of its
/// supertypes, `name` otherwise.
std::string key_attribute(const Metamodel& m, const ResolverConfig& cfg, std::string_view type);

/// Registers every node with a non-empty key attribute. Duplicates are
/// reported with both positions; the first definition stays resolvable.
SymbolTable build_symbols(const std::vector<AstNode*>& roots, const Metamodel& m, const ResolverConfig& cfg,
                          Diagnostics& diags);

/// Custom resolution for one association: receives a node of the
/// association's source type and returns its targets.
using CustomResolver = std::function<std::vector<AstNode*>(const AstNode& source, const SymbolTable& table)>;

class ResolverRegistry {
 public:
  void add(std::string association, CustomResolver r) { resolvers_[std::move(association)] = std::move(r); }
  const CustomResolver* find(std::string_view association) const;

 private:
  std::map<std::string, CustomResolver, std::less<>> resolvers_;
};

struct LinkError {
  std::string association;
  const AstNode* node = nullptr;
  /// Unresolved name, or the offending count for cardinality errors.
  std::string detail;
  SourcePos pos;
  std::string message;
};

struct LinkReport {
  std::size_t established = 0;
  std::vector<LinkError> errors;

  bool ok() const { return errors.empty(); }
  Diagnostics diagnostics(Severity s = Severity::error) const;
};

/// Sets association links on every node below `roots`, replacing links set
/// earlier. Unresolved names and cardinality violations are reported; a
/// reference is either linked completely (both directions) or not at all.
LinkReport establish_links(const std::vector<AstNode*>& roots, const Metamodel& m, const SymbolTable& table,
                           const ResolverConfig& cfg = {}, const ResolverRegistry* registry = nullptr);

/// Composition children and association targets of `role`.
Result<std::vector<AstNode*>> navigate(const AstNode& node, std::string_view role, const Metamodel& m);

}  // namespace lwb
