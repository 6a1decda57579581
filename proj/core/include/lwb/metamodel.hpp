#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/diagnostics.hpp"
#include "lwb/grammar.hpp"
#include "lwb/linked_grammar.hpp"

namespace lwb {

/// How often an element can occur; `max < 0` means unbounded.
struct Occurrence {
  int min = 0;
  int max = 0;

  bool unbounded() const { return max < 0; }
  bool many() const { return max < 0 || max > 1; }
  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

/// Minimum and maximum number of times the elements named `label` with target
/// `target` occur in any derivation of `body`. An empty `label` matches
/// unlabeled elements.
Occurrence occurrence_analysis(const RuleBody& body, std::string_view label, std::string_view target);

struct AttrDef {
  enum class Kind { composition, token, boolean_constant, enum_constant };

  std::string name;
  Kind kind = Kind::token;
  std::string target;       // composition: type name; token: token class or "" for labeled terminals
  std::string valueType;    // token: string | int | float | custom:<key>
  std::vector<std::string> values;  // enum constants
  int minOccurs = 0;
  int maxOccurs = 1;        // -1 unbounded

  bool is_list() const { return maxOccurs < 0 || maxOccurs > 1; }
  bool nullable() const { return !is_list() && minOccurs == 0; }
  /// Name plus value kind; used for attribute subtraction and clash checks.
  bool same_signature(const AttrDef& o) const;

  friend bool operator==(const AttrDef&, const AttrDef&) = default;
};

const char* to_string(AttrDef::Kind k);

struct NodeTypeDef {
  std::string name;
  std::string superType;
  std::vector<std::string> implementedInterfaces;
  bool isAbstract = false;
  std::vector<AttrDef> attributes;  // own attributes only
  /// Flattened alternatives: at most one of these attribute groups may be
  /// populated on an instance.
  std::vector<std::vector<std::vector<std::string>>> exclusive;
  std::string sourceGrammar;

  friend bool operator==(const NodeTypeDef&, const NodeTypeDef&) = default;
};

struct InterfaceDef {
  std::string name;
  std::vector<std::string> extendsList;
  std::vector<AttrDef> declaredAttributes;
  bool external = false;          // a hole filled by an embedded language
  std::string requiredContract;
  std::string sourceGrammar;

  friend bool operator==(const InterfaceDef&, const InterfaceDef&) = default;
};

struct AssocEdge {
  std::string name;
  std::string source;
  std::string target;
  std::string sourceRole;  // attribute on source nodes, navigates to targets
  std::string targetRole;  // attribute on target nodes, navigates to sources
  CardRange sourceCard;    // how many sources a target links to
  CardRange targetCard;    // how many targets a source links to
  bool directed = false;

  friend bool operator==(const AssocEdge&, const AssocEdge&) = default;
};

class Metamodel {
 public:
  std::vector<NodeTypeDef> nodeTypes;
  std::vector<InterfaceDef> interfaces;
  std::vector<AssocEdge> associations;

  friend bool operator==(const Metamodel& a, const Metamodel& b) {
    return a.nodeTypes == b.nodeTypes && a.interfaces == b.interfaces && a.associations == b.associations;
  }

  const NodeTypeDef* find_node(std::string_view name) const;
  const InterfaceDef* find_interface(std::string_view name) const;
  bool has_type(std::string_view name) const { return find_node(name) || find_interface(name); }

  /// Reflexive, transitive subtype test over classes and interfaces.
  bool is_subtype(std::string_view sub, std::string_view super) const;

  /// Own and inherited attributes, supertypes first.
  std::vector<AttrDef> all_attributes(std::string_view type) const;
  std::optional<AttrDef> find_attribute(std::string_view type, std::string_view attr) const;

  /// Type itself, then its superclass chain, then implemented interfaces
  /// (declaration order, breadth first). Used for handler dispatch.
  std::vector<std::string> dispatch_chain(std::string_view type) const;

  /// Association ends navigable from nodes of `type`: (edge, from source side).
  std::vector<std::pair<const AssocEdge*, bool>> roles_of(std::string_view type) const;
};

Result<Metamodel> derive_metamodel(const LinkedGrammar& linked);

/// Plain EBNF: each production on one line, subtypes and implementors added
/// as alternatives.
std::string emit_ebnf(const LinkedGrammar& linked);

enum class ReportFormat { dot, json };

std::string emit_metamodel_report(const Metamodel& m, ReportFormat format);
Result<Metamodel> metamodel_from_json(std::string_view json);

}  // namespace lwb
