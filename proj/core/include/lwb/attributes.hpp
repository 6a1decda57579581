#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lwb/ast.hpp"
#include "lwb/grammar.hpp"
#include "lwb/linked_grammar.hpp"
#include "lwb/visitor.hpp"

namespace lwb {

class AttributeEvaluator;

/// Computes one attribute for one node type. Values of other nodes are
/// pulled through the evaluator so that caching and cycle checks apply.
using Calculator = std::function<Value(AstNode& node, AttributeEvaluator& ev)>;

/// A named set of calculators, one per node type (supertypes act as
/// fallback).
struct Calculation {
  std::string key;
  std::map<std::string, Calculator, std::less<>> byType;

  Calculation& on(const std::string& type, Calculator c) {
    byType[type] = std::move(c);
    return *this;
  }
};

struct VirtualBinding {
  std::string grammar;    // qualified grammar name
  std::string attribute;  // attribute declared by that grammar
  std::string calculatorKey;
  SourcePos pos;
};

/// One virtual attribute standing for equivalent attributes of several
/// languages.
struct VirtualAttributeMap {
  std::string name;
  std::vector<VirtualBinding> bindings;
  SourcePos pos;
};

/// `Unpaid { a.b.outstanding = /a.b.Calc; ... }`, any number of maps.
Result<std::vector<VirtualAttributeMap>> parse_amap(std::string_view text, const std::string& file = "");

class CalculatorRegistry {
 public:
  void declare(const AttributeDecl& d);
  /// Declares every attribute of a linked grammar under its owning grammar.
  void declare_all(const LinkedGrammar& g);

  void add(Calculation c);
  /// Attribute `attr` of `grammar` is computed by calculation `key`.
  Diagnostics bind(const std::string& grammar, const std::string& attr, const std::string& key);

  const AttributeDecl* find_decl(std::string_view grammar, std::string_view attr) const;
  const Calculation* find_calculation(std::string_view key) const;
  /// Calculation key bound to (grammar, attr), if any.
  const std::string* binding(std::string_view grammar, std::string_view attr) const;

  const std::map<std::string, VirtualAttributeMap, std::less<>>& virtuals() const { return virtuals_; }

 private:
  friend Diagnostics register_virtual(const VirtualAttributeMap& map, CalculatorRegistry& registry);

  std::map<std::pair<std::string, std::string>, AttributeDecl> decls_;
  std::map<std::string, Calculation, std::less<>> calculations_;
  std::map<std::pair<std::string, std::string>, std::string> bindings_;
  std::map<std::string, VirtualAttributeMap, std::less<>> virtuals_;
};

/// Checks a virtual map (declared attributes, known calculators, compatible
/// value kinds) and adds it with its bindings to the registry.
Diagnostics register_virtual(const VirtualAttributeMap& map, CalculatorRegistry& registry);

/// int and float mix; everything else must match exactly.
bool compatible_value_kinds(std::string_view a, std::string_view b);

class AttributeError : public std::runtime_error {
 public:
  AttributeError(SourcePos pos, const std::string& what) : std::runtime_error(what), pos(std::move(pos)) {}
  SourcePos pos;
};

/// Grammars a node's language answers to (itself and its supergrammars).
using LineageLookup = std::function<std::vector<std::string>(const std::string& language)>;

/// Demand-driven evaluation with memoization and cycle detection.
class AttributeEvaluator {
 public:
  struct Options {
    bool memoize = true;
    LineageLookup lineage;
    MetamodelLookup metamodel;
  };

  explicit AttributeEvaluator(const CalculatorRegistry& registry) : AttributeEvaluator(registry, Options{}) {}
  AttributeEvaluator(const CalculatorRegistry& registry, Options options)
      : registry_(registry), options_(std::move(options)) {}

  /// Top-level entry: errors come back as diagnostics.
  Result<Value> eval(AstNode& node, std::string_view attr);

  /// For calculators: value of `attr` at `node`; throws AttributeError.
  Value get(AstNode& node, std::string_view attr);
  /// Inherited attributes read from the composition parent.
  Value inherited(AstNode& node, std::string_view attr);

  std::size_t calculator_calls() const { return calls_; }
  void clear_cache() { cache_.clear(); }

 private:
  struct Target {
    std::string grammar;
    std::string attribute;
    std::string key;
  };
  Target resolve(const AstNode& node, std::string_view attr) const;
  std::vector<std::string> lineage_of(const AstNode& node) const;

  const CalculatorRegistry& registry_;
  Options options_;
  std::map<std::pair<const AstNode*, std::string>, Value> cache_;
  std::vector<std::pair<const AstNode*, std::string>> inProgress_;
  std::size_t calls_ = 0;
};

/// One-shot evaluation with a fresh evaluator.
Result<Value> eval_attribute(AstNode& node, std::string_view attr, const CalculatorRegistry& registry,
                             AttributeEvaluator::Options options = {});

}  // namespace lwb
