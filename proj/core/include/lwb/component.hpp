#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/diagnostics.hpp"
#include "lwb/grammar.hpp"
#include "lwb/lexer.hpp"
#include "lwb/linked_grammar.hpp"
#include "lwb/llk.hpp"
#include "lwb/metamodel.hpp"

namespace lwb {

class LanguageComponent;
using ComponentPtr = std::shared_ptr<const LanguageComponent>;

/// A named set of attributes the start node of an embedded language must
/// carry. Stands in for a handwritten interface type.
struct Contract {
  std::string name;
  std::vector<std::string> requiredAttrs;
};

struct SelectionRule {
  enum class Kind { fixed, by_attribute, by_first_token };

  Kind kind = Kind::fixed;
  /// by_attribute: attribute of the enclosing node, already parsed.
  std::string attribute;
  /// Attribute value (by_attribute) or token kind / terminal text
  /// (by_first_token) to candidate index.
  std::map<std::string, std::size_t> cases;
  /// Candidate used when no case matches.
  std::optional<std::size_t> otherwise;
};

const char* to_string(SelectionRule::Kind k);

struct EmbeddingCandidate {
  ComponentPtr component;
  std::string start;
};

struct EmbeddingBinding {
  std::string externalNT;
  std::vector<EmbeddingCandidate> candidates;
  SelectionRule selection;
  std::optional<Contract> contract;
};

enum class SymbolScheme { flat, hierarchical };

/// How names are looked up for association links.
struct ResolverConfig {
  SymbolScheme scheme = SymbolScheme::flat;
  /// Per type: the attribute carrying the name (default `name`).
  std::map<std::string, std::string> keyAttr;
  /// Per association: the source attribute holding the referenced name
  /// (default `<role>Name`, then `<targetType>Name`).
  std::map<std::string, std::string> sourceKey;
};

/// A deployable language: linked grammar, lexer, metamodel, decision table
/// and the bindings of its external nonterminals. Immutable once built and
/// shared through ComponentPtr.
class LanguageComponent {
 public:
  LanguageComponent() = default;
  LanguageComponent(const LanguageComponent&) = delete;
  LanguageComponent& operator=(const LanguageComponent&) = delete;

  std::string name;
  LinkedGrammar grammar;
  LexerSpec lexer;
  Metamodel metamodel;
  /// Points into `grammar`.
  DecisionTable decisions;
  int k = 3;
  std::vector<std::string> startRules;
  std::map<std::string, EmbeddingBinding> embeddings;
  ResolverConfig resolver;
  /// Warnings collected while building.
  Diagnostics buildNotes;

  const std::string& language() const { return grammar.qualifiedName; }
  const std::string& default_start() const { return startRules.front(); }

  /// External nonterminals reachable from the start rules.
  std::vector<std::string> reachable_externals() const;
};

/// Grammar inheritance. `available` maps qualified grammar names to parsed
/// grammars and must contain every transitive supergrammar of `root`.
Result<LinkedGrammar> link_inheritance(const GrammarDef& root, const std::map<std::string, GrammarDef>& available);

struct ComponentOptions {
  std::string name;
  std::vector<std::string> startRules;
  /// Overrides the grammar's lookahead when positive.
  int k = 0;
  std::shared_ptr<const ConverterRegistry> converters;
  ResolverConfig resolver;
};

/// Derives lexer, metamodel and decision table. Left recursion and any error
/// in the grammar make this fail.
Result<ComponentPtr> build_component(LinkedGrammar grammar, ComponentOptions options);

/// New component equal to `host` with the given external nonterminals bound.
Result<ComponentPtr> bind_embedding(const ComponentPtr& host, const std::vector<EmbeddingBinding>& bindings);

/// Whole-composition checks before parsing.
Diagnostics compose_check(const LanguageComponent& c);

/// Deterministic text form of a component's own definition (embedded
/// components are referenced by name only).
std::string serialize_artifact(const LanguageComponent& c);
std::uint64_t fnv1a64(std::string_view data);

/// Content-addressed store of component artifacts: `<dir>/<name>-<hash>.lwc`.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  struct Entry {
    std::filesystem::path path;
    std::uint64_t hash = 0;
    bool written = false;
  };
  /// Writes the artifact unless an identical one is already stored.
  Entry store(const LanguageComponent& c) const;

 private:
  std::filesystem::path dir_;
};

/// Composition configuration file.
struct ComponentSpec {
  std::string name;
  std::vector<std::string> grammars;  // first one is the component grammar
  std::vector<std::string> start;
  std::vector<std::string> extensions;
  std::vector<std::string> keywords;
  int k = 0;
  ResolverConfig resolver;
};

struct EmbeddingSpec {
  std::string host;
  std::string external;
  std::vector<std::pair<std::string, std::string>> candidates;  // component, start
  SelectionRule selection;
  std::optional<Contract> contract;
};

struct ToolSection {
  std::vector<std::string> units;
  std::vector<std::string> modelPath;
  std::string outputRoot = "out";
  bool dryRun = false;
  bool strictLinks = false;
  std::vector<std::string> attributeMaps;
};

struct CompositionConfig {
  std::filesystem::path baseDir;
  std::vector<ComponentSpec> components;
  std::vector<EmbeddingSpec> embeddings;
  ToolSection tool;
};

Result<CompositionConfig> parse_composition_config(std::string_view json, const std::filesystem::path& baseDir);
Result<CompositionConfig> load_composition_config(const std::filesystem::path& file);

/// Every component of a configuration, embeddings bound.
struct Composition {
  CompositionConfig config;
  std::map<std::string, ComponentPtr> components;
  std::map<std::string, GrammarDef> grammars;

  ComponentPtr find(std::string_view name) const;
};

Result<Composition> compose(const CompositionConfig& config, std::shared_ptr<const ConverterRegistry> converters = nullptr);

/// Reads and parses a grammar file.
Result<GrammarDef> load_grammar_file(const std::filesystem::path& file);

}  // namespace lwb
