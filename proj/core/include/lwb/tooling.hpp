#pragma once

#include <any>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lwb/attributes.hpp"
#include "lwb/component.hpp"
#include "lwb/parser.hpp"
#include "lwb/symbols.hpp"

namespace lwb {

/// One input model and everything the execution units learn about it.
struct RootObject {
  std::filesystem::path sourceFile;
  std::string text;
  ComponentPtr component;
  std::string start;
  /// Package and model name once parsed (`a.b` and `C` for a.b.C).
  std::string package;
  std::string name;
  ParseResult parse;
  /// Results of execution units, by key.
  std::map<std::string, std::any> annotations;
  Diagnostics diags;
  /// Loaded through an import rather than given as input.
  bool imported = false;

  AstNode* root() const { return parse.root(); }
  std::string qualified_name() const { return package.empty() ? name : package + "." + name; }
};
using RootPtr = std::shared_ptr<RootObject>;

struct FactoryRoute {
  ComponentPtr component;
  std::string start;  // empty: component default
};

/// Picks the language of an input by file extension, else by its first
/// keyword.
class RootFactory {
 public:
  void add_extension(std::string ext, FactoryRoute r);
  void add_keyword(std::string keyword, FactoryRoute r);
  void set_default(FactoryRoute r) { default_ = std::move(r); }

  std::optional<FactoryRoute> route(const std::filesystem::path& file, std::string_view text) const;
  /// Reads the file and routes it; the AST is left to the parse unit.
  RootPtr create(const std::filesystem::path& file, Diagnostics& diags) const;
  std::vector<std::string> extensions() const;

 private:
  std::map<std::string, FactoryRoute> byExt_;
  std::map<std::string, FactoryRoute> byKeyword_;
  std::optional<FactoryRoute> default_;
};

struct ToolConfig {
  RootFactory factory;
  std::vector<std::string> units{"parse"};
  std::vector<std::filesystem::path> modelPath;
  std::filesystem::path outputRoot = "out";
  bool dryRun = false;
  /// Unresolved links are errors instead of warnings.
  bool strictLinks = false;
  std::shared_ptr<const CalculatorRegistry> calculators;
  /// Attributes the eval-attrs unit computes at every root.
  std::vector<std::string> evalAttributes;
};

/// `path` relative to (or inside) `outputRoot`. Writes only when the file is
/// missing or differs. Returns whether the disk was touched.
Result<bool> write_output(const std::filesystem::path& path, std::string_view content, const ToolConfig& config);

/// Finds models by qualified name on the model path and caches them.
class ModelLoader {
 public:
  explicit ModelLoader(const ToolConfig& config) : config_(config) {}

  /// Loads `a.b.C` from `<dir>/a/b/C.<ext>`, then its imports.
  RootPtr load(const std::string& qualifiedName, Diagnostics& diags, const SourcePos& from = {});
  /// Makes an input model visible to imports under its qualified name.
  void remember(const RootPtr& root);
  /// Loads the imports of an already parsed root.
  void load_imports(RootObject& root, Diagnostics& diags);

  std::size_t files_read() const { return filesRead_; }
  const std::map<std::string, RootPtr>& cache() const { return cache_; }

 private:
  const ToolConfig& config_;
  std::map<std::string, RootPtr> cache_;
  std::size_t filesRead_ = 0;
};

Result<RootPtr> load_model(const std::string& qualifiedName, const ToolConfig& config);

/// Parses a root in place. For compile units, also checks that the package
/// matches the directory (or `expectedPackage` when given) and the model name
/// matches the file name.
void parse_root(RootObject& root, const std::string* expectedPackage = nullptr);

struct ToolContext {
  const ToolConfig& config;
  std::vector<RootPtr> roots;
  ModelLoader loader;
  Diagnostics diags;
  std::vector<std::filesystem::path> written;

  explicit ToolContext(const ToolConfig& c) : config(c), loader(c) {}
  /// Inputs followed by imported models.
  std::vector<RootPtr> all_roots() const;
  Result<bool> write(const std::filesystem::path& rel, std::string_view content);
};

using ExecutionUnit = std::function<void(ToolContext&)>;

class UnitRegistry {
 public:
  void add(std::string key, ExecutionUnit u) { units_[std::move(key)] = std::move(u); }
  const ExecutionUnit* find(std::string_view key) const;
  std::vector<std::string> keys() const;

  /// parse, link, check-constraints, eval-attrs, pretty-print, emit-json.
  static UnitRegistry with_builtins();

 private:
  std::map<std::string, ExecutionUnit, std::less<>> units_;
};

struct WorkflowReport {
  int exitStatus = 0;
  Diagnostics diags;
  std::vector<RootPtr> roots;
  std::vector<std::filesystem::path> written;
};

WorkflowReport run_workflow(const ToolConfig& config, const std::vector<std::filesystem::path>& inputs,
                            const UnitRegistry& units = UnitRegistry::with_builtins());

/// Tool configuration from a composition: routes by the configured
/// extensions and keywords, units and paths from the `tool` section.
ToolConfig tool_config_from(const Composition& comp);

/// Metamodel of the component that produced a node, searching embedded
/// components too.
const Metamodel* metamodel_for(const LanguageComponent& c, const std::string& language);
/// Grammar lineage of a language within a component and its embeddings.
std::vector<std::string> lineage_for(const LanguageComponent& c, const std::string& language);

}  // namespace lwb
