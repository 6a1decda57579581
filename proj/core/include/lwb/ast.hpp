#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/diagnostics.hpp"
#include "lwb/metamodel.hpp"
#include "lwb/value.hpp"

namespace lwb {

struct AstNode;

/// One attribute of a node. Scalar attributes use `values`, compositions use
/// `children`; single-valued slots hold at most one entry.
struct Slot {
  std::string name;
  bool composition = false;
  bool list = false;
  std::vector<Value> values;
  std::vector<AstNode*> children;

  bool empty() const { return values.empty() && children.empty(); }
  std::size_t size() const { return composition ? children.size() : values.size(); }
};

struct AstNode {
  std::string type;
  /// Qualified name of the grammar whose component produced the node.
  std::string language;
  int id = 0;
  SourcePos pos;
  std::size_t offset = 0;
  std::vector<Slot> slots;
  /// Association links by role name, filled after parsing.
  std::map<std::string, std::vector<AstNode*>, std::less<>> links;
  AstNode* parent = nullptr;

  Slot* slot(std::string_view name);
  const Slot* slot(std::string_view name) const;
  Slot& ensure_slot(std::string_view name, bool composition, bool list);

  /// First value of a scalar slot, or monostate.
  Value get(std::string_view name) const;
  /// Sole child of a composition slot, or null.
  AstNode* child(std::string_view name) const;
  const std::vector<AstNode*>& children(std::string_view name) const;

  void set(std::string_view name, Value v);
  void add_child(std::string_view name, AstNode* c, bool list = true);

  /// Composition children in slot order, then list order.
  std::vector<AstNode*> all_children() const;
};

/// Owns the nodes of one or more trees.
class Ast {
 public:
  Ast() = default;
  Ast(const Ast&) = delete;
  Ast& operator=(const Ast&) = delete;
  Ast(Ast&&) = default;
  Ast& operator=(Ast&&) = default;

  AstNode* create(std::string type, SourcePos pos = {});

  AstNode* root() const { return root_; }
  void set_root(AstNode* r) { root_ = r; }

  /// Sets parent pointers and numbers the nodes reachable from the root in
  /// preorder, starting at 1. Unreachable nodes are released.
  void finalize();

  std::size_t size() const { return nodes_.size(); }

  /// Pre-order list of the composition tree below `root`.
  static std::vector<AstNode*> preorder(AstNode* root);

 private:
  std::vector<std::unique_ptr<AstNode>> nodes_;
  AstNode* root_ = nullptr;
};

/// Empty slots for every declared attribute of `type`, in declaration order.
void init_slots(AstNode& n, const Metamodel& m);

/// Deterministic JSON document. Links are emitted as `{"$ref": id}`.
std::string to_json(const AstNode& root, int indent = 2);
Result<Ast> ast_from_json(std::string_view json);

/// Equality ignoring ids, positions and links. `typeEq` decides whether two
/// type names match (default: identical).
bool structurally_equal(const AstNode& a, const AstNode& b,
                        const std::function<bool(const std::string&, const std::string&)>& typeEq = {});

/// Checks a tree against the metamodel: known concrete types, declared
/// attributes, cardinalities, composition targets, exclusivity groups and the
/// single-parent property. Lower bounds of inherited attributes are not
/// enforced on subtypes. Nodes of another language are checked against
/// `other(language)` when given and skipped otherwise.
Diagnostics check_conformance(const AstNode& root, const Metamodel& m,
                              const std::function<const Metamodel*(const std::string&)>& other = {});

}  // namespace lwb
