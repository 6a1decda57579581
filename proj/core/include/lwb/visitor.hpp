#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/ast.hpp"
#include "lwb/metamodel.hpp"

namespace lwb {

class Traversal;

/// Handed to every handler; steers the running traversal.
class TraversalControl {
 public:
  /// Marks the run as failed. Sticky; the walk goes on.
  void fail() { failed_ = true; }
  /// Ends the whole run after the current handler.
  void stopTraverse() { stopped_ = true; }
  /// Skips the children of the node being visited.
  void stopTraverseChildren() { skipChildren_ = true; }
  /// Walks `n` (and its subtree) right now with all units.
  void startTraverse(AstNode& n);

  bool failed() const { return failed_; }
  bool stopped() const { return stopped_; }

 private:
  friend class Traversal;
  Traversal* engine_ = nullptr;
  bool failed_ = false;
  bool stopped_ = false;
  bool skipChildren_ = false;
};

using Handler = std::function<void(AstNode&, TraversalControl&)>;

struct Handlers {
  Handler visit;
  Handler endVisit;
  /// Like visit, but the children are not traversed.
  Handler ownVisit;
};

/// One concrete visitor: handlers by node type name.
class VisitorUnit {
 public:
  explicit VisitorUnit(std::string name = {}) : name_(std::move(name)) {}

  VisitorUnit& on_visit(const std::string& type, Handler h);
  VisitorUnit& on_end_visit(const std::string& type, Handler h);
  VisitorUnit& on_own_visit(const std::string& type, Handler h);

  const std::string& name() const { return name_; }
  const std::map<std::string, Handlers, std::less<>>& handlers() const { return handlers_; }

 private:
  std::string name_;
  std::map<std::string, Handlers, std::less<>> handlers_;
};

/// Handler failure, with the position of the node being visited.
class TraversalError : public std::runtime_error {
 public:
  TraversalError(SourcePos pos, const std::string& what);
  const SourcePos& pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Metamodel of a node's language; null falls back to the exact type name.
using MetamodelLookup = std::function<const Metamodel*(const AstNode&)>;

/// Ordered visitor units combined into one traversal.
class VisitorSet {
 public:
  VisitorSet& add(VisitorUnit u) {
    units_.push_back(std::move(u));
    return *this;
  }
  std::size_t size() const { return units_.size(); }

  /// Preorder run along the composition tree. Returns false iff some handler
  /// called fail().
  bool traverse(AstNode& root, const Metamodel* m = nullptr) const;
  bool traverse(AstNode& root, const MetamodelLookup& lookup) const;

 private:
  std::vector<VisitorUnit> units_;
};

}  // namespace lwb
