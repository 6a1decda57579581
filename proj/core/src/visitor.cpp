#include "lwb/visitor.hpp"

namespace lwb {

VisitorUnit& VisitorUnit::on_visit(const std::string& type, Handler h) {
  auto& e = handlers_[type];
  if (e.ownVisit) throw std::invalid_argument("visitor '" + name_ + "' already has ownVisit for " + type);
  e.visit = std::move(h);
  return *this;
}

VisitorUnit& VisitorUnit::on_end_visit(const std::string& type, Handler h) {
  handlers_[type].endVisit = std::move(h);
  return *this;
}

VisitorUnit& VisitorUnit::on_own_visit(const std::string& type, Handler h) {
  auto& e = handlers_[type];
  if (e.visit) throw std::invalid_argument("visitor '" + name_ + "' already has visit for " + type);
  e.ownVisit = std::move(h);
  return *this;
}

TraversalError::TraversalError(SourcePos pos, const std::string& what)
    : std::runtime_error(pos.file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what),
      pos_(std::move(pos)) {}

class Traversal {
 public:
  Traversal(const std::vector<VisitorUnit>& units, const MetamodelLookup& lookup) : units_(units), lookup_(lookup) {
    ctl_.engine_ = this;
  }

  bool run(AstNode& root) {
    walk(root);
    return !ctl_.failed_;
  }

  void walk(AstNode& n) {
    if (ctl_.stopped_) return;
    const auto& chain = chain_of(n);
    bool savedSkip = ctl_.skipChildren_;
    ctl_.skipChildren_ = false;
    bool skip = false;
    for (const auto& u : units_) {
      // Most specific type with a pre-order handler.
      for (const auto& t : chain) {
        auto it = u.handlers().find(t);
        if (it == u.handlers().end()) continue;
        if (it->second.ownVisit) {
          call(it->second.ownVisit, n);
          skip = true;
          break;
        }
        if (it->second.visit) {
          call(it->second.visit, n);
          break;
        }
      }
      if (ctl_.stopped_) return;
    }
    skip = skip || ctl_.skipChildren_;
    ctl_.skipChildren_ = savedSkip;
    if (!skip)
      for (AstNode* c : n.all_children()) {
        walk(*c);
        if (ctl_.stopped_) return;
      }
    for (const auto& u : units_) {
      for (const auto& t : chain) {
        auto it = u.handlers().find(t);
        if (it != u.handlers().end() && it->second.endVisit) {
          call(it->second.endVisit, n);
          break;
        }
      }
      if (ctl_.stopped_) return;
    }
  }

 private:
  const std::vector<std::string>& chain_of(const AstNode& n) {
    const Metamodel* m = lookup_ ? lookup_(n) : nullptr;
    auto [it, fresh] = chains_.try_emplace({m, n.type});
    if (fresh) it->second = m && m->has_type(n.type) ? m->dispatch_chain(n.type) : std::vector<std::string>{n.type};
    return it->second;
  }

  void call(const Handler& h, AstNode& n) {
    try {
      h(n, ctl_);
    } catch (const TraversalError&) {
      throw;
    } catch (const std::exception& e) {
      throw TraversalError(n.pos, std::string("in handler for ") + n.type + ": " + e.what());
    }
  }

  const std::vector<VisitorUnit>& units_;
  const MetamodelLookup& lookup_;
  TraversalControl ctl_;
  std::map<std::pair<const Metamodel*, std::string>, std::vector<std::string>> chains_;
};

void TraversalControl::startTraverse(AstNode& n) {
  if (engine_) engine_->walk(n);
}

bool VisitorSet::traverse(AstNode& root, const Metamodel* m) const {
  MetamodelLookup lookup;
  if (m) lookup = [m](const AstNode&) { return m; };
  return traverse(root, lookup);
}

bool VisitorSet::traverse(AstNode& root, const MetamodelLookup& lookup) const {
  Traversal t(units_, lookup);
  return t.run(root);
}

}  // namespace lwb
