#include "lwb/ast.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <unordered_map>

namespace lwb {

using ojson = nlohmann::ordered_json;

Slot* AstNode::slot(std::string_view name) {
  for (auto& s : slots)
    if (s.name == name) return &s;
  return nullptr;
}

const Slot* AstNode::slot(std::string_view name) const {
  for (const auto& s : slots)
    if (s.name == name) return &s;
  return nullptr;
}

Slot& AstNode::ensure_slot(std::string_view name, bool composition, bool list) {
  if (Slot* s = slot(name)) return *s;
  Slot s;
  s.name = std::string(name);
  s.composition = composition;
  s.list = list;
  slots.push_back(std::move(s));
  return slots.back();
}

Value AstNode::get(std::string_view name) const {
  const Slot* s = slot(name);
  return s && !s->values.empty() ? s->values.front() : Value{};
}

AstNode* AstNode::child(std::string_view name) const {
  const Slot* s = slot(name);
  return s && !s->children.empty() ? s->children.front() : nullptr;
}

const std::vector<AstNode*>& AstNode::children(std::string_view name) const {
  static const std::vector<AstNode*> none;
  const Slot* s = slot(name);
  return s ? s->children : none;
}

void AstNode::set(std::string_view name, Value v) {
  Slot& s = ensure_slot(name, false, false);
  if (s.list) {
    s.values.push_back(std::move(v));
  } else {
    s.values.assign(1, std::move(v));
  }
}

void AstNode::add_child(std::string_view name, AstNode* c, bool list) {
  Slot& s = ensure_slot(name, true, list);
  if (s.list)
    s.children.push_back(c);
  else
    s.children.assign(1, c);
}

std::vector<AstNode*> AstNode::all_children() const {
  std::vector<AstNode*> out;
  for (const auto& s : slots)
    if (s.composition) out.insert(out.end(), s.children.begin(), s.children.end());
  return out;
}

AstNode* Ast::create(std::string type, SourcePos pos) {
  auto n = std::make_unique<AstNode>();
  n->type = std::move(type);
  n->pos = std::move(pos);
  nodes_.push_back(std::move(n));
  return nodes_.back().get();
}

std::vector<AstNode*> Ast::preorder(AstNode* root) {
  std::vector<AstNode*> out;
  if (!root) return out;
  std::vector<AstNode*> stack{root};
  while (!stack.empty()) {
    AstNode* n = stack.back();
    stack.pop_back();
    out.push_back(n);
    auto kids = n->all_children();
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

void Ast::finalize() {
  auto order = preorder(root_);
  std::unordered_map<const AstNode*, bool> keep;
  int id = 0;
  for (AstNode* n : order) {
    n->id = ++id;
    keep[n] = true;
    for (AstNode* c : n->all_children()) c->parent = n;
  }
  if (root_) root_->parent = nullptr;
  std::erase_if(nodes_, [&](const std::unique_ptr<AstNode>& n) { return !keep.count(n.get()); });
  // Keep storage in preorder so iteration over the arena is deterministic.
  std::unordered_map<const AstNode*, int> rank;
  for (const auto& n : nodes_) rank[n.get()] = n->id;
  std::sort(nodes_.begin(), nodes_.end(),
            [&](const auto& a, const auto& b) { return rank[a.get()] < rank[b.get()]; });
}

void init_slots(AstNode& n, const Metamodel& m) {
  for (const auto& a : m.all_attributes(n.type)) {
    Slot& s = n.ensure_slot(a.name, a.kind == AttrDef::Kind::composition, a.is_list());
    if (a.kind == AttrDef::Kind::boolean_constant && s.values.empty()) s.values.push_back(false);
  }
}

namespace {

ojson value_json(const Value& v) {
  struct Visitor {
    ojson operator()(std::monostate) const { return nullptr; }
    ojson operator()(bool b) const { return b; }
    ojson operator()(std::int64_t i) const { return i; }
    ojson operator()(double d) const { return d; }
    ojson operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

Value value_from(const ojson& j) {
  if (j.is_null()) return {};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::runtime_error("unsupported attribute value " + j.dump());
}

ojson node_json(const AstNode& n) {
  ojson j;
  j["type"] = n.type;
  j["id"] = n.id;
  if (!n.language.empty()) j["language"] = n.language;
  j["pos"] = {{"file", n.pos.file}, {"line", n.pos.line}, {"column", n.pos.column}};
  ojson attrs = ojson::object();
  for (const auto& s : n.slots) {
    if (s.composition) {
      if (s.list) {
        ojson arr = ojson::array();
        for (const AstNode* c : s.children) arr.push_back(node_json(*c));
        attrs[s.name] = std::move(arr);
      } else {
        attrs[s.name] = s.children.empty() ? ojson(nullptr) : node_json(*s.children.front());
      }
    } else if (s.list) {
      ojson arr = ojson::array();
      for (const auto& v : s.values) arr.push_back(value_json(v));
      attrs[s.name] = std::move(arr);
    } else {
      attrs[s.name] = s.values.empty() ? ojson(nullptr) : value_json(s.values.front());
    }
  }
  j["attrs"] = std::move(attrs);
  if (!n.links.empty()) {
    ojson links = ojson::object();
    for (const auto& [role, targets] : n.links) {
      if (targets.size() == 1) {
        links[role] = {{"$ref", targets.front()->id}};
      } else {
        ojson arr = ojson::array();
        for (const AstNode* t : targets) arr.push_back({{"$ref", t->id}});
        links[role] = std::move(arr);
      }
    }
    j["links"] = std::move(links);
  }
  return j;
}

struct Loader {
  Ast ast;
  std::unordered_map<int, AstNode*> byId;
  std::vector<std::pair<AstNode*, std::pair<std::string, int>>> pending;

  AstNode* node(const ojson& j) {
    SourcePos pos;
    if (j.contains("pos")) {
      const auto& p = j.at("pos");
      pos = {p.value("file", std::string()), p.value("line", 1), p.value("column", 1)};
    }
    AstNode* n = ast.create(j.at("type").get<std::string>(), pos);
    n->id = j.value("id", 0);
    n->language = j.value("language", std::string());
    if (n->id) byId[n->id] = n;
    for (const auto& [name, v] : j.at("attrs").items()) {
      if (v.is_object()) {
        n->ensure_slot(name, true, false).children.push_back(node(v));
      } else if (v.is_array() && !v.empty() && v.front().is_object()) {
        Slot& s = n->ensure_slot(name, true, true);
        for (const auto& c : v) s.children.push_back(node(c));
      } else if (v.is_array()) {
        Slot& s = n->ensure_slot(name, false, true);
        for (const auto& x : v) s.values.push_back(value_from(x));
      } else if (v.is_null()) {
        n->ensure_slot(name, false, false);
      } else {
        n->ensure_slot(name, false, false).values.push_back(value_from(v));
      }
    }
    if (j.contains("links"))
      for (const auto& [role, v] : j.at("links").items()) {
        n->links[role];
        if (v.is_array())
          for (const auto& r : v) pending.push_back({n, {role, r.at("$ref").get<int>()}});
        else
          pending.push_back({n, {role, v.at("$ref").get<int>()}});
      }
    return n;
  }
};

}  // namespace

std::string to_json(const AstNode& root, int indent) { return node_json(root).dump(indent); }

Result<Ast> ast_from_json(std::string_view text) {
  Result<Ast> r;
  try {
    Loader l;
    AstNode* root = l.node(ojson::parse(text));
    for (auto& [n, ref] : l.pending) {
      auto it = l.byId.find(ref.second);
      if (it == l.byId.end()) throw std::runtime_error("dangling $ref " + std::to_string(ref.second));
      n->links[ref.first].push_back(it->second);
    }
    l.ast.set_root(root);
    for (AstNode* n : Ast::preorder(root))
      for (AstNode* c : n->all_children()) c->parent = n;
    r.value = std::move(l.ast);
  } catch (const std::exception& e) {
    r.diags.error({}, std::string("invalid AST document: ") + e.what());
  }
  return r;
}

bool structurally_equal(const AstNode& a, const AstNode& b,
                        const std::function<bool(const std::string&, const std::string&)>& typeEq) {
  if (typeEq ? !typeEq(a.type, b.type) : a.type != b.type) return false;
  auto populated = [](const AstNode& n) {
    std::vector<const Slot*> out;
    for (const auto& s : n.slots) {
      bool falseFlag = !s.composition && s.values.size() == 1 && s.values.front() == Value{false};
      if (!s.empty() && !falseFlag) out.push_back(&s);
    }
    std::sort(out.begin(), out.end(), [](const Slot* x, const Slot* y) { return x->name < y->name; });
    return out;
  };
  auto sa = populated(a);
  auto sb = populated(b);
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const Slot& x = *sa[i];
    const Slot& y = *sb[i];
    if (x.name != y.name || x.composition != y.composition || x.values != y.values ||
        x.children.size() != y.children.size())
      return false;
    for (std::size_t k = 0; k < x.children.size(); ++k)
      if (!structurally_equal(*x.children[k], *y.children[k], typeEq)) return false;
  }
  return true;
}

Diagnostics check_conformance(const AstNode& root, const Metamodel& m,
                              const std::function<const Metamodel*(const std::string&)>& other) {
  Diagnostics d;
  std::set<const AstNode*> seen;
  std::vector<std::pair<const AstNode*, const Metamodel*>> work{{&root, &m}};
  while (!work.empty()) {
    auto [n, mm] = work.back();
    work.pop_back();
    if (!seen.insert(n).second) {
      d.error(n->pos, "node " + n->type + " has more than one composition parent");
      continue;
    }
    const Metamodel* own = mm;
    if (!n->language.empty() && !root.language.empty() && n->language != root.language) {
      own = other ? other(n->language) : nullptr;
    }
    if (own) {
      const NodeTypeDef* t = own->find_node(n->type);
      if (!t) {
        d.error(n->pos, "unknown or non-instantiable type '" + n->type + "'");
      } else {
        if (t->isAbstract) d.error(n->pos, "instance of abstract type '" + n->type + "'");
        auto attrs = own->all_attributes(n->type);
        for (const auto& s : n->slots)
          if (std::none_of(attrs.begin(), attrs.end(), [&](const AttrDef& a) { return a.name == s.name; }))
            d.error(n->pos, "'" + n->type + "' has no attribute '" + s.name + "'");
        for (const auto& a : attrs) {
          const Slot* s = n->slot(a.name);
          std::size_t count = s ? s->size() : 0;
          if (a.kind == AttrDef::Kind::boolean_constant) {
            if (s && (s->values.size() != 1 || !std::holds_alternative<bool>(s->values.front())))
              d.error(n->pos, "'" + n->type + "." + a.name + "' must hold one boolean");
            continue;
          }
          if (s && !s->empty() && s->composition != (a.kind == AttrDef::Kind::composition))
            d.error(n->pos, "'" + n->type + "." + a.name + "' has the wrong kind");
          // a subtype's own production need not produce what it inherits
          bool inherited = std::none_of(t->attributes.begin(), t->attributes.end(),
                                        [&](const AttrDef& own) { return own.name == a.name; });
          if (!inherited && static_cast<int>(count) < a.minOccurs)
            d.error(n->pos, "'" + n->type + "." + a.name + "' needs at least " + std::to_string(a.minOccurs) +
                                " value(s), has " + std::to_string(count));
          if (a.maxOccurs >= 0 && static_cast<int>(count) > a.maxOccurs)
            d.error(n->pos, "'" + n->type + "." + a.name + "' allows at most " + std::to_string(a.maxOccurs) +
                                " value(s), has " + std::to_string(count));
          if (a.kind == AttrDef::Kind::composition && s)
            for (const AstNode* c : s->children) {
              bool foreign = !c->language.empty() && !n->language.empty() && c->language != n->language;
              if (!foreign && !own->is_subtype(c->type, a.target))
                d.error(c->pos, "'" + c->type + "' is not a " + a.target + " (in " + n->type + "." + a.name + ")");
            }
          if (a.kind == AttrDef::Kind::enum_constant && s)
            for (const auto& v : s->values) {
              const auto* str = std::get_if<std::string>(&v);
              if (!str || std::find(a.values.begin(), a.values.end(), *str) == a.values.end())
                d.error(n->pos, "'" + n->type + "." + a.name + "' holds a value outside its enumeration");
            }
        }
        for (const NodeTypeDef* cur = t; cur;
             cur = cur->superType.empty() ? nullptr : own->find_node(cur->superType))
          for (const auto& group : cur->exclusive) {
            int populated = 0;
            for (const auto& branch : group)
              if (std::any_of(branch.begin(), branch.end(), [&](const std::string& a) {
                    const Slot* s = n->slot(a);
                    return s && !s->empty();
                  }))
                ++populated;
            if (populated > 1)
              d.error(n->pos, "'" + n->type + "' populates more than one exclusive alternative");
          }
      }
    }
    for (const AstNode* c : n->all_children()) work.push_back({c, own});
  }
  return d;
}

}  // namespace lwb
