#include <json.hpp>

#include "lwb/metamodel.hpp"

namespace lwb {

using ojson = nlohmann::ordered_json;

namespace {

ojson card_json(int v) { return v < 0 ? ojson("*") : ojson(v); }

int card_from(const ojson& j) { return j.is_string() ? -1 : j.get<int>(); }

ojson attr_json(const AttrDef& a) {
  ojson j;
  j["name"] = a.name;
  j["kind"] = to_string(a.kind);
  if (a.kind == AttrDef::Kind::composition) j["target"] = a.target;
  if (a.kind == AttrDef::Kind::token) {
    j["token"] = a.target;
    j["valueType"] = a.valueType;
  }
  if (!a.values.empty()) j["values"] = a.values;
  j["min"] = a.minOccurs;
  j["max"] = card_json(a.maxOccurs);
  return j;
}

AttrDef attr_from(const ojson& j) {
  AttrDef a;
  a.name = j.at("name").get<std::string>();
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "composition") {
    a.kind = AttrDef::Kind::composition;
    a.target = j.at("target").get<std::string>();
  } else if (kind == "token") {
    a.kind = AttrDef::Kind::token;
    a.target = j.value("token", "");
    a.valueType = j.value("valueType", "string");
  } else if (kind == "boolean") {
    a.kind = AttrDef::Kind::boolean_constant;
  } else if (kind == "enum") {
    a.kind = AttrDef::Kind::enum_constant;
  } else {
    throw std::runtime_error("unknown attribute kind '" + kind + "'");
  }
  if (j.contains("values")) a.values = j["values"].get<std::vector<std::string>>();
  a.minOccurs = j.at("min").get<int>();
  a.maxOccurs = card_from(j.at("max"));
  return a;
}

ojson range_json(const CardRange& c) {
  ojson j;
  switch (c.kind) {
    case CardRange::Kind::exactly_one: j["kind"] = "one"; break;
    case CardRange::Kind::unbounded: j["kind"] = "many"; break;
    case CardRange::Kind::range:
      j["kind"] = "range";
      j["lo"] = c.lo;
      j["hi"] = card_json(c.hi);
      break;
  }
  return j;
}

CardRange range_from(const ojson& j) {
  std::string k = j.at("kind").get<std::string>();
  if (k == "one") return CardRange::one();
  if (k == "many") return CardRange::many();
  return CardRange::between(j.at("lo").get<int>(), card_from(j.at("hi")));
}

std::string dot_id(const std::string& s) { return "\"" + s + "\""; }

std::string dot_card(int min, int max) {
  if (max < 0) return min == 0 ? "*" : std::to_string(min) + "..*";
  if (min == max) return std::to_string(min);
  return std::to_string(min) + ".." + std::to_string(max);
}

}  // namespace

std::string emit_metamodel_report(const Metamodel& m, ReportFormat format) {
  if (format == ReportFormat::json) {
    ojson j;
    j["types"] = ojson::array();
    for (const auto& t : m.nodeTypes) {
      ojson tj;
      tj["name"] = t.name;
      tj["superType"] = t.superType.empty() ? ojson(nullptr) : ojson(t.superType);
      tj["interfaces"] = t.implementedInterfaces;
      tj["abstract"] = t.isAbstract;
      tj["grammar"] = t.sourceGrammar;
      tj["attributes"] = ojson::array();
      for (const auto& a : t.attributes) tj["attributes"].push_back(attr_json(a));
      if (!t.exclusive.empty()) tj["exclusive"] = t.exclusive;
      j["types"].push_back(std::move(tj));
    }
    j["interfaces"] = ojson::array();
    for (const auto& i : m.interfaces) {
      ojson ij;
      ij["name"] = i.name;
      ij["extends"] = i.extendsList;
      ij["external"] = i.external;
      if (!i.requiredContract.empty()) ij["contract"] = i.requiredContract;
      ij["grammar"] = i.sourceGrammar;
      ij["attributes"] = ojson::array();
      for (const auto& a : i.declaredAttributes) ij["attributes"].push_back(attr_json(a));
      j["interfaces"].push_back(std::move(ij));
    }
    j["associations"] = ojson::array();
    for (const auto& a : m.associations) {
      ojson aj;
      aj["name"] = a.name;
      aj["source"] = a.source;
      aj["target"] = a.target;
      aj["sourceRole"] = a.sourceRole;
      aj["targetRole"] = a.targetRole;
      aj["sourceCard"] = range_json(a.sourceCard);
      aj["targetCard"] = range_json(a.targetCard);
      aj["directed"] = a.directed;
      j["associations"].push_back(std::move(aj));
    }
    return j.dump(2) + "\n";
  }

  std::string out = "digraph metamodel {\n  node [shape=record];\n";
  for (const auto& t : m.nodeTypes) {
    out += "  " + dot_id(t.name) + " [label=\"{" + (t.isAbstract ? std::string("\\<\\<abstract\\>\\> ") : "") +
           t.name + "|";
    for (const auto& a : t.attributes)
      if (a.kind != AttrDef::Kind::composition)
        out += a.name + " : " + (a.kind == AttrDef::Kind::token ? a.valueType : to_string(a.kind)) + "[" +
               dot_card(a.minOccurs, a.maxOccurs) + "]\\l";
    out += "}\"];\n";
  }
  for (const auto& i : m.interfaces) {
    out += "  " + dot_id(i.name) + " [label=\"{\\<\\<" + (i.external ? "external" : "interface") + "\\>\\> " +
           i.name + "|";
    for (const auto& a : i.declaredAttributes) out += a.name + "\\l";
    out += "}\"];\n";
  }
  for (const auto& t : m.nodeTypes) {
    if (!t.superType.empty())
      out += "  " + dot_id(t.name) + " -> " + dot_id(t.superType) + " [arrowhead=empty];\n";
    for (const auto& i : t.implementedInterfaces)
      out += "  " + dot_id(t.name) + " -> " + dot_id(i) + " [arrowhead=empty, style=dashed];\n";
    for (const auto& a : t.attributes)
      if (a.kind == AttrDef::Kind::composition)
        out += "  " + dot_id(t.name) + " -> " + dot_id(a.target) + " [arrowtail=diamond, dir=both, label=\"" +
               a.name + " " + dot_card(a.minOccurs, a.maxOccurs) + "\"];\n";
  }
  for (const auto& i : m.interfaces)
    for (const auto& e : i.extendsList)
      out += "  " + dot_id(i.name) + " -> " + dot_id(e) + " [arrowhead=empty];\n";
  for (const auto& a : m.associations)
    out += "  " + dot_id(a.source) + " -> " + dot_id(a.target) + " [style=bold, arrowhead=" +
           (a.directed ? "open" : "none") + ", label=\"" + a.name + "\", taillabel=\"" + a.targetRole + " " +
           a.sourceCard.to_string() + "\", headlabel=\"" + a.sourceRole + " " + a.targetCard.to_string() + "\"];\n";
  out += "}\n";
  return out;
}

Result<Metamodel> metamodel_from_json(std::string_view text) {
  Result<Metamodel> r;
  try {
    ojson j = ojson::parse(text);
    Metamodel m;
    for (const auto& tj : j.at("types")) {
      NodeTypeDef t;
      t.name = tj.at("name").get<std::string>();
      if (!tj.at("superType").is_null()) t.superType = tj["superType"].get<std::string>();
      t.implementedInterfaces = tj.at("interfaces").get<std::vector<std::string>>();
      t.isAbstract = tj.at("abstract").get<bool>();
      t.sourceGrammar = tj.value("grammar", "");
      for (const auto& aj : tj.at("attributes")) t.attributes.push_back(attr_from(aj));
      if (tj.contains("exclusive")) t.exclusive = tj["exclusive"].get<decltype(t.exclusive)>();
      m.nodeTypes.push_back(std::move(t));
    }
    for (const auto& ij : j.at("interfaces")) {
      InterfaceDef i;
      i.name = ij.at("name").get<std::string>();
      i.extendsList = ij.at("extends").get<std::vector<std::string>>();
      i.external = ij.value("external", false);
      i.requiredContract = ij.value("contract", "");
      i.sourceGrammar = ij.value("grammar", "");
      for (const auto& aj : ij.at("attributes")) i.declaredAttributes.push_back(attr_from(aj));
      m.interfaces.push_back(std::move(i));
    }
    for (const auto& aj : j.at("associations")) {
      AssocEdge a;
      a.name = aj.at("name").get<std::string>();
      a.source = aj.at("source").get<std::string>();
      a.target = aj.at("target").get<std::string>();
      a.sourceRole = aj.at("sourceRole").get<std::string>();
      a.targetRole = aj.at("targetRole").get<std::string>();
      a.sourceCard = range_from(aj.at("sourceCard"));
      a.targetCard = range_from(aj.at("targetCard"));
      a.directed = aj.at("directed").get<bool>();
      m.associations.push_back(std::move(a));
    }
    r.value = std::move(m);
  } catch (const std::exception& e) {
    r.diags.error({}, std::string("malformed metamodel document: ") + e.what());
  }
  return r;
}

}  // namespace lwb
