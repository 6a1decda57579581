#include "shop/shop_attributes.hpp"

namespace lwb::shop {

namespace {

double discount_of(const AstNode& order) {
  auto it = order.links.find("orderingClient");
  if (it == order.links.end() || it->second.empty()) return 0;
  Value d = it->second.front()->get("discount");
  if (std::holds_alternative<std::int64_t>(d) || std::holds_alternative<double>(d)) return as_number(d);
  return 0;
}

Value order_outstanding(AstNode& order, AttributeEvaluator&) {
  // discount is a percentage; divided as a real number
  return as_number(order.get("amount")) * (1.0 - discount_of(order) / 100.0);
}

}  // namespace

Calculation outstanding_calculation() {
  Calculation c;
  c.key = kOutstanding;
  c.on("OrderCash", order_outstanding);
  c.on("OrderCreditcard", order_outstanding);
  c.on("ShopSystem", [](AstNode& s, AttributeEvaluator& ev) -> Value {
    double f = 0;
    for (AstNode* o : s.children("order")) f += as_number(ev.get(*o, "outstanding"));
    return f;
  });
  return c;
}

Calculation sum_calculation() {
  Calculation c;
  c.key = kSum;
  c.on("Entry", [](AstNode& e, AttributeEvaluator&) -> Value { return as_number(e.get("amount")); });
  c.on("Ledger", [](AstNode& l, AttributeEvaluator& ev) -> Value {
    double f = 0;
    for (AstNode* e : l.children("entry")) f += as_number(ev.get(*e, "sum"));
    return f;
  });
  return c;
}

std::shared_ptr<CalculatorRegistry> shop_registry(const Composition& comp, const std::vector<VirtualAttributeMap>& maps,
                                                  Diagnostics& diags) {
  auto reg = std::make_shared<CalculatorRegistry>();
  for (const auto& [_, c] : comp.components) reg->declare_all(c->grammar);
  reg->add(outstanding_calculation());
  reg->add(sum_calculation());
  for (const auto& m : maps) diags.append(register_virtual(m, *reg));
  for (const auto& [_, c] : comp.components)
    for (const auto& d : c->grammar.attributeDecls) {
      if (reg->binding(d.owningGrammar, d.name)) continue;
      if (d.name == "outstanding") diags.append(reg->bind(d.owningGrammar, d.name, kOutstanding));
      if (d.name == "sum") diags.append(reg->bind(d.owningGrammar, d.name, kSum));
    }
  return reg;
}

}  // namespace lwb::shop
