#pragma once

#include <memory>
#include <vector>

#include "lwb/attributes.hpp"
#include "lwb/component.hpp"

namespace lwb::shop {

inline constexpr const char* kOutstanding = "mc.examples.shopsystem.OutstandingCalculation";
inline constexpr const char* kSum = "mc.examples.shop2.SumCalculation";

/// Outstanding amount of orders and shops. Orders read the discount of the
/// linked client, so links must be established first.
Calculation outstanding_calculation();
/// Sum over the entries of a ledger.
Calculation sum_calculation();

/// Registry with both calculations and the declarations of every grammar in
/// the composition. Virtual maps are registered as given; attributes named
/// `outstanding` or `sum` not covered by a map are bound directly.
std::shared_ptr<CalculatorRegistry> shop_registry(const Composition& comp, const std::vector<VirtualAttributeMap>& maps,
                                                  Diagnostics& diags);

}  // namespace lwb::shop
