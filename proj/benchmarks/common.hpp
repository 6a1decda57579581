#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

#include "lwb/component.hpp"

namespace bench {

inline lwb::ComponentPtr shop_component() {
  auto g = lwb::load_grammar_file(std::string(LWB_SAMPLES_DIR) + "/grammars/ShopAssoc.mcg");
  if (!g.ok()) std::abort();
  auto c = lwb::build_component(lwb::link_single(*g), {});
  if (!c.ok()) std::abort();
  return *c;
}

inline std::string shop_model(int clients, int orders) {
  std::string s = "Shop";
  for (int i = 0; i < clients; ++i) s += " client C" + std::to_string(i);
  for (int i = 0; i < orders; ++i)
    s += std::string(i % 2 ? " cashorder C" : " creditorder C") + std::to_string(i % clients) + " " + std::to_string(i);
  return s;
}

}  // namespace bench
