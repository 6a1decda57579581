#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lwb/grammar.hpp"

namespace lwb::acceptance {

/// Random sentences of a grammar, read straight from its definition.
/// Subrules (`extends`/`implements`) count as extra alternatives; past
/// `maxDepth` the generator takes the shallowest way out.
class SentenceGenerator {
 public:
  SentenceGenerator(std::vector<const GrammarDef*> grammars, std::set<std::string> reserved, unsigned seed,
                    int maxDepth = 4);

  std::string sentence(const std::string& start);

 private:
  std::vector<const ProductionDef*> alternatives(const std::string& name) const;
  int height(const BodyElement& e) const;
  void production(const std::string& name, int depth, std::vector<std::string>& out);
  void element(const BodyElement& e, int depth, std::vector<std::string>& out);
  void once(const BodyElement& e, int depth, std::vector<std::string>& out);
  std::string token(const std::string& kind);
  int pick(int n);

  std::map<std::string, const ProductionDef*> prods_;
  std::map<std::string, int> height_;
  std::set<std::string> reserved_;
  std::mt19937 rng_;
  int maxDepth_;
};

}  // namespace lwb::acceptance
