#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace lwb::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Collects failed expectations; the first few go into the detail line.
class Check {
 public:
  bool expect(bool cond, const std::string& what) {
    if (!cond) {
      ++failures_;
      if (messages_.size() < 5) messages_.push_back(what);
    }
    return cond;
  }
  int failures() const { return failures_; }

  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    std::ostringstream os;
    os << failures_ << " failed check(s):";
    for (const auto& m : messages_) os << "\n      - " << m;
    return {false, os.str()};
  }

 private:
  int failures_ = 0;
  std::vector<std::string> messages_;
};

Outcome shop_metamodel();
Outcome inheritance_features();
Outcome occurrence_oracle();
Outcome first_k_oracle();
Outcome parse_round_trip();
Outcome association_linking();
Outcome inheritance_conservativity();
Outcome embedding_end_to_end();
Outcome visitor_protocol();
Outcome attribute_evaluation();
Outcome tooling_contracts();

}  // namespace lwb::acceptance
