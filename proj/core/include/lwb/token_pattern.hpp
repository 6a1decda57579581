#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lwb/diagnostics.hpp"

namespace lwb {

/// Syntax tree of a token pattern. The accepted language is deliberately
/// small: single characters, character ranges, string literals, grouping,
/// alternation and the postfix operators `*`, `+`, `?`.
struct PatternNode {
  enum class Kind { literal, range, sequence, alternative, star, plus, optional };
  Kind kind = Kind::literal;
  std::string text;      // literal
  char lo = 0, hi = 0;   // range
  std::vector<PatternNode> items;

  friend bool operator==(const PatternNode&, const PatternNode&) = default;

  static PatternNode literal(std::string s) {
    PatternNode n;
    n.kind = Kind::literal;
    n.text = std::move(s);
    return n;
  }
  static PatternNode range(char lo, char hi) {
    PatternNode n;
    n.kind = Kind::range;
    n.lo = lo;
    n.hi = hi;
    return n;
  }
  static PatternNode unary(Kind k, PatternNode inner) {
    PatternNode n;
    n.kind = k;
    n.items.push_back(std::move(inner));
    return n;
  }
};

/// Renders a pattern in grammar-file syntax.
std::string print_pattern(const PatternNode& p);

/// Thompson NFA compiled from a PatternNode. Immutable after construction.
class CompiledPattern {
 public:
  static Result<CompiledPattern> compile(const PatternNode& p, const SourcePos& pos = {});

  /// Length of the longest prefix of `text` starting at `offset` that the
  /// pattern accepts, or 0 when nothing (or only the empty string) matches.
  std::size_t longest_match(std::string_view text, std::size_t offset) const;

  bool matches_all(std::string_view text) const {
    return !text.empty() && longest_match(text, 0) == text.size();
  }

  bool accepts_empty() const;

  /// A string both patterns accept in full, if there is one (ASCII search).
  static std::optional<std::string> overlap(const CompiledPattern& a, const CompiledPattern& b);

 private:
  struct State {
    enum class Kind { range, split, accept } kind = Kind::accept;
    char lo = 0, hi = 0;
    int next = -1;
    int alt = -1;
  };
  // Dangling exits of a partially built automaton: (state, use alt slot).
  struct Fragment {
    int start;
    std::vector<std::pair<int, bool>> outs;
  };

  int add(State s);
  void patch(const Fragment& f, int target);
  Fragment build(const PatternNode& p);
  void closure(int s, std::vector<char>& seen, std::vector<int>& set) const;

  std::vector<State> states_;
  int start_ = -1;
};

}  // namespace lwb
