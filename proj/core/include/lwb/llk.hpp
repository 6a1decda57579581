#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lwb/diagnostics.hpp"
#include "lwb/lexer.hpp"
#include "lwb/linked_grammar.hpp"

namespace lwb {

/// Lookahead symbol: `"text"` for terminals, the class name for tokens, `$`
/// for end of input and `<Name>` for an external nonterminal whose content
/// is unknown to the host.
using Symbol = std::string;
using SymbolSeq = std::vector<Symbol>;
using SeqSet = std::set<SymbolSeq>;

inline constexpr std::string_view kEndSymbol = "$";

Symbol terminal_symbol(std::string_view text);
Symbol external_symbol(std::string_view production);
Symbol symbol_of(const Lexeme& lx);
bool is_external_symbol(std::string_view s);

/// `a ⊕k b`: every concatenation truncated to k symbols. Sequences ending
/// in `$` are not extended.
SeqSet concat_k(const SeqSet& a, const SeqSet& b, int k);

std::string format_seq(const SymbolSeq& s);

struct Decision {
  enum class Kind { production, alternative, optional, loop };

  Kind kind = Kind::alternative;
  std::string production;
  /// Body element that owns the decision; null for production decisions.
  const BodyElement* element = nullptr;
  /// Readable branch labels. Optional and loop decisions have two branches:
  /// enter and exit.
  std::vector<std::string> branches;
  /// Lookahead of each branch, continuation included.
  std::vector<SeqSet> lookahead;
  bool conflict = false;
  SymbolSeq witness;
  SourcePos pos;
};

struct DecisionTable {
  int k = 1;
  std::vector<Decision> decisions;
  /// FIRST_k of every active production, by production name.
  std::map<std::string, SeqSet, std::less<>> first;
  std::map<std::string, SeqSet, std::less<>> follow;

  const Decision* at(const BodyElement* e) const;
  const Decision* for_production(std::string_view name) const;

 private:
  friend class LlkAnalyzer;
  std::map<const BodyElement*, std::size_t> byElement_;
  std::map<std::string, std::size_t, std::less<>> byProduction_;
};

struct LlkResult {
  DecisionTable table;
  Diagnostics diags;
  bool leftRecursive = false;
};

/// LL(k) analysis. `starts` lists the productions reachable from the
/// outside; they are followed by end of input. Empty means the first active
/// production. The grammar must outlive the returned table, which points into
/// its production bodies.
LlkResult analyze_llk(const LinkedGrammar& g, int k, const std::vector<std::string>& starts = {});

/// Alternatives of a production in the concrete syntax: its own body (if
/// any) followed by the direct subrules.
struct ProductionAlternatives {
  const BodyElement* body = nullptr;
  std::vector<const LinkedProduction*> subrules;
  std::size_t size() const { return (body ? 1 : 0) + subrules.size(); }
};
ProductionAlternatives alternatives_of(const LinkedGrammar& g, const LinkedProduction& p);

}  // namespace lwb
