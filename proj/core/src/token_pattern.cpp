#include "lwb/token_pattern.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace lwb {

namespace {

std::string quote_char(char c) {
  std::string out = "'";
  switch (c) {
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\r': out += "\\r"; break;
    case '\'': out += "\\'"; break;
    case '\\': out += "\\\\"; break;
    default: out += c;
  }
  return out + "'";
}

std::string quote_literal(const std::string& s) {
  if (s.size() == 1) return quote_char(s[0]);
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

void print_into(const PatternNode& p, std::string& out, bool nested) {
  using K = PatternNode::Kind;
  switch (p.kind) {
    case K::literal: out += quote_literal(p.text); break;
    case K::range: out += quote_char(p.lo) + ".." + quote_char(p.hi); break;
    case K::sequence:
      if (nested) out += '(';
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (i) out += ' ';
        print_into(p.items[i], out, true);
      }
      if (nested) out += ')';
      break;
    case K::alternative:
      if (nested) out += '(';
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (i) out += " | ";
        print_into(p.items[i], out, false);
      }
      if (nested) out += ')';
      break;
    case K::star:
    case K::plus:
    case K::optional: {
      const auto& inner = p.items.front();
      bool group = inner.kind == K::sequence || inner.kind == K::alternative ||
                   inner.kind == K::star || inner.kind == K::plus || inner.kind == K::optional;
      if (group) out += '(';
      print_into(inner, out, false);
      if (group) out += ')';
      out += p.kind == K::star ? '*' : p.kind == K::plus ? '+' : '?';
      break;
    }
  }
}

}  // namespace

std::string print_pattern(const PatternNode& p) {
  std::string out;
  print_into(p, out, false);
  return out;
}

int CompiledPattern::add(State s) {
  states_.push_back(s);
  return static_cast<int>(states_.size()) - 1;
}

void CompiledPattern::patch(const Fragment& f, int target) {
  for (auto [state, alt] : f.outs) (alt ? states_[state].alt : states_[state].next) = target;
}

CompiledPattern::Fragment CompiledPattern::build(const PatternNode& p) {
  using K = PatternNode::Kind;
  switch (p.kind) {
    case K::literal: {
      // An empty literal is an epsilon split with both exits joined.
      if (p.text.empty()) {
        int s = add({State::Kind::split});
        states_[s].alt = -2;  // marks "no alternative"
        return {s, {{s, false}}};
      }
      int first = -1;
      int prev = -1;
      for (char c : p.text) {
        int s = add({State::Kind::range, c, c});
        if (prev >= 0) states_[prev].next = s;
        if (first < 0) first = s;
        prev = s;
      }
      return {first, {{prev, false}}};
    }
    case K::range: {
      int s = add({State::Kind::range, p.lo, p.hi});
      return {s, {{s, false}}};
    }
    case K::sequence: {
      if (p.items.empty()) return build(PatternNode::literal(""));
      Fragment acc = build(p.items.front());
      for (std::size_t i = 1; i < p.items.size(); ++i) {
        Fragment next = build(p.items[i]);
        patch(acc, next.start);
        acc.outs = std::move(next.outs);
      }
      return acc;
    }
    case K::alternative: {
      Fragment acc = build(p.items.front());
      for (std::size_t i = 1; i < p.items.size(); ++i) {
        Fragment rhs = build(p.items[i]);
        int s = add({State::Kind::split});
        states_[s].next = acc.start;
        states_[s].alt = rhs.start;
        acc.start = s;
        acc.outs.insert(acc.outs.end(), rhs.outs.begin(), rhs.outs.end());
      }
      return acc;
    }
    case K::star: {
      Fragment inner = build(p.items.front());
      int s = add({State::Kind::split});
      states_[s].next = inner.start;
      patch(inner, s);
      return {s, {{s, true}}};
    }
    case K::plus: {
      Fragment inner = build(p.items.front());
      int s = add({State::Kind::split});
      states_[s].next = inner.start;
      patch(inner, s);
      return {inner.start, {{s, true}}};
    }
    case K::optional: {
      Fragment inner = build(p.items.front());
      int s = add({State::Kind::split});
      states_[s].next = inner.start;
      Fragment f{s, inner.outs};
      f.outs.push_back({s, true});
      return f;
    }
  }
  return build(PatternNode::literal(""));
}

Result<CompiledPattern> CompiledPattern::compile(const PatternNode& p, const SourcePos& pos) {
  Result<CompiledPattern> r;
  using K = PatternNode::Kind;
  // Structural checks the grammar parser cannot express in its types.
  std::vector<const PatternNode*> work{&p};
  while (!work.empty()) {
    const PatternNode* n = work.back();
    work.pop_back();
    switch (n->kind) {
      case K::range:
        if (n->lo > n->hi) r.diags.error(pos, "character range is empty");
        break;
      case K::alternative:
      case K::sequence:
        if (n->kind == K::alternative && n->items.empty()) r.diags.error(pos, "empty alternative");
        break;
      case K::star:
      case K::plus:
      case K::optional:
        if (n->items.size() != 1) r.diags.error(pos, "malformed repetition");
        break;
      case K::literal: break;
    }
    for (const auto& c : n->items) work.push_back(&c);
  }
  if (r.diags.has_errors()) return r;

  CompiledPattern cp;
  Fragment f = cp.build(p);
  int accept = cp.add({State::Kind::accept});
  cp.patch(f, accept);
  for (auto& s : cp.states_)
    if (s.alt == -2) s.alt = -1;
  cp.start_ = f.start;
  if (cp.accepts_empty())
    r.diags.error(pos, "token pattern must not match the empty string");
  else
    r.value = std::move(cp);
  return r;
}

void CompiledPattern::closure(int s, std::vector<char>& seen, std::vector<int>& set) const {
  std::vector<int> stack{s};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    if (cur < 0 || seen[cur]) continue;
    seen[cur] = 1;
    const State& st = states_[cur];
    if (st.kind == State::Kind::split) {
      stack.push_back(st.alt);
      stack.push_back(st.next);
    } else {
      set.push_back(cur);
    }
  }
}

bool CompiledPattern::accepts_empty() const {
  std::vector<char> seen(states_.size(), 0);
  std::vector<int> set;
  closure(start_, seen, set);
  return std::any_of(set.begin(), set.end(),
                     [&](int s) { return states_[s].kind == State::Kind::accept; });
}

std::size_t CompiledPattern::longest_match(std::string_view text, std::size_t offset) const {
  if (start_ < 0) return 0;
  std::vector<char> seen(states_.size(), 0);
  std::vector<int> current;
  closure(start_, seen, current);
  std::size_t best = 0;
  for (std::size_t i = offset; i < text.size() && !current.empty(); ++i) {
    char c = text[i];
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<int> next;
    for (int s : current) {
      const State& st = states_[s];
      if (st.kind == State::Kind::range && c >= st.lo && c <= st.hi) closure(st.next, seen, next);
    }
    current = std::move(next);
    for (int s : current)
      if (states_[s].kind == State::Kind::accept) {
        best = i - offset + 1;
        break;
      }
  }
  return best;
}

std::optional<std::string> CompiledPattern::overlap(const CompiledPattern& a, const CompiledPattern& b) {
  if (a.start_ < 0 || b.start_ < 0) return std::nullopt;
  using Set = std::vector<int>;
  auto start_set = [](const CompiledPattern& p) {
    std::vector<char> seen(p.states_.size(), 0);
    Set s;
    p.closure(p.start_, seen, s);
    std::sort(s.begin(), s.end());
    return s;
  };
  auto step = [](const CompiledPattern& p, const Set& from, char c) {
    std::vector<char> seen(p.states_.size(), 0);
    Set s;
    for (int st : from) {
      const State& x = p.states_[st];
      if (x.kind == State::Kind::range && c >= x.lo && c <= x.hi) p.closure(x.next, seen, s);
    }
    std::sort(s.begin(), s.end());
    return s;
  };
  auto accepting = [](const CompiledPattern& p, const Set& s) {
    return std::any_of(s.begin(), s.end(), [&](int st) { return p.states_[st].kind == State::Kind::accept; });
  };
  std::map<std::pair<Set, Set>, std::string> seen;
  std::deque<std::pair<Set, Set>> work;
  auto init = std::make_pair(start_set(a), start_set(b));
  seen[init] = "";
  work.push_back(init);
  while (!work.empty() && seen.size() < 20000) {
    auto cur = work.front();
    work.pop_front();
    const std::string prefix = seen[cur];
    for (int c = 1; c < 127; ++c) {
      Set na = step(a, cur.first, static_cast<char>(c));
      if (na.empty()) continue;
      Set nb = step(b, cur.second, static_cast<char>(c));
      if (nb.empty()) continue;
      std::string w = prefix + static_cast<char>(c);
      if (accepting(a, na) && accepting(b, nb)) return w;
      auto key = std::make_pair(std::move(na), std::move(nb));
      if (seen.emplace(key, w).second) work.push_back(std::move(key));
    }
  }
  return std::nullopt;
}

}  // namespace lwb
