#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace lwb {

/// A location in a source file. Line and column are 1-based.
struct SourcePos {
  std::string file;
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
  friend auto operator<=>(const SourcePos& a, const SourcePos& b) {
    if (auto c = a.file <=> b.file; c != 0) return c;
    if (auto c = a.line <=> b.line; c != 0) return c;
    return a.column <=> b.column;
  }
};

enum class Severity { note, warning, error };

const char* to_string(Severity s);

struct Diagnostic {
  Severity severity = Severity::error;
  SourcePos pos;
  std::string message;

  /// `file:line:col: severity: message`
  std::string format() const;
};

class Diagnostics {
 public:
  void error(SourcePos pos, std::string msg) { add(Severity::error, std::move(pos), std::move(msg)); }
  void warning(SourcePos pos, std::string msg) { add(Severity::warning, std::move(pos), std::move(msg)); }
  void note(SourcePos pos, std::string msg) { add(Severity::note, std::move(pos), std::move(msg)); }
  void add(Severity s, SourcePos pos, std::string msg) {
    items_.push_back({s, std::move(pos), std::move(msg)});
  }
  void add(Diagnostic d) { items_.push_back(std::move(d)); }
  void append(const Diagnostics& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }

  bool has_errors() const;
  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  const std::vector<Diagnostic>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const Diagnostic& operator[](std::size_t i) const { return items_[i]; }

  /// Promote every warning to an error.
  void escalate_warnings();

  void print(std::ostream& os) const;

 private:
  std::vector<Diagnostic> items_;
};

/// A value or the diagnostics explaining why there is none. Warnings may
/// accompany a successful value.
template <typename T>
struct Result {
  std::optional<T> value;
  Diagnostics diags;

  bool ok() const { return value.has_value(); }
  explicit operator bool() const { return ok(); }
  T& operator*() { return *value; }
  const T& operator*() const { return *value; }
  T* operator->() { return &*value; }
  const T* operator->() const { return &*value; }
};

}  // namespace lwb
