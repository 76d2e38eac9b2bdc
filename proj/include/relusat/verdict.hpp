#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace relusat {

enum class VerdictKind { unsat, sat, unknown, timeout };

/// "unsat", "sat", "unknown" or "timeout".
[[nodiscard]] std::string_view to_string(VerdictKind kind);

struct SearchStats {
  std::size_t iterations = 0; // inner-loop passes
  std::size_t decisions = 0;
  std::size_t learned_clauses = 0;
  std::size_t restarts = 0;
  std::size_t theory_calls = 0;
  double wall_time = 0.0; // seconds

  SearchStats& operator+=(const SearchStats& other);

  /// One `key=value` per line.
  [[nodiscard]] std::string to_key_value() const;
  [[nodiscard]] static std::string csv_header();
  [[nodiscard]] std::string to_csv_row() const;
};

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  std::vector<double> witness; // sat only
  std::string reason;          // unknown only
  SearchStats stats;
};

} // namespace relusat
