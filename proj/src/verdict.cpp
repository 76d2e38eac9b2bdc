#include "relusat/verdict.hpp"

#include <sstream>

namespace relusat {

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
  case VerdictKind::unsat: return "unsat";
  case VerdictKind::sat: return "sat";
  case VerdictKind::unknown: return "unknown";
  case VerdictKind::timeout: return "timeout";
  }
  return "unknown";
}

SearchStats& SearchStats::operator+=(const SearchStats& o) {
  iterations += o.iterations;
  decisions += o.decisions;
  learned_clauses += o.learned_clauses;
  restarts += o.restarts;
  theory_calls += o.theory_calls;
  return *this;
}

std::string SearchStats::to_key_value() const {
  std::ostringstream out;
  out << "iterations=" << iterations << '\n'
      << "decisions=" << decisions << '\n'
      << "learned_clauses=" << learned_clauses << '\n'
      << "restarts=" << restarts << '\n'
      << "theory_calls=" << theory_calls << '\n'
      << "wall_time=" << wall_time << '\n';
  return out.str();
}

std::string SearchStats::csv_header() { return "iterations,decisions,learned_clauses,restarts,theory_calls,wall_time"; }

std::string SearchStats::to_csv_row() const {
  std::ostringstream out;
  out << iterations << ',' << decisions << ',' << learned_clauses << ',' << restarts << ',' << theory_calls << ','
      << wall_time;
  return out.str();
}

} // namespace relusat
