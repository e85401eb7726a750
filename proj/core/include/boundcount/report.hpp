#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boundcount/limits.hpp"
#include "boundcount/limits_total.hpp"

#ifndef BOUNDCOUNT_VERSION
#define BOUNDCOUNT_VERSION "1.0.0"
#endif

namespace boundcount {

inline constexpr const char* kToolVersion = BOUNDCOUNT_VERSION;

// ---- golden tables --------------------------------------------------------

// Column order of both comparison tables; "Ex" is the exact count.
const std::vector<std::string>& table_columns();

struct GoldenRow {
  int g = 0;
  int ell = 0;
  std::map<std::string, long> cells;
};

// which = 1 (exponential) or 2 (Yukawa).
const std::vector<GoldenRow>& golden_table(int which);
Potential table_potential(int which, double g);

struct TableCell {
  std::string column;
  long computed = 0;
  long golden = 0;
  bool match = false;
  std::optional<double> raw;
  std::string note;
};

struct TableRow {
  int g = 0;
  int ell = 0;
  long exact = 0;
  std::vector<TableCell> cells;
};

struct TableResult {
  int which = 1;
  std::vector<TableRow> rows;
  int mismatches = 0;
  double seconds = 0.0;
};

// LLSK matches when it is within one of the golden value and does not exceed
// the exact count; every other column must be equal.
TableResult compute_table(int which, const Tolerances& tol = {});
std::string format_table(const TableResult& t);
std::string table_csv(const TableResult& t);

// ---- run records ----------------------------------------------------------

struct RunRecord {
  std::string command;
  std::string potential;
  int ell = 0;
  Tolerances tol;
  std::optional<long> exact;
  std::vector<LimitValue> limits;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
  std::string version = kToolVersion;

  [[nodiscard]] std::string to_json() const;  // one line, no trailing newline
  static RunRecord from_json(const std::string& text);

  // One CSV row per limit (a single row with empty limit fields when there
  // are none). Columns: csv_header().
  [[nodiscard]] std::string to_csv_rows() const;
  static const std::string& csv_header();
};

// ---- sweeps ---------------------------------------------------------------

// Quantities: N0, L, N (exact counts), any per-channel limit id (channel
// `ell`), any L or N bound id, and the groups "limits", "L_bounds",
// "N_bounds". Each limit contributes <id>_raw and <id>_int columns.
std::vector<std::string> expand_quantities(const std::vector<std::string>& q);

struct SweepRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  [[nodiscard]] std::vector<double> values() const;
};

SweepRange parse_range(const std::string& text);  // "lo:hi:step"

// Rows are computed in parallel and written in g order.
std::string sweep_csv(const std::string& family_spec, const SweepRange& range,
                      const std::vector<std::string>& quantities, int ell,
                      const Tolerances& tol = {}, int threads = 0);

// Substitutes the numeric g into a family spec such as "exponential:R=1".
Potential family_member(const std::string& family_spec, double g);

}  // namespace boundcount
