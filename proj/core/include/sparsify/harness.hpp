#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsify/problem.hpp"

namespace sparsify {

inline constexpr const char* kConfigSchema = "sparsify-config/1";
inline constexpr const char* kResultsSchema = "sparsify-results/1";

enum class RunMode { solve, sweep, check };

struct RunConfig {
  RunMode mode = RunMode::solve;
  int dim = 2;
  int n = 48;
  /// Leaf width; unset selects the largest divisor of n not above sqrt(n).
  std::optional<int> leaf;
  MediaSpec media;
  double tol = 1e-6;
  int max_iter = 200;
  /// (n, b) pairs for sweeps, ascending in n.
  std::vector<std::pair<int, int>> sweep;
  std::filesystem::path table_path;
  /// Field dumps go to <prefix>.<kind>.wpf (and .txt when text_fields).
  std::filesystem::path field_prefix;
  bool dump_fields = false;
  bool text_fields = false;
  /// Run sweep rows concurrently. Off by default so timings stay clean.
  bool parallel_rows = false;

  int resolved_leaf() const;
  bool helmholtz() const { return is_helmholtz(media.kind); }
};

/// Largest b with b | n, 2 <= b <= sqrt(n) and n / b >= 2 (falls back to 2).
int default_leaf(int n);

/// Parses the JSON config document; throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Resolved config (defaults filled in) as a JSON document.
std::string to_json(const RunConfig& config);
/// Throws ConfigError when the config breaks an invariant.
void validate(const RunConfig& config);

struct ResultRow {
  std::string equation;
  double param = 0.0;  // omega/2pi or E
  int dim = 0;
  int n = 0;
  int leaf = 0;
  double setup_seconds = 0.0;  // T_s
  double apply_seconds = 0.0;  // T_a
  int iterations = 0;          // n_p
  double solve_seconds = 0.0;  // T_p
  double true_residual = 0.0;
  /// Largest ls_residual per kind; NaN where the kind does not occur.
  double ls_cell = 0.0;
  double ls_face = 0.0;
  double ls_edge = 0.0;
  double ls_vertex = 0.0;
  std::int64_t factor_entries = 0;
  std::int64_t peak_front = 0;
  double shift = 0.0;
  int shift_steps = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::string label;

  std::int64_t unknowns() const;
};

struct SolveOutcome {
  ResultRow row;
  std::vector<double> u;
};

/// build -> partition -> stencils -> Q/C/P -> factorize -> GMRES. A GMRES
/// failure is reported through row.status ("max_iter"), other errors throw.
SolveOutcome run_solve(const RunConfig& config);

/// One row per (n, b); Helmholtz rows use omega/2pi = n/3. Failures are
/// recorded in the row status and the sweep continues.
std::vector<ResultRow> run_sweep(const RunConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Dense-oracle and identity checks for small grids (n <= 16).
CheckReport run_check(const RunConfig& config);

void write_table_header(std::ostream& os, const RunConfig& config);
void write_table_row(std::ostream& os, const ResultRow& row);
void write_table(const std::filesystem::path& path, const RunConfig& config,
                 const std::vector<ResultRow>& rows);

}  // namespace sparsify
