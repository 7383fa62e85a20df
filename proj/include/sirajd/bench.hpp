#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sirajd/outer.hpp"
#include "sirajd/sparse.hpp"

namespace sirajd::bench {

struct ExperimentSpec {
  std::string matrix_path;
  Complex sigma{0.0, 0.0};
  std::vector<Method> methods{Method::Sira};
  std::vector<double> teps{1e-3};
  double droptol = 1e-3;
  std::size_t m_max = 30;
  std::size_t max_restarts = 0;
  std::size_t gmres_restart = 30;
  std::size_t gmres_maxit = 300;
  /// 0 keeps the all-ones starting vector; any other value draws a random unit start.
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  /// Throws ConfigError.
  void validate() const;
};

/// Flat JSON object. Keys: matrix, re / sigma_re, im / sigma_im, method or
/// methods (string or array), teps (number or array), droptol, mmax,
/// max_restarts, gmres_restart, gmres_maxit, seed, out. Unknown keys are
/// rejected. Fields absent from the document keep the values already in `base`.
/// load_spec resolves a relative matrix path against the config file's directory.
ExperimentSpec parse_spec(const nlohmann::json& doc, ExperimentSpec base = {});
ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base = {});

struct RunRecord {
  std::string label;  // e.g. "sira_1e-03", "sia-inexact"
  Method method = Method::Sira;
  std::optional<double> teps;  // only for methods with the adaptive rule
  std::string status;          // converged, converged-by-breakdown, not-converged, error
  std::string error;
  bool config_error = false;   // zero pivot and similar setup failures
  SolveResult result;
  double t3 = 0.0;             // shared preconditioner construction time
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::size_t n = 0;
  double one_norm = 0.0;
  double tolerance = 0.0;
  std::size_t precond_fill = 0;
  std::vector<RunRecord> runs;
};

/// Runs every (method, teps) pair; methods without the adaptive rule run once.
/// Solver failures are caught and recorded per run.
ExperimentReport run_experiment(const ExperimentSpec& spec, const SparseMatrix& a);
ExperimentReport run_experiment(const ExperimentSpec& spec);

struct HistoryRow {
  std::size_t outer_index = 0;
  double relative_residual = 0.0;  // ||r|| / ||A||_1
  double inner_tol = 0.0;
  std::size_t inner_iters = 0;

  bool operator==(const HistoryRow&) const = default;
};

std::vector<HistoryRow> history_rows(const RunRecord& run, double one_norm);
void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows);
/// Parses the output of write_history_csv (RFC 4180 quoting accepted).
std::vector<HistoryRow> read_history_csv(std::istream& is);
/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

nlohmann::json summary_json(const ExperimentReport& report);
nlohmann::json timings_json(const ExperimentReport& report);
std::string summary_table(const ExperimentReport& report);

/// Writes <label>_history.csv per run, summary.json, timings.json and
/// summary.txt into `dir` (created if missing). Returns the written paths.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// 0 when every run converged, 2 if any run hit a configuration error,
/// otherwise 1.
int exit_code(const ExperimentReport& report);

}  // namespace sirajd::bench
