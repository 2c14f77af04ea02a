#pragma once

#include "hypflux/config.hpp"
#include "hypflux/diagnostics.hpp"
#include "hypflux/reference.hpp"

#include <map>
#include <string>
#include <vector>

namespace hypflux {

struct Problem {
  Config config;
  Mesh mesh;
  SystemPtr sys;
  SchemePtr scheme;
  InitialDataPtr u0;
  ReferencePtr ref;  // null when reference = none
  RunConfig run;
  ConeSpec cone;
};

/// Builds mesh, system, flux and reference. cells > 0 overrides [mesh] cells (and cells_y).
Problem build_problem(const Config& cfg, int cells = 0, int workers = 1);

/// Admissible set implied by the config and the initial datum.
AdmissibleSet derive_omega(const Config& cfg, const InitialData& u0);

struct RunOutcome {
  DiagnosticsLedger ledger;
  TimeStep time_step;
  double cone_error = 0.0;
  long long bracket_checks = 0;
  long long bracket_failures = 0;
  double equality_deviation = 0.0;
  double mass_drift = 0.0;  // relative
  double min_first_component = 0.0;
  std::vector<StateField> snapshots;
  std::vector<int> snapshot_steps;
  std::map<std::string, bool> flags;

  bool pass() const;
};

RunOutcome execute(const Problem& p);

/// Writes metadata.json, ledger.json, report.json and snapshots/ under dir.
void write_run_outputs(const Problem& p, const RunOutcome& r, const std::string& dir);

std::string metadata_json(const Problem& p, const RunOutcome& r);
std::string ledger_json(const RunOutcome& r);
std::string report_json(const Problem& p, const RunOutcome& r);
std::string snapshot_csv(const Mesh& mesh, const StateField& f);

struct StudyOutcome {
  ConvergenceTable table;
  WbvScaling wbv;
  MeasureScaling measures;
  std::vector<Problem> problems;  // ascending cell count
  std::vector<RunOutcome> runs;
  bool pass = false;
};

StudyOutcome execute_study(const Config& cfg, int jobs);
std::string study_report_json(const Config& cfg, const StudyOutcome& s);

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitValidation = 3,
  kExitRuntime = 4,
  kExitInvariant = 5,
};

/// Entry points used by the CLI. output_dir overrides the config when nonempty.
int run_single(const std::string& config_path, const std::string& output_dir, int jobs);
int run_study(const std::string& spec_path, const std::string& output_dir, int jobs);
int validate_only(const std::string& config_path);

}  // namespace hypflux
