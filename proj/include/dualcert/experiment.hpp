#pragma once

#include <string>
#include <vector>

#include "dualcert/certificates.hpp"
#include "dualcert/methods.hpp"
#include "dualcert/problem.hpp"
#include "dualcert/reference.hpp"

namespace dualcert {

enum class MethodId { ProjectedGradient, Fista, Tseng };

const char* method_name(MethodId id);
MethodId method_from_name(const std::string& name);

struct ExperimentConfig {
  std::vector<MethodId> methods;
  int iterations = 10000;
  StepSizeRule pg_rule;            // used by the projected gradient run
  double certificate_tolerance = 1e-7;
  OracleConfig oracle;
};

/// Trace CSV schema (one row per iteration):
/// k,d,f_xbar,delta_xbar,f_xtilde,delta_xtilde,f_xhat,delta_xhat,
/// dist_u_to_ref,wall_ns. Missing quantities are written as nan.
std::string trace_to_csv(const RunTrace& trace, const ReferenceSolution* ref);

/// Certificate report JSON: {"method","families":{name:{"provenance",
/// "k","measured","bound","margin","violated"}}}.
std::string report_to_json(const CertificateReport& report);
CertificateReport report_from_json(const std::string& text);

/// Summary CSV at logarithmically spaced iterations (1,2,5,10,...):
/// k,dual_gap,f_xbar_err,f_xtilde_err,f_xhat_err,delta_xbar.
std::string summary_to_csv(const RunTrace& trace, const ReferenceSolution& ref);

struct ExperimentResult {
  std::vector<std::string> files_written;
  int total_violations = 0;
};

/// Runs each requested method on the instance, evaluates every applicable
/// bound and envelope along the traces, and writes per-method
/// <name>_trace.csv, <name>_certificates.json and <name>_summary.csv into
/// output_dir. Methods run concurrently; the instance is shared read-only.
ExperimentResult run_experiment(const ProblemInstance& inst,
                                const ReferenceSolution& ref,
                                const ExperimentConfig& cfg,
                                const std::string& output_dir);

struct VerifyResult {
  int exit_code = 0;
  std::string summary;  // worst margins per bound family, printable
};

/// Re-checks every *_certificates.json in the directory: recomputes the
/// violation flags from the stored measured/bound pairs and fails on any
/// violation or malformed report.
VerifyResult verify_report(const std::string& report_dir);

/// Iterations 1,2,5,10,20,50,... up to and including last (when recorded).
std::vector<int> log_spaced_iterations(int last);

}  // namespace dualcert
