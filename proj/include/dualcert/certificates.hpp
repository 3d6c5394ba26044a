#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dualcert/constants.hpp"
#include "dualcert/methods.hpp"
#include "dualcert/oracle.hpp"
#include "dualcert/problem.hpp"
#include "dualcert/reference.hpp"

namespace dualcert {

/// Whether a bound was evaluated with constants that are exact for the
/// problem class or with computable surrogate upper bounds.
enum class ConstantProvenance { Exact, Surrogate };

const char* provenance_name(ConstantProvenance p);

/// Constants needed to evaluate the error bounds and rate envelopes along a
/// trace. Build via make_certificate_context.
struct CertificateContext {
  double theta = 0.0;
  double sigma_max_a = 0.0;
  double sigma_max_atilde = 0.0;  // NaN when not all-linear
  std::vector<double> lipschitz;  // L_i per inequality

  double gamma_hat = 0.0;  // global bound on gamma(u)
  double l_hat = 0.0;      // dual-gradient Lipschitz bound used in bounds
  double eta_hat = 0.0;    // step-size surrogate (projected gradient)
  bool all_linear = false;
  ConstantProvenance provenance = ConstantProvenance::Surrogate;

  ReferenceSolution ref;

  // Projected-gradient envelope data; populated by pg_envelope_constants.
  double alpha = 0.0;
  double r0 = 0.0;     // d* - d(u0)
  double rho = 0.0;    // (sup ||grad d|| over the initial ball + r/alpha)^2
  double delta = 0.0;  // 1/alpha - L/2

  // Extra tolerance added on top of oracle and reference errors when
  // deciding violations.
  double base_tolerance = 1e-9;

  // Uncertainty of d* inherited from the reference solve; gap-monotone
  // bounds are evaluated at (measured gap + gap_slack) so that reference
  // fuzz cannot raise spurious flags.
  double gap_slack = 0.0;
};

CertificateContext make_certificate_context(const ProblemInstance& inst,
                                            const ReferenceSolution& ref,
                                            double base_tolerance = 1e-9);

/// Populates alpha/r0/rho/delta for the projected-gradient envelopes.
void pg_envelope_constants(const ProblemInstance& inst, CertificateContext& ctx,
                           const RunTrace& trace);

struct DistanceBounds {
  double bound_via_dual_dist = 0.0;  // gamma(u*) ||u - u*||
  double bound_via_gap = 0.0;        // sqrt(2 (d* - d(u)) / theta)
};

/// Distance-to-optimum bounds at a dual point. Throws
/// ReferenceInconsistency when d(u) exceeds d* beyond tolerance.
DistanceBounds distance_bounds(const CertificateContext& ctx,
                               const ProblemInstance& inst, const Vector& u,
                               double d_u);

struct ValueInfeasibilityBounds {
  double value_upper = 0.0;
  double value_lower = 0.0;  // lower bound on f(xbar) - f* (a negative number)
  double infeasibility = 0.0;
  ConstantProvenance provenance = ConstantProvenance::Surrogate;
};

/// Objective-gap and infeasibility bounds at a dual point; uses the tighter
/// linear-case forms when all constraints are linear.
ValueInfeasibilityBounds value_and_infeasibility_bounds(
    const CertificateContext& ctx, const ProblemInstance& inst, const Vector& u,
    double d_u);

/// One bound family evaluated along a trace.
struct BoundSeries {
  std::string family;
  ConstantProvenance provenance = ConstantProvenance::Surrogate;
  std::vector<int> k;
  std::vector<double> measured;
  std::vector<double> bound;
  std::vector<double> margin;  // bound - measured
  std::vector<bool> violated;

  int violations() const;
  double worst_margin() const;  // most negative margin (inf when empty)
};

struct CertificateReport {
  std::string method;
  std::vector<BoundSeries> series;

  int total_violations() const;
  const BoundSeries* find(const std::string& family) const;
};

/// Pointwise bounds (distance, value, infeasibility) evaluated at every
/// iterate of a trace.
CertificateReport pointwise_bounds_report(const CertificateContext& ctx,
                                          const ProblemInstance& inst,
                                          const RunTrace& trace);

/// Rate envelopes for a projected-gradient trace: dual gap, distance, value
/// upper/lower, infeasibility, plus the tighter value envelope on all-linear
/// problems. ctx must have pg_envelope_constants applied.
CertificateReport pg_rate_envelopes(const CertificateContext& ctx,
                                    const ProblemInstance& inst,
                                    const RunTrace& trace);

enum class FastGradientVariant { Tseng, Fista };

/// Optional data enabling the equality-free value envelope (p == 0): a
/// strictly feasible point and a non-optimal dual point.
struct SlaterEnvelopeData {
  Vector x_tilde;
  Vector u_bar;
  double d_ubar = 0.0;
};

/// Rate envelopes for the fast gradient methods. The variant must match the
/// method that produced the trace.
CertificateReport fg_rate_envelopes(
    const CertificateContext& ctx, const ProblemInstance& inst,
    const RunTrace& trace, FastGradientVariant variant,
    const std::optional<SlaterEnvelopeData>& slater = std::nullopt);

struct LemmaCheckReport {
  int pairs_checked = 0;
  int contraction_violations = 0;
  int gradient_violations = 0;
  double worst_contraction_margin = 0.0;  // min over pairs of rhs - lhs
  double worst_gradient_margin = 0.0;
  double max_xbar_norm = 0.0;  // boundedness report over the sampled set
  bool linear_constant_dominates = true;  // sigma_max(Atilde)/theta <= min gamma
};

/// Sampled two-point checks: the primal contraction
/// ||xbar(u)-xbar(v)|| <= min{gamma(u),gamma(v)} ||u-v|| (and the tighter
/// all-linear constant), and the dual-gradient Lipschitz bound. With
/// allow_extended_domain the points are taken as given, permitting negative
/// inequality multipliers on all-linear problems; otherwise they are
/// projected onto D first.
LemmaCheckReport lemma_checks(const ProblemInstance& inst,
                              const std::vector<std::pair<Vector, Vector>>& pairs,
                              const OracleConfig& cfg = {},
                              double tolerance = 1e-7,
                              bool allow_extended_domain = false);

}  // namespace dualcert
