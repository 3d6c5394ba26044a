#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualcert/oracle.hpp"
#include "dualcert/problem.hpp"

namespace dualcert {

enum class StepSizeKind {
  ExplicitAlpha,
  LinearCase,
  CompactXCase,
  LipschitzGCase,
  StronglyConcaveOptimal,
};

/// Step size for the projected dual gradient update together with the
/// computable surrogate constants it was derived from. The strict step-size
/// inequalities are backed off by `safety` (default 99%).
struct StepSizeRule {
  StepSizeKind kind = StepSizeKind::ExplicitAlpha;
  double alpha = 0.0;
  double safety = 0.99;

  // Surrogates, populated when the rule computes them (NaN otherwise).
  double eta_hat = 0.0;
  double l_hat = 0.0;
  double gamma_hat = 0.0;
};

StepSizeRule step_size_explicit(double alpha);

/// alpha = safety * 2 theta / sigma_max^2(Atilde); requires affine
/// inequalities.
StepSizeRule step_size_linear(const ProblemInstance& inst,
                              double safety = 0.99);

/// Compact-X rule: surrogates from the gradient-norm bound over X and the
/// set diameter. Requires a box X.
StepSizeRule step_size_compact_x(const ProblemInstance& inst,
                                 double safety = 0.99);

/// Lipschitz-g rule: surrogates from the constraint Lipschitz constants and
/// an upper bound on the diameter of the initial dual sublevel ball, i.e.
/// 2 ||u0 - u*||.
StepSizeRule step_size_lipschitz_g(const ProblemInstance& inst,
                                   double dual_radius, double safety = 0.99);

/// Optimal step for strongly concave duals (full-row-rank stacked
/// constraints, X = R^n, subgradient Lipschitz constant supplied).
StepSizeRule step_size_strongly_concave(const ProblemInstance& inst);

/// Per-iteration record of a dual method run. Averages are filled by
/// primal_averages().
struct TracePoint {
  int k = 0;
  Vector u;
  double dual_value = 0.0;
  Vector xbar;
  double f_xbar = 0.0;
  double delta_xbar = 0.0;

  Vector xtilde;
  double f_xtilde = 0.0;
  double delta_xtilde = 0.0;

  Vector xhat;  // weighted running average; empty for methods without beta
  double f_xhat = 0.0;
  double delta_xhat = 0.0;

  double beta = 0.0;  // NaN for methods without a beta sequence
  std::int64_t wall_ns = 0;
  int inner_iterations = 0;
  double inner_residual = 0.0;
};

struct RunTrace {
  std::string method;
  std::vector<TracePoint> points;
  double alpha = 0.0;      // projected gradient only
  double l_tilde = 0.0;    // fast gradient methods only
  Vector u0;
  Vector w0;               // 1-memory fast gradient only
  bool has_beta = false;
  bool averages_filled = false;

  const TracePoint& at(int k) const { return points.at(k); }
  int last_k() const { return static_cast<int>(points.size()) - 1; }
};

/// A dual method run failed mid-way (inner oracle exhausted). Carries the
/// iterations completed before the failure.
class MethodFailure : public std::runtime_error {
 public:
  MethodFailure(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_trace(std::move(partial)) {}

  RunTrace partial_trace;
};

struct MethodOptions {
  OracleConfig oracle;
  // Tighten the inner tolerance as min(base, tighten_c / k^2) so that late
  // iterates are certified at least as accurately as early ones.
  double tighten_c = 1e-6;
  // Optional early stop on the gradient-mapping norm ||u_{k+1}-u_k|| / alpha.
  std::optional<double> gradient_mapping_stop;
};

/// Projected dual gradient: u_{k+1} = P_D[u_k + alpha grad d(u_k)].
RunTrace projected_dual_gradient(const ProblemInstance& inst,
                                 const DualPoint& u0, const StepSizeRule& rule,
                                 int iterations,
                                 const MethodOptions& opts = {});

/// 1-memory fast dual gradient with the half-squared-distance prox term.
/// Both per-step minimizations reduce to projected gradient steps:
///   v_k = (1-beta_k) u_k + beta_k w_k
///   w_{k+1} = P_D[w_k + grad d(v_k) / (beta_k L)]
///   u_{k+1} = P_D[v_k + grad d(v_k) / L]
/// with beta_k = 2/(k+2). `l_tilde` must dominate the global Lipschitz
/// constant of grad d, which requires affine inequalities or a compact X.
RunTrace tseng_fast_gradient(const ProblemInstance& inst, const DualPoint& u0,
                             const DualPoint& w0, double l_tilde,
                             int iterations, const MethodOptions& opts = {});

/// FISTA-style fast dual gradient for problems whose constraints are all
/// linear; uses the exact dual gradient Lipschitz constant
/// sigma_max^2(Atilde)/theta and the momentum recursion
/// beta_{k+1} = (sqrt(beta_k^4 + 4 beta_k^2) - beta_k^2)/2.
RunTrace fista_dual(const ProblemInstance& inst, const DualPoint& u0,
                    int iterations, const MethodOptions& opts = {});

/// Linear-rate parameters for strongly concave duals (full-row-rank stacked
/// constraints, X = R^n, subgradient Lipschitz constant M):
/// contraction factor q(alpha) and the optimal step alpha_opt.
struct LinearRateParams {
  double q = 0.0;
  double alpha_opt = 0.0;
};
LinearRateParams strongly_concave_rate_params(const ProblemInstance& inst,
                                              double alpha);

/// Fills the running averages: xtilde_k is the mean of xbar(u_0..u_k) and,
/// for methods with a beta sequence, xhat_k the 1/beta_l weighted mean.
/// Single incremental pass; safe to call repeatedly.
void primal_averages(const ProblemInstance& inst, RunTrace& trace);

}  // namespace dualcert
