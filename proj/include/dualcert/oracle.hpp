#pragma once

#include <optional>

#include "dualcert/problem.hpp"

namespace dualcert {

/// Result of one Lagrangian minimization at a dual point u: the unique
/// minimizer xbar, the dual value d(u) = L(xbar, u), and the dual gradient,
/// whose components are the constraint values at xbar.
struct OracleResult {
  Vector xbar;
  double dual_value = 0.0;
  Vector dual_gradient;
  int inner_iterations = 0;
  double inner_residual = 0.0;
  bool exact_path = false;
};

struct OracleConfig {
  double tolerance = 1e-10;       // fixed-point residual target for the
                                  // iterative path
  int max_inner_iterations = 200000;
  bool warm_start_enabled = true;

  OracleConfig() = default;
  explicit OracleConfig(double tol) : tolerance(tol) {
    if (tol <= 0) throw ConfigError("oracle tolerance must be positive");
  }
};

/// Minimizes the Lagrangian L(., u) over X. Closed forms are used when the
/// problem permits (quadratic objective over the whole space with linear
/// constraints; separable objective with a diagonal Hessian over a box);
/// otherwise a proximal-splitting inner loop runs until the fixed-point
/// residual drops below the configured tolerance. `warm`, when given, seeds
/// the inner loop.
OracleResult solve_lagrangian(const ProblemInstance& inst, const DualPoint& u,
                              const OracleConfig& cfg = {},
                              const Vector* warm = nullptr);

/// Extended-domain oracle: evaluates the Lagrangian minimizer at dual
/// points with negative inequality multipliers. Only valid when the
/// Lagrangian stays strongly convex there, which holds for affine
/// inequality constraints; rejects other problems.
OracleResult solve_lagrangian_extended(const ProblemInstance& inst,
                                       const Vector& u,
                                       const OracleConfig& cfg = {},
                                       const Vector* warm = nullptr);

/// Lagrangian value L(x, u).
double lagrangian_value(const ProblemInstance& inst, const Vector& x,
                        const Vector& u);

/// Residual of the identity f(xbar(u)) = d(u) - grad d(u)^T u, the oracle's
/// self-certification. Exact paths return values at roundoff level.
double dual_gap_identity_check(const OracleResult& res,
                               const ProblemInstance& inst, const DualPoint& u);

/// Central-difference approximation of the dual gradient (one-sided at
/// active inequality-multiplier bounds). Validation aid; meaningful only on
/// problems where the oracle path is exact.
Vector finite_difference_dual_gradient(const ProblemInstance& inst,
                                       const DualPoint& u, double step,
                                       const OracleConfig& cfg = {});

}  // namespace dualcert
