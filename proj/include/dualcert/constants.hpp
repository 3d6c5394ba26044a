#pragma once

#include "dualcert/oracle.hpp"
#include "dualcert/problem.hpp"

namespace dualcert {

/// Per-point primal-vs-dual distance constant
/// gamma(u) = sqrt(m+1)/theta * max{sigma_max(A), max_i ||grad g_i(xbar(u))||}.
double gamma_at(const ProblemInstance& inst, const OracleResult& res);

/// Global bound gamma_hat >= gamma(u) for all u: constraint gradient norms
/// are bounded by the affine row norms where available and by L_i otherwise.
double gamma_hat_bound(const ProblemInstance& inst);

/// Bound on the Lipschitz constant of grad d:
/// gamma_hat * sqrt(sigma_max^2(A) + sum_i L_i^2), replaced by the exact
/// sigma_max^2(Atilde)/theta when every constraint is linear.
double dual_gradient_lipschitz_bound(const ProblemInstance& inst);

/// Step-size surrogate eta_hat for a compact X: the nonlinear-constraint
/// terms use diam(X); affine constraints contribute nothing (their curvature
/// vanishes for any negative multiplier).
double eta_hat_compact_x(const ProblemInstance& inst);

/// Step-size surrogate eta_hat from the constraint Lipschitz constants and
/// an upper bound on the diameter of the initial dual ball.
double eta_hat_lipschitz_g(const ProblemInstance& inst, double dual_diameter);

}  // namespace dualcert
