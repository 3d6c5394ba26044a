#include "dualcert/constants.hpp"

#include <cmath>

namespace dualcert {

namespace {

// Bound on sup_X ||grad g_i||: exact row norm for affine constraints, the
// function Lipschitz constant otherwise.
double gradient_norm_bound(const InequalityConstraint& c) {
  return c.is_affine() ? c.affine->a.norm() : c.lipschitz;
}

double sum_lipschitz_sq(const ProblemInstance& inst) {
  double s = 0.0;
  for (const auto& c : inst.inequalities()) s += c.lipschitz * c.lipschitz;
  return s;
}

// Multiplier choices for the strong-convexity extension: affine constraints
// admit arbitrarily negative multipliers, so only the nonlinear ones
// contribute. Each nonlinear constraint gets -theta / (2 n_nl L'_i), keeping
// the extended Lagrangian strongly convex with modulus theta/2.
double nonlinear_eta_term(const ProblemInstance& inst, double scale) {
  int n_nl = 0;
  for (const auto& c : inst.inequalities()) {
    if (!c.is_affine()) ++n_nl;
  }
  double worst = 0.0;
  for (const auto& c : inst.inequalities()) {
    if (c.is_affine()) continue;
    if (!c.gradient_lipschitz || *c.gradient_lipschitz <= 0) {
      throw ConfigError(
          "nonlinear inequality needs gradient_lipschitz for this step-size "
          "rule");
    }
    const double u_tilde = inst.theta() / (2.0 * n_nl * (*c.gradient_lipschitz));
    worst = std::max(worst, c.lipschitz / u_tilde * scale);
  }
  return worst;
}

}  // namespace

double gamma_at(const ProblemInstance& inst, const OracleResult& res) {
  double peak = inst.spectral().sigma_max_a;
  for (const auto& c : inst.inequalities()) {
    peak = std::max(peak, c.gradient(res.xbar).norm());
  }
  const double m = static_cast<double>(inst.num_inequalities());
  return std::sqrt(m + 1.0) / inst.theta() * peak;
}

double gamma_hat_bound(const ProblemInstance& inst) {
  double peak = inst.spectral().sigma_max_a;
  for (const auto& c : inst.inequalities()) {
    peak = std::max(peak, gradient_norm_bound(c));
  }
  const double m = static_cast<double>(inst.num_inequalities());
  return std::sqrt(m + 1.0) / inst.theta() * peak;
}

double dual_gradient_lipschitz_bound(const ProblemInstance& inst) {
  if (inst.all_linear()) {
    return std::pow(inst.spectral().sigma_max_atilde, 2) / inst.theta();
  }
  const double sa = inst.spectral().sigma_max_a;
  return gamma_hat_bound(inst) * std::sqrt(sa * sa + sum_lipschitz_sq(inst));
}

double eta_hat_compact_x(const ProblemInstance& inst) {
  auto diam = inst.set().diameter();
  if (!diam) {
    throw UnsupportedProblemError("compact-X surrogate requires a box set");
  }
  const double sa = inst.spectral().sigma_max_a;
  return std::max(sa * sa / inst.theta(), nonlinear_eta_term(inst, *diam));
}

double eta_hat_lipschitz_g(const ProblemInstance& inst, double dual_diameter) {
  const double sa = inst.spectral().sigma_max_a;
  const double scale = gamma_hat_bound(inst) * dual_diameter;
  return std::max(sa * sa / inst.theta(), nonlinear_eta_term(inst, scale));
}

}  // namespace dualcert
