#include "dualcert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualcert {

namespace {

double shrink(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

bool is_identity(const Matrix& p) {
  if (p.rows() != p.cols()) return false;
  return p.isIdentity(0.0);
}

// Split of the Lagrangian into the linear term injected by the affine
// constraints, smooth nonlinear inequality terms, and a constant offset.
struct LagrangianParts {
  Vector linear;    // sum_i u_i a_i + A^T u_eq (objective term excluded)
  double constant;  // sum_i u_i b_i + u_eq^T b
  std::vector<std::pair<double, const InequalityConstraint*>> nonlinear;
};

LagrangianParts split_lagrangian(const ProblemInstance& inst, const Vector& u) {
  LagrangianParts parts;
  parts.linear = Vector::Zero(inst.dim_n());
  parts.constant = 0.0;
  const auto& ineqs = inst.inequalities();
  for (size_t i = 0; i < ineqs.size(); ++i) {
    const double ui = u(static_cast<Eigen::Index>(i));
    if (ineqs[i].is_affine()) {
      parts.linear += ui * ineqs[i].affine->a;
      parts.constant += ui * ineqs[i].affine->b;
    } else if (ui != 0.0) {
      parts.nonlinear.emplace_back(ui, &ineqs[i]);
    }
  }
  const Eigen::Index p = inst.num_equalities();
  if (p > 0) {
    const Vector ue = u.tail(p);
    parts.linear += inst.equalities().a.transpose() * ue;
    parts.constant += ue.dot(inst.equalities().b);
  }
  return parts;
}

// Gradient and value of the smooth part 1/2 x^T H x + linear^T x +
// sum u_i g_i(x) (custom objectives use the user callbacks instead of H).
struct SmoothModel {
  const ProblemInstance& inst;
  const LagrangianParts& parts;

  Vector gradient(const Vector& x) const {
    Vector g;
    if (inst.objective().kind == ObjectiveKind::Custom) {
      g = inst.objective().custom_subgradient(x) + parts.linear;
    } else {
      g = inst.objective().hessian * x + inst.objective().linear + parts.linear;
    }
    for (const auto& [ui, c] : parts.nonlinear) g += ui * c->gradient(x);
    return g;
  }

  double lipschitz() const {
    double l;
    if (inst.objective().kind == ObjectiveKind::Custom) {
      if (!inst.objective().subgradient_lipschitz) {
        throw ConfigError(
            "custom objective needs subgradient_lipschitz for the iterative "
            "oracle path");
      }
      l = *inst.objective().subgradient_lipschitz;
    } else {
      l = inst.spectral().lambda_max_h;
    }
    for (const auto& [ui, c] : parts.nonlinear) {
      if (!c->gradient_lipschitz) {
        throw ConfigError(
            "nonlinear inequality needs gradient_lipschitz for the iterative "
            "oracle path");
      }
      l += ui * (*c->gradient_lipschitz);
    }
    return l;
  }
};

// Separable proximal step: componentwise argmin of
// 1/2 (z - v)^2 / tau + gamma |z - s_j| over the box slice.
Vector separable_prox(const ProblemInstance& inst, const Vector& v,
                      double tau) {
  const auto& obj = inst.objective();
  Vector out(v.size());
  const bool l1 = obj.gamma > 0 && obj.l1_matrix.rows() > 0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    double z = v(j);
    if (l1) z = obj.l1_shift(j) + shrink(v(j) - obj.l1_shift(j), tau * obj.gamma);
    out(j) = z;
  }
  return project_onto_x(inst.set(), out);
}

OracleResult finish(const ProblemInstance& inst, const Vector& u, Vector xbar,
                    int iterations, double residual, bool exact) {
  OracleResult res;
  res.xbar = std::move(xbar);
  res.dual_gradient = constraint_values(inst, res.xbar);
  res.dual_value = inst.objective().value(res.xbar) + u.dot(res.dual_gradient);
  res.inner_iterations = iterations;
  res.inner_residual = residual;
  res.exact_path = exact;
  return res;
}

// Closed form: quadratic objective over the whole space with linear
// constraints only; the factorization of H is cached on the instance.
OracleResult solve_closed_form(const ProblemInstance& inst, const Vector& u) {
  LagrangianParts parts = split_lagrangian(inst, u);
  Vector xbar = inst.hessian_factorization().solve(
      -(inst.objective().linear + parts.linear));
  return finish(inst, u, std::move(xbar), 0, 0.0, true);
}

// Exact separable minimization: diagonal H, identity P (or no l1 term),
// affine constraints, box or whole-space X. Each coordinate minimizes
// 1/2 h z^2 + c z + gamma |z - s| over its interval.
OracleResult solve_separable(const ProblemInstance& inst, const Vector& u) {
  LagrangianParts parts = split_lagrangian(inst, u);
  const auto& obj = inst.objective();
  const bool l1 = obj.gamma > 0 && obj.l1_matrix.rows() > 0;
  Vector xbar(inst.dim_n());
  for (Eigen::Index j = 0; j < xbar.size(); ++j) {
    const double h = obj.hessian(j, j);
    const double v = -(obj.linear(j) + parts.linear(j)) / h;
    double z = l1 ? obj.l1_shift(j) + shrink(v - obj.l1_shift(j), obj.gamma / h)
                  : v;
    xbar(j) = z;
  }
  xbar = project_onto_x(inst.set(), xbar);
  return finish(inst, u, std::move(xbar), 0, 0.0, true);
}

// Accelerated proximal gradient with the strong-convexity momentum
// (sqrt(L) - sqrt(theta)) / (sqrt(L) + sqrt(theta)), restarted every 100
// iterations. Applicable when the nonsmooth part is the separable prox.
OracleResult solve_accelerated(const ProblemInstance& inst, const Vector& u,
                               const OracleConfig& cfg, const Vector* warm) {
  LagrangianParts parts = split_lagrangian(inst, u);
  SmoothModel smooth{inst, parts};
  const double lips = std::max(smooth.lipschitz(), inst.theta());
  const double tau = 1.0 / lips;
  const double ratio = std::sqrt(inst.theta() * tau);
  const double momentum = (1.0 - ratio) / (1.0 + ratio);

  Vector x = warm ? project_onto_x(inst.set(), *warm)
                  : Vector::Zero(inst.dim_n());
  x = separable_prox(inst, x, tau);
  Vector y = x;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_inner_iterations; ++it) {
    Vector x_next = separable_prox(inst, y - tau * smooth.gradient(y), tau);
    const double move = (x_next - x).norm();
    y = x_next + momentum * (x_next - x);
    x = std::move(x_next);
    if (it % 100 == 0) y = x;  // periodic restart
    if (move <= cfg.tolerance) {
      Vector mapped = separable_prox(inst, x - tau * smooth.gradient(x), tau);
      residual = (x - mapped).norm();
      if (residual <= cfg.tolerance) {
        return finish(inst, u, std::move(x), it, residual, false);
      }
    }
  }
  throw OracleFailure("inner proximal gradient loop exhausted its budget", x,
                      residual, cfg.max_inner_iterations);
}

// Primal-dual proximal splitting for the composite l1 term gamma ||Px - s||_1
// with a general P. The dual block y stays in the gamma ball; steps satisfy
// 1/tau - sigma sigma_max^2(P) >= L/2.
OracleResult solve_primal_dual(const ProblemInstance& inst, const Vector& u,
                               const OracleConfig& cfg, const Vector* warm) {
  LagrangianParts parts = split_lagrangian(inst, u);
  SmoothModel smooth{inst, parts};
  const auto& obj = inst.objective();
  const Matrix& p_mat = obj.l1_matrix;
  const double p_norm_sq =
      std::pow(Eigen::JacobiSVD<Matrix>(p_mat).singularValues()(0), 2);

  const double lips = std::max(smooth.lipschitz(), inst.theta());
  const double sigma = 0.5 * lips / p_norm_sq;
  const double tau = 1.0 / (1.05 * (0.5 * lips + sigma * p_norm_sq));

  Vector x = warm ? project_onto_x(inst.set(), *warm)
                  : Vector::Zero(inst.dim_n());
  Vector y = (p_mat * x - obj.l1_shift)
                 .unaryExpr([&](double r) {
                   return r > 0 ? obj.gamma : (r < 0 ? -obj.gamma : 0.0);
                 });

  auto step = [&](const Vector& xc, const Vector& yc, Vector& xn, Vector& yn) {
    xn = project_onto_x(
        inst.set(), xc - tau * (smooth.gradient(xc) + p_mat.transpose() * yc));
    Vector z = yc + sigma * (p_mat * (2.0 * xn - xc) - obj.l1_shift);
    yn = z.cwiseMin(obj.gamma).cwiseMax(-obj.gamma);
  };

  Vector xn(x.size()), yn(y.size());
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_inner_iterations; ++it) {
    step(x, y, xn, yn);
    const double move = std::max((xn - x).norm(), (yn - y).norm());
    x.swap(xn);
    y.swap(yn);
    if (move <= cfg.tolerance) {
      step(x, y, xn, yn);
      residual = std::max((x - xn).norm(), (y - yn).norm());
      if (residual <= cfg.tolerance) {
        return finish(inst, u, std::move(x), it, residual, false);
      }
    }
  }
  throw OracleFailure("inner primal-dual loop exhausted its budget", x,
                      residual, cfg.max_inner_iterations);
}

}  // namespace

double lagrangian_value(const ProblemInstance& inst, const Vector& x,
                        const Vector& u) {
  return inst.objective().value(x) + u.dot(constraint_values(inst, x));
}

namespace {

OracleResult solve_dispatch(const ProblemInstance& inst, const Vector& u,
                            const OracleConfig& cfg, const Vector* warm) {
  if (u.size() != inst.dual_dim()) {
    throw InputError("dual point dimension mismatch");
  }
  if (cfg.tolerance <= 0) throw ConfigError("oracle tolerance must be positive");
  if (!cfg.warm_start_enabled) warm = nullptr;

  const auto& obj = inst.objective();
  const bool quadratic = obj.kind != ObjectiveKind::Custom;
  const bool has_l1 = quadratic && obj.gamma > 0 && obj.l1_matrix.rows() > 0;
  const bool separable_l1 = !has_l1 || is_identity(obj.l1_matrix);

  if (quadratic && inst.all_linear()) {
    if (!has_l1 && !inst.set().is_box()) {
      return solve_closed_form(inst, u);
    }
    const bool diag = obj.hessian.isDiagonal(0.0);
    if (diag && separable_l1) {
      return solve_separable(inst, u);
    }
  }
  if (separable_l1) {
    return solve_accelerated(inst, u, cfg, warm);
  }
  return solve_primal_dual(inst, u, cfg, warm);
}

}  // namespace

OracleResult solve_lagrangian(const ProblemInstance& inst, const DualPoint& u,
                              const OracleConfig& cfg, const Vector* warm) {
  return solve_dispatch(inst, u.value(), cfg, warm);
}

OracleResult solve_lagrangian_extended(const ProblemInstance& inst,
                                       const Vector& u,
                                       const OracleConfig& cfg,
                                       const Vector* warm) {
  if (!inst.all_linear()) {
    throw UnsupportedProblemError(
        "extended-domain evaluation needs affine inequality constraints");
  }
  return solve_dispatch(inst, u, cfg, warm);
}

double dual_gap_identity_check(const OracleResult& res,
                               const ProblemInstance& inst, const DualPoint& u) {
  const double f = inst.objective().value(res.xbar);
  return std::abs(f - res.dual_value + res.dual_gradient.dot(u.value()));
}

Vector finite_difference_dual_gradient(const ProblemInstance& inst,
                                       const DualPoint& u, double step,
                                       const OracleConfig& cfg) {
  if (step <= 0) throw InputError("finite-difference step must be positive");
  const Vector& base = u.value();
  const Eigen::Index m = inst.num_inequalities();
  Vector grad(base.size());
  auto dual_at = [&](const Vector& v) {
    return solve_lagrangian(inst, DualPoint(v, m), cfg).dual_value;
  };
  const double d0 = dual_at(base);
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    Vector vp = base;
    vp(i) += step;
    if (i < m && base(i) < step) {
      grad(i) = (dual_at(vp) - d0) / step;  // one-sided at the active bound
    } else {
      Vector vm = base;
      vm(i) -= step;
      grad(i) = (dual_at(vp) - dual_at(vm)) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace dualcert
