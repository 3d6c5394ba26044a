#include "dualcert/methods.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "dualcert/constants.hpp"

namespace dualcert {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

double alpha_from_surrogates(double l_hat, double eta_hat, double safety) {
  const double range = l_hat > eta_hat
                           ? 2.0 / l_hat
                           : 4.0 * (1.0 / eta_hat - l_hat / (2.0 * eta_hat * eta_hat));
  return safety * range;
}

void check_safety(double safety) {
  if (safety <= 0 || safety >= 1) {
    throw ConfigError("safety factor must lie in (0, 1)");
  }
}

class TraceBuilder {
 public:
  TraceBuilder(const ProblemInstance& inst, std::string method, bool has_beta)
      : inst_(inst), start_(std::chrono::steady_clock::now()) {
    trace_.method = std::move(method);
    trace_.has_beta = has_beta;
  }

  void record(int k, const Vector& u, const OracleResult& res, double beta) {
    TracePoint pt;
    pt.k = k;
    pt.u = u;
    pt.dual_value = res.dual_value;
    pt.xbar = res.xbar;
    pt.f_xbar = inst_.objective().value(res.xbar);
    pt.delta_xbar = infeasibility(inst_, res.xbar);
    pt.beta = beta;
    pt.inner_iterations = res.inner_iterations;
    pt.inner_residual = res.inner_residual;
    pt.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                     std::chrono::steady_clock::now() - start_)
                     .count();
    trace_.points.push_back(std::move(pt));
  }

  RunTrace take(const ProblemInstance& inst) {
    primal_averages(inst, trace_);
    return std::move(trace_);
  }

  RunTrace take_partial() { return std::move(trace_); }

 private:
  const ProblemInstance& inst_;
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
};

// Inner tolerance schedule min(base, c/k^2), floored so that late iterations
// stay reachable in double precision.
OracleConfig scheduled(const MethodOptions& opts, int k) {
  OracleConfig cfg = opts.oracle;
  if (k > 0) {
    cfg.tolerance = std::min(cfg.tolerance,
                             opts.tighten_c / (static_cast<double>(k) * k));
  }
  cfg.tolerance = std::max(cfg.tolerance, 1e-12);
  return cfg;
}

}  // namespace

StepSizeRule step_size_explicit(double alpha) {
  if (alpha <= 0) throw ConfigError("step size must be positive");
  StepSizeRule rule;
  rule.kind = StepSizeKind::ExplicitAlpha;
  rule.alpha = alpha;
  rule.eta_hat = rule.l_hat = rule.gamma_hat = kNaN;
  return rule;
}

StepSizeRule step_size_linear(const ProblemInstance& inst, double safety) {
  check_safety(safety);
  if (!inst.all_linear()) {
    throw UnsupportedProblemError(
        "linear-case step size requires affine inequalities");
  }
  const double smax2 = std::pow(inst.spectral().sigma_max_atilde, 2);
  if (smax2 <= 0) {
    throw UnsupportedProblemError("stacked constraint matrix is zero");
  }
  StepSizeRule rule;
  rule.kind = StepSizeKind::LinearCase;
  rule.safety = safety;
  rule.alpha = safety * 2.0 * inst.theta() / smax2;
  rule.l_hat = smax2 / inst.theta();
  rule.eta_hat = std::pow(inst.spectral().sigma_max_a, 2) / inst.theta();
  rule.gamma_hat = gamma_hat_bound(inst);
  return rule;
}

StepSizeRule step_size_compact_x(const ProblemInstance& inst, double safety) {
  check_safety(safety);
  if (!inst.set().is_box()) {
    throw UnsupportedProblemError("compact-X step size requires a box set");
  }
  StepSizeRule rule;
  rule.kind = StepSizeKind::CompactXCase;
  rule.safety = safety;
  rule.gamma_hat = gamma_hat_bound(inst);
  rule.l_hat = dual_gradient_lipschitz_bound(inst);
  rule.eta_hat = eta_hat_compact_x(inst);
  rule.alpha = alpha_from_surrogates(rule.l_hat, rule.eta_hat, safety);
  return rule;
}

StepSizeRule step_size_lipschitz_g(const ProblemInstance& inst,
                                   double dual_radius, double safety) {
  check_safety(safety);
  if (dual_radius <= 0) {
    throw ConfigError("dual radius bound must be positive");
  }
  StepSizeRule rule;
  rule.kind = StepSizeKind::LipschitzGCase;
  rule.safety = safety;
  rule.gamma_hat = gamma_hat_bound(inst);
  rule.l_hat = dual_gradient_lipschitz_bound(inst);
  rule.eta_hat = eta_hat_lipschitz_g(inst, dual_radius);
  rule.alpha = alpha_from_surrogates(rule.l_hat, rule.eta_hat, safety);
  return rule;
}

StepSizeRule step_size_strongly_concave(const ProblemInstance& inst) {
  StepSizeRule rule;
  rule.kind = StepSizeKind::StronglyConcaveOptimal;
  rule.safety = 1.0;  // the optimum is attained at the range endpoint
  rule.eta_hat = rule.l_hat = rule.gamma_hat = kNaN;
  LinearRateParams probe = strongly_concave_rate_params(inst, 1e-30);
  rule.alpha = probe.alpha_opt;
  return rule;
}

RunTrace projected_dual_gradient(const ProblemInstance& inst,
                                 const DualPoint& u0, const StepSizeRule& rule,
                                 int iterations, const MethodOptions& opts) {
  if (rule.alpha <= 0) throw ConfigError("step size must be positive");
  if (iterations < 0) throw ConfigError("iteration count must be nonnegative");
  const Eigen::Index m = inst.num_inequalities();

  TraceBuilder builder(inst, "pg", /*has_beta=*/false);
  Vector u = u0.value();
  Vector warm;
  try {
    for (int k = 0; k <= iterations; ++k) {
      OracleResult res =
          solve_lagrangian(inst, DualPoint(u, m), scheduled(opts, k),
                           warm.size() ? &warm : nullptr);
      warm = res.xbar;
      builder.record(k, u, res, kNaN);
      if (k == iterations) break;
      Vector next = project_onto_d(m, u + rule.alpha * res.dual_gradient);
      const double mapping = (next - u).norm() / rule.alpha;
      u = std::move(next);
      if (opts.gradient_mapping_stop && mapping <= *opts.gradient_mapping_stop) {
        OracleResult last = solve_lagrangian(
            inst, DualPoint(u, m), scheduled(opts, k + 1), &warm);
        builder.record(k + 1, u, last, kNaN);
        break;
      }
    }
  } catch (const OracleFailure& f) {
    throw MethodFailure(std::string("projected dual gradient: ") + f.what(),
                        builder.take_partial());
  }
  RunTrace trace = builder.take(inst);
  trace.alpha = rule.alpha;
  trace.u0 = u0.value();
  return trace;
}

RunTrace tseng_fast_gradient(const ProblemInstance& inst, const DualPoint& u0,
                             const DualPoint& w0, double l_tilde,
                             int iterations, const MethodOptions& opts) {
  if (!(l_tilde > 0) || !std::isfinite(l_tilde)) {
    throw ConfigError("fast gradient needs a finite positive Lipschitz bound");
  }
  if (!inst.all_linear() && !inst.set().is_box()) {
    throw UnsupportedProblemError(
        "fast gradient requires affine inequalities or a compact set");
  }
  const Eigen::Index m = inst.num_inequalities();

  TraceBuilder builder(inst, "tseng", /*has_beta=*/true);
  Vector u = u0.value();
  Vector w = w0.value();
  Vector warm_u, warm_v;
  try {
    for (int k = 0; k <= iterations; ++k) {
      const double beta = 2.0 / (k + 2);
      OracleResult res_u = solve_lagrangian(
          inst, DualPoint(u, m), scheduled(opts, k),
          warm_u.size() ? &warm_u : nullptr);
      warm_u = res_u.xbar;
      builder.record(k, u, res_u, beta);
      if (k == iterations) break;

      Vector v = (1.0 - beta) * u + beta * w;
      Vector grad_v;
      if (same_vector(v, u)) {
        grad_v = res_u.dual_gradient;
      } else {
        OracleResult res_v = solve_lagrangian(
            inst, DualPoint(v, m), scheduled(opts, k),
            warm_v.size() ? &warm_v : nullptr);
        warm_v = res_v.xbar;
        grad_v = res_v.dual_gradient;
      }
      w = project_onto_d(m, w + grad_v / (beta * l_tilde));
      u = project_onto_d(m, v + grad_v / l_tilde);
    }
  } catch (const OracleFailure& f) {
    throw MethodFailure(std::string("fast dual gradient: ") + f.what(),
                        builder.take_partial());
  }
  RunTrace trace = builder.take(inst);
  trace.l_tilde = l_tilde;
  trace.u0 = u0.value();
  trace.w0 = w0.value();
  return trace;
}

RunTrace fista_dual(const ProblemInstance& inst, const DualPoint& u0,
                    int iterations, const MethodOptions& opts) {
  if (!inst.all_linear()) {
    throw UnsupportedProblemError(
        "the FISTA-style method requires all constraints to be linear");
  }
  const double smax2 = std::pow(inst.spectral().sigma_max_atilde, 2);
  if (smax2 <= 0) {
    throw UnsupportedProblemError("stacked constraint matrix is zero");
  }
  const double step = inst.theta() / smax2;
  const Eigen::Index m = inst.num_inequalities();

  TraceBuilder builder(inst, "fista", /*has_beta=*/true);
  Vector u = u0.value();
  Vector u_prev = u;
  double beta = 1.0, beta_prev = 1.0;
  Vector warm_u, warm_v;
  try {
    for (int k = 0; k <= iterations; ++k) {
      OracleResult res_u = solve_lagrangian(
          inst, DualPoint(u, m), scheduled(opts, k),
          warm_u.size() ? &warm_u : nullptr);
      warm_u = res_u.xbar;
      builder.record(k, u, res_u, beta);
      if (k == iterations) break;

      Vector v = u + beta * (1.0 / beta_prev - 1.0) * (u - u_prev);
      Vector grad_v;
      if (same_vector(v, u)) {
        grad_v = res_u.dual_gradient;
      } else {
        OracleResult res_v = solve_lagrangian(
            inst, DualPoint(v, m), scheduled(opts, k),
            warm_v.size() ? &warm_v : nullptr);
        warm_v = res_v.xbar;
        grad_v = res_v.dual_gradient;
      }
      u_prev = u;
      u = project_onto_d(m, v + step * grad_v);
      beta_prev = beta;
      beta = 0.5 * (std::sqrt(std::pow(beta, 4) + 4.0 * beta * beta) -
                    beta * beta);
    }
  } catch (const OracleFailure& f) {
    throw MethodFailure(std::string("fista dual: ") + f.what(),
                        builder.take_partial());
  }
  RunTrace trace = builder.take(inst);
  trace.u0 = u0.value();
  trace.l_tilde = smax2 / inst.theta();
  return trace;
}

LinearRateParams strongly_concave_rate_params(const ProblemInstance& inst,
                                              double alpha) {
  if (alpha <= 0) throw ConfigError("step size must be positive");
  if (!inst.all_linear() || inst.set().is_box()) {
    throw UnsupportedProblemError(
        "linear-rate parameters need linear constraints and X = R^n");
  }
  if (!inst.objective().subgradient_lipschitz) {
    throw ConfigError("linear-rate parameters need subgradient_lipschitz");
  }
  const double smin = inst.spectral().sigma_min_atilde;
  const double smax = inst.spectral().sigma_max_atilde;
  if (inst.dual_dim() > inst.dim_n() || smin <= 1e-12 * std::max(smax, 1.0)) {
    throw UnsupportedProblemError(
        "stacked constraint matrix must have full row rank");
  }
  const double theta = inst.theta();
  const double mm = std::pow(*inst.objective().subgradient_lipschitz, 2);
  const double denom = theta * theta * smin * smin + mm * smax * smax;

  LinearRateParams params;
  params.alpha_opt = 2.0 * mm * theta / denom;
  if (alpha > params.alpha_opt * (1 + 1e-12)) {
    throw ConfigError("step size exceeds the linear-rate range");
  }
  const double inside =
      1.0 - 2.0 * alpha * theta * smin * smin * smax * smax / denom;
  params.q = std::sqrt(std::max(0.0, inside));
  return params;
}

void primal_averages(const ProblemInstance& inst, RunTrace& trace) {
  if (trace.points.empty()) {
    trace.averages_filled = true;
    return;
  }
  Vector sum = Vector::Zero(inst.dim_n());
  Vector weighted_sum = Vector::Zero(inst.dim_n());
  double weight_total = 0.0;
  for (size_t i = 0; i < trace.points.size(); ++i) {
    TracePoint& pt = trace.points[i];
    sum += pt.xbar;
    pt.xtilde = sum / static_cast<double>(i + 1);
    pt.f_xtilde = inst.objective().value(pt.xtilde);
    pt.delta_xtilde = infeasibility(inst, pt.xtilde);
    if (trace.has_beta) {
      if (!(pt.beta > 0)) {
        throw ConfigError("weighted average needs a positive beta sequence");
      }
      weighted_sum += pt.xbar / pt.beta;
      weight_total += 1.0 / pt.beta;
      pt.xhat = weighted_sum / weight_total;
      pt.f_xhat = inst.objective().value(pt.xhat);
      pt.delta_xhat = infeasibility(inst, pt.xhat);
    } else {
      pt.f_xhat = kNaN;
      pt.delta_xhat = kNaN;
    }
  }
  trace.averages_filled = true;
}

}  // namespace dualcert
