#include "dualcert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamped_gap(double d_star, double d_u) {
  return std::max(0.0, d_star - d_u);
}

// Per-iterate violation tolerance: configured base plus the reference gap
// plus the inner residual amplified by the problem conditioning.
double point_tolerance(const CertificateContext& ctx, double inner_residual) {
  const double amp = 1.0 + ctx.gamma_hat + ctx.l_hat;
  return ctx.base_tolerance + ctx.ref.dual_gap + amp * inner_residual;
}

struct SeriesBuilder {
  BoundSeries series;

  SeriesBuilder(std::string family, ConstantProvenance prov) {
    series.family = std::move(family);
    series.provenance = prov;
  }

  // Upper-bound family: violated when measured > bound + tol.
  void add_upper(int k, double measured, double bound, double tol) {
    series.k.push_back(k);
    series.measured.push_back(measured);
    series.bound.push_back(bound);
    series.margin.push_back(bound - measured);
    series.violated.push_back(measured > bound + tol);
  }

  // Lower-bound family: violated when measured < bound - tol.
  void add_lower(int k, double measured, double bound, double tol) {
    series.k.push_back(k);
    series.measured.push_back(measured);
    series.bound.push_back(bound);
    series.margin.push_back(measured - bound);
    series.violated.push_back(measured < bound - tol);
  }
};

}  // namespace

const char* provenance_name(ConstantProvenance p) {
  return p == ConstantProvenance::Exact ? "exact" : "surrogate";
}

int BoundSeries::violations() const {
  return static_cast<int>(std::count(violated.begin(), violated.end(), true));
}

double BoundSeries::worst_margin() const {
  double worst = kInf;
  for (double m : margin) worst = std::min(worst, m);
  return worst;
}

int CertificateReport::total_violations() const {
  int total = 0;
  for (const auto& s : series) total += s.violations();
  return total;
}

const BoundSeries* CertificateReport::find(const std::string& family) const {
  for (const auto& s : series) {
    if (s.family == family) return &s;
  }
  return nullptr;
}

CertificateContext make_certificate_context(const ProblemInstance& inst,
                                            const ReferenceSolution& ref,
                                            double base_tolerance) {
  CertificateContext ctx;
  ctx.theta = inst.theta();
  ctx.sigma_max_a = inst.spectral().sigma_max_a;
  ctx.sigma_max_atilde = inst.spectral().sigma_max_atilde;
  for (const auto& c : inst.inequalities()) {
    ctx.lipschitz.push_back(c.lipschitz);
  }
  ctx.gamma_hat = gamma_hat_bound(inst);
  ctx.l_hat = dual_gradient_lipschitz_bound(inst);
  ctx.all_linear = inst.all_linear();
  ctx.provenance = ctx.all_linear ? ConstantProvenance::Exact
                                  : ConstantProvenance::Surrogate;
  if (ctx.all_linear) {
    ctx.eta_hat = ctx.sigma_max_a * ctx.sigma_max_a / ctx.theta;
  } else if (inst.set().is_box()) {
    ctx.eta_hat = eta_hat_compact_x(inst);
  } else {
    ctx.eta_hat = std::numeric_limits<double>::quiet_NaN();
  }
  ctx.ref = ref;
  ctx.base_tolerance = base_tolerance;
  ctx.gap_slack = ref.dual_gap + 1e-10 * (1.0 + std::abs(ref.d_star));
  return ctx;
}

void pg_envelope_constants(const ProblemInstance& inst, CertificateContext& ctx,
                           const RunTrace& trace) {
  if (trace.points.empty()) throw ConfigError("empty trace");
  if (trace.alpha <= 0) {
    throw ConfigError("trace does not carry a projected-gradient step size");
  }
  ctx.alpha = trace.alpha;
  ctx.r0 = clamped_gap(ctx.ref.d_star, trace.points.front().dual_value);
  const double radius = (trace.u0 - ctx.ref.u_star).norm();
  const double grad_at_star = constraint_values(inst, ctx.ref.x_star).norm();
  ctx.rho = std::pow(grad_at_star + ctx.l_hat * radius + radius / ctx.alpha, 2);
  ctx.delta = 1.0 / ctx.alpha - ctx.l_hat / 2.0;
  if (ctx.delta <= 0) {
    throw ConfigError("step size is not compliant: 1/alpha - L/2 <= 0");
  }
}

static double gamma_at_reference(const ProblemInstance& inst,
                                 const ReferenceSolution& ref) {
  double peak = inst.spectral().sigma_max_a;
  for (const auto& c : inst.inequalities()) {
    peak = std::max(peak, c.gradient(ref.x_star).norm());
  }
  const double m = static_cast<double>(inst.num_inequalities());
  return std::sqrt(m + 1.0) / inst.theta() * peak;
}

static DistanceBounds distance_bounds_with_slack(
    const CertificateContext& ctx, const ProblemInstance& inst,
    const Vector& u, double d_u, double slack) {
  const double tol = ctx.ref.dual_gap + ctx.base_tolerance +
                     1e-12 * (1.0 + std::abs(ctx.ref.d_star));
  if (d_u > ctx.ref.d_star + tol) {
    throw ReferenceInconsistency(
        "dual value exceeds the reference optimum; reference is stale");
  }
  DistanceBounds out;
  out.bound_via_dual_dist =
      gamma_at_reference(inst, ctx.ref) * (u - ctx.ref.u_star).norm();
  out.bound_via_gap = std::sqrt(
      2.0 * (clamped_gap(ctx.ref.d_star, d_u) + slack) / ctx.theta);
  return out;
}

DistanceBounds distance_bounds(const CertificateContext& ctx,
                               const ProblemInstance& inst, const Vector& u,
                               double d_u) {
  return distance_bounds_with_slack(ctx, inst, u, d_u, 0.0);
}

static ValueInfeasibilityBounds value_bounds_with_slack(
    const CertificateContext& ctx, const ProblemInstance& inst, const Vector& u,
    double d_u, double slack) {
  const double gap = clamped_gap(ctx.ref.d_star, d_u) + slack;
  const double ustar_norm = ctx.ref.u_star.norm();
  ValueInfeasibilityBounds out;
  if (ctx.all_linear) {
    const double factor =
        ctx.sigma_max_atilde * std::sqrt(2.0 * gap / ctx.theta);
    out.value_upper = u.norm() * factor;
    out.value_lower = -ustar_norm * factor;
    out.infeasibility = factor;
    out.provenance = ConstantProvenance::Exact;
  } else {
    const double mp = static_cast<double>(inst.dual_dim());
    out.value_upper =
        (u.lpNorm<Eigen::Infinity>() * std::sqrt(2.0 * ctx.l_hat * mp) +
         std::sqrt(gap)) *
        std::sqrt(gap);
    out.value_lower = -ustar_norm * std::sqrt(2.0 * ctx.l_hat * gap);
    out.infeasibility = std::sqrt(2.0 * ctx.l_hat * gap);
    out.provenance = ConstantProvenance::Surrogate;
  }
  return out;
}

ValueInfeasibilityBounds value_and_infeasibility_bounds(
    const CertificateContext& ctx, const ProblemInstance& inst, const Vector& u,
    double d_u) {
  return value_bounds_with_slack(ctx, inst, u, d_u, 0.0);
}

CertificateReport pointwise_bounds_report(const CertificateContext& ctx,
                                          const ProblemInstance& inst,
                                          const RunTrace& trace) {
  SeriesBuilder dist_dual("distance_via_dual_error", ctx.provenance);
  SeriesBuilder dist_gap("distance_via_gap", ConstantProvenance::Exact);
  SeriesBuilder val_up("value_upper", ctx.provenance);
  SeriesBuilder val_lo("value_lower", ctx.provenance);
  SeriesBuilder infeas("infeasibility", ctx.provenance);

  for (const auto& pt : trace.points) {
    const double tol = point_tolerance(ctx, pt.inner_residual);
    const double dist = (pt.xbar - ctx.ref.x_star).norm();
    const double fgap = pt.f_xbar - ctx.ref.f_star;
    DistanceBounds db = distance_bounds(ctx, inst, pt.u, pt.dual_value);
    ValueInfeasibilityBounds vb =
        value_and_infeasibility_bounds(ctx, inst, pt.u, pt.dual_value);
    DistanceBounds db_s = distance_bounds_with_slack(ctx, inst, pt.u,
                                                     pt.dual_value,
                                                     ctx.gap_slack);
    ValueInfeasibilityBounds vb_s = value_bounds_with_slack(
        ctx, inst, pt.u, pt.dual_value, ctx.gap_slack);
    dist_dual.add_upper(pt.k, dist, db.bound_via_dual_dist, tol);
    dist_gap.add_upper(pt.k, dist, db.bound_via_gap,
                       tol + db_s.bound_via_gap - db.bound_via_gap);
    val_up.add_upper(pt.k, fgap, vb.value_upper,
                     tol + vb_s.value_upper - vb.value_upper);
    val_lo.add_lower(pt.k, fgap, vb.value_lower,
                     tol + vb.value_lower - vb_s.value_lower);
    infeas.add_upper(pt.k, pt.delta_xbar, vb.infeasibility,
                     tol + vb_s.infeasibility - vb.infeasibility);
  }

  CertificateReport report;
  report.method = trace.method;
  report.series = {std::move(dist_dual.series), std::move(dist_gap.series),
                   std::move(val_up.series), std::move(val_lo.series),
                   std::move(infeas.series)};
  return report;
}

CertificateReport pg_rate_envelopes(const CertificateContext& ctx,
                                    const ProblemInstance& inst,
                                    const RunTrace& trace) {
  if (trace.method != "pg") {
    throw ConfigError("projected-gradient envelopes need a pg trace");
  }
  if (!(ctx.delta > 0) || !(ctx.rho > 0)) {
    throw ConfigError("envelope constants missing: call pg_envelope_constants");
  }
  const double mp = static_cast<double>(inst.dual_dim());
  const double radius = (trace.u0 - ctx.ref.u_star).norm();
  const double ustar_norm = ctx.ref.u_star.norm();

  SeriesBuilder gap_env("dual_gap_envelope", ctx.provenance);
  SeriesBuilder dist_env("distance_envelope", ctx.provenance);
  SeriesBuilder val_up_env("value_upper_envelope", ctx.provenance);
  SeriesBuilder val_lo_env("value_lower_envelope", ctx.provenance);
  SeriesBuilder infeas_env("infeasibility_envelope", ctx.provenance);
  SeriesBuilder tight_env("value_upper_envelope_tight",
                          ConstantProvenance::Exact);
  SeriesBuilder monotone("dual_distance_nonincreasing",
                         ConstantProvenance::Exact);

  double prev_dist = kInf;
  for (const auto& pt : trace.points) {
    const double tol = point_tolerance(ctx, pt.inner_residual);
    const double env =
        ctx.r0 / (1.0 + pt.k * ctx.r0 * ctx.delta / ctx.rho);
    const double gap = clamped_gap(ctx.ref.d_star, pt.dual_value);
    const double dist = (pt.xbar - ctx.ref.x_star).norm();
    const double fgap = pt.f_xbar - ctx.ref.f_star;
    const double udist = (pt.u - ctx.ref.u_star).norm();

    gap_env.add_upper(pt.k, gap, env, tol);
    dist_env.add_upper(pt.k, dist, std::sqrt(2.0 * env / ctx.theta), tol);
    val_up_env.add_upper(
        pt.k, fgap,
        (ustar_norm + radius) * std::sqrt(2.0 * mp * ctx.l_hat * env) + env,
        tol);
    val_lo_env.add_lower(pt.k, fgap,
                         -ustar_norm * std::sqrt(2.0 * ctx.l_hat * env), tol);
    infeas_env.add_upper(pt.k, pt.delta_xbar,
                         std::sqrt(2.0 * ctx.l_hat * env), tol);
    if (ctx.all_linear) {
      tight_env.add_upper(pt.k, fgap,
                          ctx.sigma_max_atilde * (ustar_norm + radius) *
                              std::sqrt(2.0 * env / ctx.theta),
                          tol);
    }
    if (pt.k > 0) {
      monotone.add_upper(pt.k, udist, prev_dist, 1e-9);
    }
    prev_dist = udist;
  }

  CertificateReport report;
  report.method = trace.method;
  report.series = {std::move(gap_env.series), std::move(dist_env.series),
                   std::move(val_up_env.series), std::move(val_lo_env.series),
                   std::move(infeas_env.series)};
  if (ctx.all_linear) report.series.push_back(std::move(tight_env.series));
  report.series.push_back(std::move(monotone.series));
  return report;
}

CertificateReport fg_rate_envelopes(
    const CertificateContext& ctx, const ProblemInstance& inst,
    const RunTrace& trace, FastGradientVariant variant,
    const std::optional<SlaterEnvelopeData>& slater) {
  const bool tseng = variant == FastGradientVariant::Tseng;
  if (trace.method != (tseng ? "tseng" : "fista")) {
    throw ConfigError("fast-gradient envelope variant does not match trace");
  }
  const double mp = static_cast<double>(inst.dual_dim());
  const double theta = ctx.theta;
  const double ustar_norm = ctx.ref.u_star.norm();

  // Shared structure: gap <= A/(k+1)^2, dist <= sqrt(2 A / theta)/(k+1)-style.
  // For the 1-memory method A = 4 L Q(u*, w0); for the FISTA-style method
  // A = 2 sigma_max^2 r0^2 / theta.
  double a_gap, dist_c, up_c_linear = 0.0, lo_c, infeas_c;
  double l_used;
  if (tseng) {
    l_used = trace.l_tilde;
    const double q = 0.5 * (ctx.ref.u_star - trace.w0).squaredNorm();
    a_gap = 4.0 * l_used * q;
    dist_c = std::sqrt(8.0 * l_used * q / theta);
    lo_c = -l_used * ustar_norm * std::sqrt(8.0 * q);
    infeas_c = l_used * std::sqrt(8.0 * q);
  } else {
    const double smax = ctx.sigma_max_atilde;
    if (!ctx.all_linear || !(smax > 0)) {
      throw ConfigError("FISTA envelopes need all-linear constraints");
    }
    const double r0 = (trace.u0 - ctx.ref.u_star).norm();
    l_used = smax * smax / theta;
    a_gap = 2.0 * smax * smax * r0 * r0 / theta;
    dist_c = 2.0 * smax * r0 / theta;
    up_c_linear = 2.0 * smax * smax * r0 / theta;
    lo_c = -2.0 * ustar_norm * smax * smax * r0 / theta;
    infeas_c = 2.0 * smax * smax * r0 / theta;
  }

  SeriesBuilder gap_env("dual_gap_envelope", ctx.provenance);
  SeriesBuilder dist_env("distance_envelope", ctx.provenance);
  SeriesBuilder val_up_env("value_upper_envelope", ctx.provenance);
  SeriesBuilder val_lo_env("value_lower_envelope", ctx.provenance);
  SeriesBuilder infeas_env("infeasibility_envelope", ctx.provenance);
  SeriesBuilder slater_env("value_upper_equality_free", ctx.provenance);

  const bool use_slater = slater.has_value() && inst.num_equalities() == 0;
  double slater_threshold = kInf;
  double slater_scale = 0.0;
  if (use_slater) {
    const double dgap_bar = clamped_gap(ctx.ref.d_star, slater->d_ubar);
    if (dgap_bar <= 0) {
      throw ConfigError("equality-free envelope needs a non-optimal u_bar");
    }
    double worst_g = -kInf;
    for (const auto& c : inst.inequalities()) {
      worst_g = std::max(worst_g, c.evaluator(slater->x_tilde));
    }
    if (worst_g >= 0) {
      throw ConfigError("equality-free envelope needs a strictly feasible point");
    }
    const double f_tilde = inst.objective().value(slater->x_tilde);
    // (d(u_bar) - f(x_tilde)) / max_i g_i(x_tilde): both factors negative.
    slater_scale = (slater->d_ubar - f_tilde) / worst_g;
    slater_threshold =
        tseng ? std::sqrt(a_gap / dgap_bar)
              : ctx.sigma_max_atilde * (trace.u0 - ctx.ref.u_star).norm() *
                    std::sqrt(2.0 / (theta * dgap_bar));
  }

  for (const auto& pt : trace.points) {
    if (pt.k < 1) continue;
    const double tol = point_tolerance(ctx, pt.inner_residual);
    const double kk = pt.k + 1.0;
    const double gap = clamped_gap(ctx.ref.d_star, pt.dual_value);
    const double dist = (pt.xbar - ctx.ref.x_star).norm();
    const double fgap = pt.f_xbar - ctx.ref.f_star;

    gap_env.add_upper(pt.k, gap, a_gap / (kk * kk), tol);
    dist_env.add_upper(pt.k, dist, dist_c / kk, tol);
    const double up =
        tseng ? l_used * pt.u.lpNorm<Eigen::Infinity>() * std::sqrt(8.0 * mp *
                    0.5 * (ctx.ref.u_star - trace.w0).squaredNorm()) / kk +
                    a_gap / (kk * kk)
              : up_c_linear * pt.u.norm() / kk;
    val_up_env.add_upper(pt.k, fgap, up, tol);
    val_lo_env.add_lower(pt.k, fgap, lo_c / kk, tol);
    infeas_env.add_upper(pt.k, pt.delta_xbar, infeas_c / kk, tol);

    if (use_slater && pt.k > slater_threshold) {
      const double se =
          tseng ? l_used * slater_scale *
                      std::sqrt(8.0 * mp *
                                0.5 * (ctx.ref.u_star - trace.w0).squaredNorm()) /
                      kk +
                      a_gap / (kk * kk)
                : up_c_linear * slater_scale / kk;
      slater_env.add_upper(pt.k, fgap, se, tol);
    }
  }

  CertificateReport report;
  report.method = trace.method;
  report.series = {std::move(gap_env.series), std::move(dist_env.series),
                   std::move(val_up_env.series), std::move(val_lo_env.series),
                   std::move(infeas_env.series)};
  if (use_slater) report.series.push_back(std::move(slater_env.series));
  return report;
}

LemmaCheckReport lemma_checks(
    const ProblemInstance& inst,
    const std::vector<std::pair<Vector, Vector>>& pairs,
    const OracleConfig& cfg, double tolerance, bool allow_extended_domain) {
  LemmaCheckReport report;
  report.worst_contraction_margin = kInf;
  report.worst_gradient_margin = kInf;
  const double l_hat = dual_gradient_lipschitz_bound(inst);
  const double linear_const =
      inst.all_linear() ? inst.spectral().sigma_max_atilde / inst.theta()
                        : 0.0;
  const Eigen::Index m = inst.num_inequalities();

  for (const auto& [raw_u, raw_v] : pairs) {
    Vector uu, vv;
    OracleResult ru, rv;
    if (allow_extended_domain) {
      uu = raw_u;
      vv = raw_v;
      ru = solve_lagrangian_extended(inst, uu, cfg);
      rv = solve_lagrangian_extended(inst, vv, cfg);
    } else {
      uu = project_onto_d(m, raw_u);
      vv = project_onto_d(m, raw_v);
      ru = solve_lagrangian(inst, DualPoint(uu, m), cfg);
      rv = solve_lagrangian(inst, DualPoint(vv, m), cfg);
    }
    const double udist = (uu - vv).norm();
    const double xdist = (ru.xbar - rv.xbar).norm();
    const double pair_tol =
        tolerance + (1.0 + l_hat) * (ru.inner_residual + rv.inner_residual);

    const double gamma_min =
        std::min(gamma_at(inst, ru), gamma_at(inst, rv));
    double rhs = gamma_min * udist;
    if (inst.all_linear()) {
      rhs = std::min(rhs, linear_const * udist);
      if (linear_const > gamma_min + 1e-12) {
        report.linear_constant_dominates = false;
      }
    }
    report.worst_contraction_margin =
        std::min(report.worst_contraction_margin, rhs - xdist);
    if (xdist > rhs + pair_tol) ++report.contraction_violations;

    const double gdist = (ru.dual_gradient - rv.dual_gradient).norm();
    report.worst_gradient_margin =
        std::min(report.worst_gradient_margin, l_hat * udist - gdist);
    if (gdist > l_hat * udist + pair_tol) ++report.gradient_violations;

    report.max_xbar_norm = std::max(
        {report.max_xbar_norm, ru.xbar.norm(), rv.xbar.norm()});
    ++report.pairs_checked;
  }
  return report;
}

}  // namespace dualcert
