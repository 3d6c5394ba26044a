#include "dualcert/problem.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dualcert {

namespace {

double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

void check_dim(const char* what, Eigen::Index got, Eigen::Index want) {
  if (got != want) {
    throw InputError(std::string(what) + ": expected dimension " +
                     std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

double ObjectiveModel::value(const Vector& x) const {
  if (kind == ObjectiveKind::Custom) return custom_value(x);
  check_dim("objective input", x.size(), hessian.rows());
  double v = 0.5 * x.dot(hessian * x) + linear.dot(x);
  if (gamma > 0 && l1_matrix.rows() > 0) {
    v += gamma * (l1_matrix * x - l1_shift).lpNorm<1>();
  }
  return v;
}

Vector ObjectiveModel::subgradient(const Vector& x) const {
  if (kind == ObjectiveKind::Custom) return custom_subgradient(x);
  check_dim("objective input", x.size(), hessian.rows());
  Vector g = hessian * x + linear;
  if (gamma > 0 && l1_matrix.rows() > 0) {
    Vector r = l1_matrix * x - l1_shift;
    g += gamma * (l1_matrix.transpose() * r.unaryExpr(&sign0));
  }
  return g;
}

InequalityConstraint InequalityConstraint::from_affine(Vector a, double b) {
  InequalityConstraint c;
  c.lipschitz = a.norm();
  c.affine = AffineForm{a, b};
  c.evaluator = [a, b](const Vector& x) { return a.dot(x) + b; };
  c.gradient = [a](const Vector&) { return a; };
  c.gradient_lipschitz = 0.0;
  return c;
}

FeasibleSet FeasibleSet::whole_space() {
  FeasibleSet s;
  s.kind = FeasibleSetKind::WholeSpace;
  return s;
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || (upper - lower).minCoeff() < 0) {
    throw InputError("box bounds must satisfy lower <= upper elementwise");
  }
  FeasibleSet s;
  s.kind = FeasibleSetKind::Box;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

std::optional<double> FeasibleSet::diameter() const {
  if (kind == FeasibleSetKind::WholeSpace) return std::nullopt;
  return (upper - lower).norm();
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (kind == FeasibleSetKind::WholeSpace) return true;
  return (x - lower).minCoeff() >= -tol && (upper - x).minCoeff() >= -tol;
}

namespace {

// sigma_min per the convention max{sqrt(lambda_min(AA^T)), sqrt(lambda_min(A^TA))}:
// the smallest singular value of the compact SVD.
std::pair<double, double> singular_range(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return {0.0, 0.0};
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  return {sv(0), sv(sv.size() - 1)};
}

}  // namespace

ProblemInstance::ProblemInstance(ObjectiveModel objective,
                                 std::vector<InequalityConstraint> inequalities,
                                 EqualityConstraints equalities, FeasibleSet set,
                                 std::optional<Vector> slater_point)
    : objective_(std::move(objective)),
      inequalities_(std::move(inequalities)),
      equalities_(std::move(equalities)),
      set_(std::move(set)),
      slater_point_(std::move(slater_point)) {
  const bool quadratic = objective_.kind != ObjectiveKind::Custom;
  if (quadratic) {
    n_ = objective_.hessian.rows();
    if (objective_.hessian.cols() != n_) {
      throw InputError("H must be square");
    }
    if (!objective_.hessian.isApprox(objective_.hessian.transpose(),
                                     1e-12)) {
      throw InputError("H must be symmetric");
    }
    check_dim("t", objective_.linear.size(), n_);
    if (objective_.gamma < 0) throw InputError("gamma must be nonnegative");
    if (objective_.gamma > 0 && objective_.l1_matrix.rows() > 0) {
      check_dim("P columns", objective_.l1_matrix.cols(), n_);
      check_dim("s", objective_.l1_shift.size(),
                objective_.l1_matrix.rows());
    }
  } else {
    if (!objective_.custom_value || !objective_.custom_subgradient ||
        objective_.theta <= 0) {
      throw InputError(
          "custom objectives need value, subgradient and theta > 0");
    }
    n_ = set_.is_box() ? set_.lower.size() : equalities_.a.cols();
    if (n_ <= 0) {
      throw InputError("cannot infer dimension for custom objective");
    }
  }

  m_ = static_cast<Eigen::Index>(inequalities_.size());
  p_ = equalities_.count();
  if (m_ + p_ == 0) {
    throw InputError("at least one inequality or equality constraint required");
  }
  if (p_ > 0) {
    check_dim("A columns", equalities_.a.cols(), n_);
    check_dim("b", equalities_.b.size(), p_);
    if (equalities_.a.isZero(0.0)) {
      throw InputError("equality matrix must not be the zero matrix");
    }
  }
  if (set_.is_box()) check_dim("box bounds", set_.lower.size(), n_);
  if (slater_point_) check_dim("slater point", slater_point_->size(), n_);

  all_linear_ = std::all_of(inequalities_.begin(), inequalities_.end(),
                            [](const auto& c) { return c.is_affine(); });

  // Stacked constraint matrix for the all-linear specializations.
  if (all_linear_) {
    stacked_a_.resize(m_ + p_, n_);
    stacked_b_.resize(m_ + p_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      stacked_a_.row(i) = inequalities_[static_cast<size_t>(i)].affine->a;
      stacked_b_(i) = inequalities_[static_cast<size_t>(i)].affine->b;
    }
    if (p_ > 0) {
      stacked_a_.bottomRows(p_) = equalities_.a;
      stacked_b_.tail(p_) = equalities_.b;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  spectral_.sigma_max_a = singular_range(equalities_.a).first;
  if (all_linear_) {
    auto [smax, smin] = singular_range(stacked_a_);
    spectral_.sigma_max_atilde = smax;
    spectral_.sigma_min_atilde = smin;
  } else {
    spectral_.sigma_max_atilde = nan;
    spectral_.sigma_min_atilde = nan;
  }

  if (quadratic) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(objective_.hessian,
                                             Eigen::EigenvaluesOnly);
    spectral_.lambda_min_h = es.eigenvalues().minCoeff();
    spectral_.lambda_max_h = es.eigenvalues().maxCoeff();
    if (spectral_.lambda_min_h <= 0) {
      throw InputError("H must be positive definite");
    }
    if (objective_.theta <= 0) {
      objective_.theta = spectral_.lambda_min_h;
    } else if (objective_.theta > spectral_.lambda_min_h * (1 + 1e-9)) {
      throw InputError("theta exceeds the smallest eigenvalue of H");
    }
    hessian_llt_ = std::make_shared<Eigen::LLT<Matrix>>(objective_.hessian);
    if (hessian_llt_->info() != Eigen::Success) {
      throw InputError("Cholesky factorization of H failed");
    }
  } else {
    spectral_.lambda_min_h = nan;
    spectral_.lambda_max_h = nan;
  }
}

const Matrix& ProblemInstance::stacked_a() const {
  if (!all_linear_) {
    throw UnsupportedProblemError(
        "stacked constraint matrix requires affine inequalities");
  }
  return stacked_a_;
}

const Vector& ProblemInstance::stacked_b() const {
  if (!all_linear_) {
    throw UnsupportedProblemError(
        "stacked constraint offset requires affine inequalities");
  }
  return stacked_b_;
}

const Eigen::LLT<Matrix>& ProblemInstance::hessian_factorization() const {
  if (!hessian_llt_) {
    throw UnsupportedProblemError("no Hessian factorization for this objective");
  }
  return *hessian_llt_;
}

bool ProblemInstance::slater_point_valid(double equality_tol) const {
  if (!slater_point_) return false;
  const Vector& x = *slater_point_;
  if (!set_.contains(x, 0.0)) return false;
  for (const auto& c : inequalities_) {
    if (c.evaluator(x) >= 0) return false;
  }
  if (p_ > 0) {
    if ((equalities_.a * x + equalities_.b).lpNorm<Eigen::Infinity>() >
        equality_tol) {
      return false;
    }
  }
  return true;
}

double eval_objective(const ProblemInstance& inst, const Vector& x) {
  check_dim("x", x.size(), inst.dim_n());
  if (!x.allFinite()) throw InputError("x must be finite");
  return inst.objective().value(x);
}

Vector constraint_values(const ProblemInstance& inst, const Vector& x) {
  check_dim("x", x.size(), inst.dim_n());
  Vector g(inst.dual_dim());
  const auto& ineqs = inst.inequalities();
  for (size_t i = 0; i < ineqs.size(); ++i) {
    g(static_cast<Eigen::Index>(i)) = ineqs[i].evaluator(x);
  }
  if (inst.num_equalities() > 0) {
    g.tail(inst.num_equalities()) =
        inst.equalities().a * x + inst.equalities().b;
  }
  return g;
}

double infeasibility(const ProblemInstance& inst, const Vector& x) {
  Vector g = constraint_values(inst, x);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < inst.num_inequalities(); ++i) {
    sq += std::pow(std::max(0.0, g(i)), 2);
  }
  if (inst.num_equalities() > 0) {
    sq += g.tail(inst.num_equalities()).squaredNorm();
  }
  return std::sqrt(sq);
}

Vector project_onto_d(Eigen::Index num_inequalities, const Vector& v) {
  if (num_inequalities > v.size()) {
    throw InputError("more inequality multipliers than dual components");
  }
  Vector out = v;
  for (Eigen::Index i = 0; i < num_inequalities; ++i) {
    out(i) = std::max(0.0, out(i));
  }
  return out;
}

Vector project_onto_x(const FeasibleSet& set, const Vector& x) {
  if (!set.is_box()) return x;
  return x.cwiseMax(set.lower).cwiseMin(set.upper);
}

SpectralConstants spectral_constants(const ProblemInstance& inst) {
  SpectralConstants out;
  out.sigma_max_a = singular_range(inst.equalities().a).first;
  if (inst.all_linear()) {
    auto [smax, smin] = singular_range(inst.stacked_a());
    out.sigma_max_atilde = smax;
    out.sigma_min_atilde = smin;
  } else {
    out.sigma_max_atilde = std::numeric_limits<double>::quiet_NaN();
    out.sigma_min_atilde = std::numeric_limits<double>::quiet_NaN();
  }
  out.lambda_min_h = inst.spectral().lambda_min_h;
  out.lambda_max_h = inst.spectral().lambda_max_h;
  return out;
}

}  // namespace dualcert
