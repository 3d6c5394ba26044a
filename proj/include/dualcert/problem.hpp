#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dualcert/types.hpp"

namespace dualcert {

enum class ObjectiveKind { QuadraticPlusL1, Quadratic, Custom };

/// Strongly convex objective. The built-in form is
///   f(x) = 1/2 x^T H x + t^T x + gamma * ||P x - s||_1
/// with H symmetric positive definite. Quadratic is the gamma = 0 special
/// case. Custom objectives supply value and subgradient callbacks together
/// with a valid convexity modulus theta; the inner solver treats the returned
/// subgradient as a gradient, so custom objectives must be differentiable.
struct ObjectiveModel {
  ObjectiveKind kind = ObjectiveKind::Quadratic;

  Matrix hessian;   // H, n x n
  Vector linear;    // t, n
  double gamma = 0.0;
  Matrix l1_matrix;  // P, q x n (rows may be empty when gamma == 0)
  Vector l1_shift;   // s, q

  std::function<double(const Vector&)> custom_value;
  std::function<Vector(const Vector&)> custom_subgradient;

  // Strong-convexity modulus over X. Defaults to lambda_min(H) for the
  // quadratic kinds; a user-supplied smaller positive value is also valid.
  double theta = 0.0;

  // Lipschitz constant of the subgradients of f on X. Only needed for the
  // linear-rate analysis; ignored elsewhere.
  std::optional<double> subgradient_lipschitz;

  double value(const Vector& x) const;
  // Any valid subgradient; at l1 kinks the sign-0 element is chosen.
  Vector subgradient(const Vector& x) const;
};

/// One inequality constraint g(x) <= 0, convex on X with known Lipschitz
/// constant. Affine constraints additionally carry their (a, b) form, which
/// enables the exact oracle paths and the linear-case certificates.
struct InequalityConstraint {
  std::function<double(const Vector&)> evaluator;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;  // L_i, |g(x) - g(y)| <= L_i ||x - y|| on X

  struct AffineForm {
    Vector a;
    double b = 0.0;
  };
  std::optional<AffineForm> affine;

  // Lipschitz constant of the gradient on X, needed only for the
  // compact-X/Lipschitz-g step-size rules on nonlinear constraints.
  std::optional<double> gradient_lipschitz;

  static InequalityConstraint from_affine(Vector a, double b);

  bool is_affine() const { return affine.has_value(); }
};

/// Linear equality constraints A x + b = 0.
struct EqualityConstraints {
  Matrix a;  // p x n; p == 0 means no equality constraints
  Vector b;  // p

  Eigen::Index count() const { return a.rows(); }
};

enum class FeasibleSetKind { Box, WholeSpace };

/// The set constraint X: either all of R^n or a coordinate box.
struct FeasibleSet {
  FeasibleSetKind kind = FeasibleSetKind::WholeSpace;
  Vector lower;  // n, Box only
  Vector upper;  // n, Box only

  static FeasibleSet whole_space();
  static FeasibleSet box(Vector lower, Vector upper);

  bool is_box() const { return kind == FeasibleSetKind::Box; }
  std::optional<double> diameter() const;
  bool contains(const Vector& x, double tol = 0.0) const;
};

/// Spectral data cached on the instance: sigma_max(A) for the equality
/// block, sigma_max/sigma_min of the stacked constraint matrix when all
/// inequalities are affine, and the eigenvalue range of H.
struct SpectralConstants {
  double sigma_max_a = 0.0;
  double sigma_max_atilde = 0.0;  // NaN when some inequality is nonlinear
  double sigma_min_atilde = 0.0;  // NaN when some inequality is nonlinear
  double lambda_min_h = 0.0;      // NaN for custom objectives
  double lambda_max_h = 0.0;      // NaN for custom objectives
};

/// Immutable description of the constrained problem
///   minimize f(x)  s.t.  g_i(x) <= 0, A x + b = 0, x in X.
/// All derived constants are computed once at construction; instances are
/// safe to share across concurrent method runs.
class ProblemInstance {
 public:
  ProblemInstance(ObjectiveModel objective,
                  std::vector<InequalityConstraint> inequalities,
                  EqualityConstraints equalities, FeasibleSet set,
                  std::optional<Vector> slater_point = std::nullopt);

  const ObjectiveModel& objective() const { return objective_; }
  const std::vector<InequalityConstraint>& inequalities() const {
    return inequalities_;
  }
  const EqualityConstraints& equalities() const { return equalities_; }
  const FeasibleSet& set() const { return set_; }
  const std::optional<Vector>& slater_point() const { return slater_point_; }

  Eigen::Index dim_n() const { return n_; }
  Eigen::Index num_inequalities() const { return m_; }
  Eigen::Index num_equalities() const { return p_; }
  Eigen::Index dim_q() const { return objective_.l1_matrix.rows(); }
  Eigen::Index dual_dim() const { return m_ + p_; }

  double theta() const { return objective_.theta; }
  const SpectralConstants& spectral() const { return spectral_; }

  // True when every inequality constraint is affine.
  bool all_linear() const { return all_linear_; }
  // Stacked [A'; A] and [b'; b], defined only when all_linear().
  const Matrix& stacked_a() const;
  const Vector& stacked_b() const;

  // Cached Cholesky factor of H (quadratic objectives only).
  const Eigen::LLT<Matrix>& hessian_factorization() const;

  // Strict feasibility of the stored Slater point (g < 0, |Ax+b| <= tol).
  bool slater_point_valid(double equality_tol = 1e-9) const;

 private:
  ObjectiveModel objective_;
  std::vector<InequalityConstraint> inequalities_;
  EqualityConstraints equalities_;
  FeasibleSet set_;
  std::optional<Vector> slater_point_;

  Eigen::Index n_ = 0, m_ = 0, p_ = 0;
  bool all_linear_ = false;
  Matrix stacked_a_;
  Vector stacked_b_;
  SpectralConstants spectral_;
  std::shared_ptr<const Eigen::LLT<Matrix>> hessian_llt_;
};

double eval_objective(const ProblemInstance& inst, const Vector& x);

/// Euclidean norm of the dualized-constraint residual: equality residuals
/// stacked with the positive parts of the inequality values.
double infeasibility(const ProblemInstance& inst, const Vector& x);

/// Values of all dualized constraints at x: [g_1(x),...,g_m(x),(Ax+b)^T]^T.
Vector constraint_values(const ProblemInstance& inst, const Vector& x);

/// Projection onto D = R^m_+ x R^p: clamps the first m components at zero
/// and leaves equality multipliers untouched.
Vector project_onto_d(Eigen::Index num_inequalities, const Vector& v);

/// Euclidean projection onto X (identity for the whole space, per-coordinate
/// clamp for a box).
Vector project_onto_x(const FeasibleSet& set, const Vector& x);

/// Recomputes the cached constants (exposed for validation; instances always
/// use the values cached at construction).
SpectralConstants spectral_constants(const ProblemInstance& inst);

/// Dual variable known to lie in D.
class DualPoint {
 public:
  DualPoint(Vector v, Eigen::Index num_inequalities)
      : value_(project_onto_d(num_inequalities, v)),
        num_inequalities_(num_inequalities) {}

  static DualPoint zero(const ProblemInstance& inst) {
    return DualPoint(Vector::Zero(inst.dual_dim()), inst.num_inequalities());
  }

  const Vector& value() const { return value_; }
  Eigen::Index num_inequalities() const { return num_inequalities_; }

 private:
  Vector value_;
  Eigen::Index num_inequalities_;
};

}  // namespace dualcert
