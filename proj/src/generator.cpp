#include "dualcert/generator.hpp"

#include <cmath>
#include <random>

namespace dualcert {

namespace {

// Thin deterministic layer over mt19937_64: raw engine output is pinned by
// the standard, unlike the distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = normal();
    }
    return a;
  }

 private:
  std::mt19937_64 engine_;
};

Matrix random_spd(Rng& rng, int n, double lambda_min, double lambda_max,
                  bool diagonal) {
  Vector eigs(n);
  for (int i = 0; i < n; ++i) eigs(i) = rng.uniform(lambda_min, lambda_max);
  eigs(0) = lambda_min;
  if (n > 1) eigs(n - 1) = lambda_max;
  if (diagonal) return eigs.asDiagonal();
  const Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(n, n));
  const Matrix q = qr.householderQ();
  return q * eigs.asDiagonal() * q.transpose();
}

Matrix full_row_rank(Rng& rng, int rows, int cols) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix a = rng.normal_matrix(rows, cols);
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-6 * sv(0)) return a;
  }
  throw ConfigError("could not draw a full-row-rank equality matrix");
}

}  // namespace

ProblemInstance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.n <= 0) throw InputError("n must be positive");
  if (cfg.m < 0 || cfg.p < 0 || cfg.q < 0) {
    throw InputError("constraint counts must be nonnegative");
  }
  if (cfg.m + cfg.p == 0) {
    throw InputError("need at least one inequality or equality constraint");
  }
  if (cfg.p > cfg.n) {
    throw InputError("more equality constraints than variables");
  }
  if (cfg.gamma < 0) throw InputError("gamma must be nonnegative");
  if (!(cfg.h_eigenvalue_min > 0) ||
      cfg.h_eigenvalue_max < cfg.h_eigenvalue_min) {
    throw InputError("eigenvalue range must satisfy 0 < min <= max");
  }

  Rng rng(cfg.seed);

  ObjectiveModel obj;
  obj.kind = cfg.gamma > 0 ? ObjectiveKind::QuadraticPlusL1
                           : ObjectiveKind::Quadratic;
  obj.hessian = random_spd(rng, cfg.n, cfg.h_eigenvalue_min,
                           cfg.h_eigenvalue_max, cfg.diagonal_hessian);
  obj.linear = rng.normal_vector(cfg.n);
  obj.gamma = cfg.gamma;
  if (cfg.gamma > 0 && cfg.q > 0) {
    obj.l1_matrix = (cfg.diagonal_hessian && cfg.q == cfg.n)
                        ? Matrix(Matrix::Identity(cfg.q, cfg.n))
                        : rng.normal_matrix(cfg.q, cfg.n);
    obj.l1_shift = rng.normal_vector(cfg.q);
  }
  if (cfg.gamma == 0) {
    // f is differentiable; its gradient Lipschitz constant enables the
    // linear-rate diagnostics.
    obj.subgradient_lipschitz = cfg.h_eigenvalue_max;
  }

  FeasibleSet set =
      cfg.whole_space
          ? FeasibleSet::whole_space()
          : FeasibleSet::box(Vector::Constant(cfg.n, -cfg.box_radius),
                             Vector::Constant(cfg.n, cfg.box_radius));

  Vector interior(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    interior(i) = cfg.whole_space
                      ? 0.5 * rng.normal()
                      : rng.uniform(-0.5 * cfg.box_radius,
                                    0.5 * cfg.box_radius);
  }

  std::vector<InequalityConstraint> ineqs;
  ineqs.reserve(static_cast<size_t>(cfg.m));
  for (int i = 0; i < cfg.m; ++i) {
    Vector a = rng.normal_vector(cfg.n);
    double b;
    if (cfg.ensure_slater) {
      b = -a.dot(interior) - rng.uniform(0.1, 1.0);
    } else {
      b = rng.normal();
    }
    ineqs.push_back(InequalityConstraint::from_affine(std::move(a), b));
  }

  EqualityConstraints eqs;
  if (cfg.p > 0) {
    eqs.a = full_row_rank(rng, cfg.p, cfg.n);
    eqs.b = cfg.ensure_slater ? Vector(-eqs.a * interior)
                              : rng.normal_vector(cfg.p);
  } else {
    eqs.a.resize(0, cfg.n);
    eqs.b.resize(0);
  }

  std::optional<Vector> slater;
  if (cfg.ensure_slater) slater = interior;

  return ProblemInstance(std::move(obj), std::move(ineqs), std::move(eqs),
                         std::move(set), std::move(slater));
}

}  // namespace dualcert
