#include <doctest.h>

#include <cmath>

#include "dualcert/constants.hpp"
#include "dualcert/oracle.hpp"
#include "test_util.hpp"

using namespace dualcert;
using namespace dualcert::testing;

namespace {

DualPoint dual(const ProblemInstance& inst, std::initializer_list<double> vals) {
  Vector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v(i++) = x;
  return DualPoint(v, inst.num_inequalities());
}

}  // namespace

TEST_CASE("closed-form oracle on the analytic instances") {
  auto t1 = make_t1();
  SUBCASE("inequality instance at u = 0.5") {
    auto res = solve_lagrangian(t1, dual(t1, {0.5}));
    CHECK(res.exact_path);
    CHECK(res.xbar(0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(res.dual_value == doctest::Approx(0.375).epsilon(1e-13));
    CHECK(res.dual_gradient(0) == doctest::Approx(0.5).epsilon(1e-13));
    // Brute force: minimize 1/2 x^2 + 0.5 (1 - x) directly.
    const double xb = golden_min(
        [](double x) { return 0.5 * x * x + 0.5 * (1.0 - x); }, -10.0, 10.0);
    CHECK(res.xbar(0) == doctest::Approx(xb).epsilon(1e-6));
  }
  SUBCASE("equality instance at the dual optimum") {
    auto eq = make_equality();
    auto res = solve_lagrangian(eq, dual(eq, {-1.0}));
    CHECK(res.xbar(0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(res.dual_value == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(res.dual_gradient(0) == doctest::Approx(0.0).epsilon(1e-13));
    const double xb = golden_min(
        [](double x) { return 0.5 * x * x - (x - 1.0); }, -10.0, 10.0);
    CHECK(res.xbar(0) == doctest::Approx(xb).epsilon(1e-6));
  }
  SUBCASE("zero dual point of an unconstrained-minimum quadratic") {
    auto eq = make_equality();  // t = 0, so xbar(0) = 0
    auto res = solve_lagrangian(eq, dual(eq, {0.0}));
    CHECK(res.xbar(0) == 0.0);
    CHECK(res.dual_value == 0.0);  // d(0) = min 1/2 x^2
  }
}

TEST_CASE("separable exact path matches per-coordinate brute force") {
  auto inst = make_separable(21);
  Sampler rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    Vector uv = rng.dual_point(inst, 1.5);
    DualPoint u(uv, inst.num_inequalities());
    auto res = solve_lagrangian(inst, u);
    CHECK(res.exact_path);
    // The Lagrangian is coordinatewise separable here; golden-section each
    // coordinate as an independent check of the closed form.
    const auto& obj = inst.objective();
    Vector linear = obj.linear;
    for (Eigen::Index i = 0; i < inst.num_inequalities(); ++i) {
      linear += uv(i) * inst.inequalities()[static_cast<size_t>(i)].affine->a;
    }
    if (inst.num_equalities() > 0) {
      linear += inst.equalities().a.transpose() * uv.tail(inst.num_equalities());
    }
    for (Eigen::Index j = 0; j < inst.dim_n(); ++j) {
      const double h = obj.hessian(j, j);
      const double c = linear(j);
      const double s = obj.l1_shift(j);
      const double g = obj.gamma;
      const double lo = inst.set().lower(j), hi = inst.set().upper(j);
      const double xj = golden_min(
          [&](double z) {
            return 0.5 * h * z * z + c * z + g * std::abs(z - s);
          },
          lo, hi, 1e-13);
      CHECK(res.xbar(j) == doctest::Approx(xj).epsilon(1e-7));
    }
  }
}

TEST_CASE("dual value identity") {
  SUBCASE("exact paths are identities up to roundoff") {
    auto t1 = make_t1();
    Sampler rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      DualPoint u(Vector::Constant(1, rng.uniform(0.0, 3.0)), 1);
      auto res = solve_lagrangian(t1, u);
      CHECK(dual_gap_identity_check(res, t1, u) <= 1e-12);
    }
  }
  SUBCASE("iterative oracle keeps the identity within the scaled budget") {
    auto inst = make_experiment_instance(31);
    OracleConfig cfg(1e-8);
    Sampler rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      Vector uv = rng.dual_point(inst, 2.0);
      DualPoint u(uv, inst.num_inequalities());
      auto res = solve_lagrangian(inst, u, cfg);
      CHECK(res.inner_residual <= 1e-8);
      CHECK(dual_gap_identity_check(res, inst, u) <=
            1e-6 * (1.0 + uv.lpNorm<1>()));
    }
  }
  SUBCASE("gradient term vanishes at u = 0") {
    auto inst = make_separable(41);
    DualPoint u = DualPoint::zero(inst);
    auto res = solve_lagrangian(inst, u);
    CHECK(std::abs(inst.objective().value(res.xbar) - res.dual_value) <= 1e-12);
  }
}

TEST_CASE("iterative oracle solves the composite Lagrangian") {
  auto inst = make_experiment_instance(51);
  OracleConfig cfg(1e-10);
  Sampler rng(52);
  for (int trial = 0; trial < 5; ++trial) {
    Vector uv = rng.dual_point(inst, 1.0);
    DualPoint u(uv, inst.num_inequalities());
    auto res = solve_lagrangian(inst, u, cfg);
    CHECK_FALSE(res.exact_path);
    CHECK(res.inner_residual <= 1e-10);
    // Lagrangian optimality with the strong-convexity growth: any sampled
    // point of X must sit at least theta/2 ||y - xbar||^2 above the minimum.
    const double lx = lagrangian_value(inst, res.xbar, uv);
    for (int probe = 0; probe < 40; ++probe) {
      Vector y = project_onto_x(inst.set(),
                                rng.uniform_vector(inst.dim_n(), -1.0, 1.0));
      const double ly = lagrangian_value(inst, y, uv);
      CHECK(ly - lx >=
            0.5 * inst.theta() * (y - res.xbar).squaredNorm() - 1e-7);
    }
  }
}

TEST_CASE("accelerated path handles smooth nonlinear constraints") {
  auto inst = make_nonlinear_box();
  OracleConfig cfg(1e-11);
  auto res = solve_lagrangian(inst, dual(inst, {0.7}));
  CHECK(res.inner_residual <= 1e-11);
  const double lx = lagrangian_value(inst, res.xbar, Vector::Constant(1, 0.7));
  Sampler rng(61);
  for (int probe = 0; probe < 60; ++probe) {
    Vector y = project_onto_x(inst.set(),
                              rng.uniform_vector(inst.dim_n(), -1.0, 1.0));
    CHECK(lagrangian_value(inst, y, Vector::Constant(1, 0.7)) - lx >=
          0.5 * inst.theta() * (y - res.xbar).squaredNorm() - 1e-8);
  }
  CHECK(res.dual_gradient(0) ==
        doctest::Approx(res.xbar.squaredNorm() - 1.0).epsilon(1e-12));
}

TEST_CASE("finite-difference dual gradient") {
  SUBCASE("inequality instance") {
    auto t1 = make_t1();
    Vector fd = finite_difference_dual_gradient(t1, dual(t1, {0.5}), 1e-5);
    CHECK(fd(0) == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("equality instance at zero") {
    auto eq = make_equality();
    Vector fd = finite_difference_dual_gradient(eq, dual(eq, {0.0}), 1e-5);
    CHECK(fd(0) == doctest::Approx(-1.0).epsilon(1e-8));
  }
  SUBCASE("matches the analytic gradient on a linear instance") {
    GeneratorConfig cfg;
    cfg.seed = 71;
    cfg.n = 6;
    cfg.q = 0;
    cfg.gamma = 0.0;
    cfg.whole_space = true;
    auto inst = generate_instance(cfg);
    Sampler rng(72);
    for (int trial = 0; trial < 5; ++trial) {
      Vector uv = rng.dual_point(inst, 1.0);
      DualPoint u(uv, inst.num_inequalities());
      auto res = solve_lagrangian(inst, u);
      Vector fd = finite_difference_dual_gradient(inst, u, 1e-5);
      CHECK((fd - res.dual_gradient).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
  }
}

TEST_CASE("sampled concavity and weak duality of the dual function") {
  auto inst = make_separable(81);
  Sampler rng(82);
  const Vector slater = *inst.slater_point();
  const double f_slater = inst.objective().value(slater);
  for (int trial = 0; trial < 30; ++trial) {
    Vector a = rng.dual_point(inst, 2.0);
    Vector b = rng.dual_point(inst, 2.0);
    const double lambda = rng.uniform01();
    Vector mid = lambda * a + (1.0 - lambda) * b;
    const double da =
        solve_lagrangian(inst, DualPoint(a, inst.num_inequalities())).dual_value;
    const double db =
        solve_lagrangian(inst, DualPoint(b, inst.num_inequalities())).dual_value;
    const double dmid =
        solve_lagrangian(inst, DualPoint(mid, inst.num_inequalities())).dual_value;
    CHECK(dmid >= lambda * da + (1.0 - lambda) * db - 1e-10);
    CHECK(da <= f_slater + 1e-10);  // weak duality against a feasible point
  }
}

TEST_CASE("sampled primal contraction across dual points") {
  auto inst = make_separable(91);
  Sampler rng(92);
  const double linear_const =
      inst.spectral().sigma_max_atilde / inst.theta();
  for (int trial = 0; trial < 40; ++trial) {
    Vector a = rng.dual_point(inst, 2.0);
    Vector b = rng.dual_point(inst, 2.0);
    auto ra = solve_lagrangian(inst, DualPoint(a, inst.num_inequalities()));
    auto rb = solve_lagrangian(inst, DualPoint(b, inst.num_inequalities()));
    const double lhs = (ra.xbar - rb.xbar).norm();
    const double gamma_min = std::min(gamma_at(inst, ra), gamma_at(inst, rb));
    CHECK(lhs <= gamma_min * (a - b).norm() + 1e-9);
    CHECK(lhs <= linear_const * (a - b).norm() + 1e-9);
  }
}

TEST_CASE("oracle failure carries the best iterate") {
  auto inst = make_experiment_instance(99);
  OracleConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.max_inner_iterations = 3;
  try {
    solve_lagrangian(inst, DualPoint::zero(inst), cfg);
    FAIL("expected OracleFailure");
  } catch (const OracleFailure& f) {
    CHECK(f.best_iterate.size() == inst.dim_n());
    CHECK(f.iterations == 3);
  }
}

TEST_CASE("oracle determinism") {
  auto inst = make_experiment_instance(111);
  Vector uv(inst.dual_dim());
  uv << 0.3, 0.0, 1.2, -0.4, 0.9;
  DualPoint u(uv, inst.num_inequalities());
  auto r1 = solve_lagrangian(inst, u);
  auto r2 = solve_lagrangian(inst, u);
  CHECK((r1.xbar - r2.xbar).norm() == 0.0);
  CHECK(r1.dual_value == r2.dual_value);
}

TEST_CASE("bounded Lagrangian minimizers over a dual ball") {
  auto inst = make_experiment_instance(121);
  Sampler rng(122);
  double max_norm = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    Vector uv = rng.dual_point(inst, 5.0);
    auto res = solve_lagrangian(inst, DualPoint(uv, inst.num_inequalities()));
    max_norm = std::max(max_norm, res.xbar.norm());
  }
  CHECK(std::isfinite(max_norm));
  // Box-constrained instance: the minimizers live inside the box.
  CHECK(max_norm <= std::sqrt(static_cast<double>(inst.dim_n())) + 1e-9);
}

TEST_CASE("extended-domain oracle evaluation") {
  auto inst = make_separable(131);
  SUBCASE("accepts negative inequality multipliers on affine problems") {
    Sampler rng(132);
    Vector u(inst.dual_dim());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.uniform(-0.5, 0.5);
    auto res = solve_lagrangian_extended(inst, u);
    CHECK(res.xbar.allFinite());
    // The identity between objective, dual value, and gradient still holds.
    const double f = inst.objective().value(res.xbar);
    CHECK(std::abs(f - res.dual_value + res.dual_gradient.dot(u)) <= 1e-10);
  }
  SUBCASE("rejected for nonlinear inequalities") {
    auto ball = make_nonlinear_box();
    CHECK_THROWS_AS(
        solve_lagrangian_extended(ball, Vector::Constant(1, -0.1)),
        UnsupportedProblemError);
  }
}

TEST_CASE("custom objective goes through the iterative path") {
  // Callback form of 1/2 ||x||^2 + t.x over a box with one affine
  // constraint; must match the built-in quadratic result.
  Vector t_vec(2);
  t_vec << -0.7, 0.4;
  ObjectiveModel custom;
  custom.kind = ObjectiveKind::Custom;
  custom.custom_value = [t_vec](const Vector& x) {
    return 0.5 * x.squaredNorm() + t_vec.dot(x);
  };
  custom.custom_subgradient = [t_vec](const Vector& x) {
    return Vector(x + t_vec);
  };
  custom.theta = 1.0;
  custom.subgradient_lipschitz = 1.0;

  Vector a(2);
  a << 1.0, 1.0;
  std::vector<InequalityConstraint> ineqs{
      InequalityConstraint::from_affine(a, -0.5)};
  EqualityConstraints eqs;
  eqs.a.resize(0, 2);
  eqs.b.resize(0);
  auto box = FeasibleSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  ProblemInstance inst(custom, ineqs, eqs, box);

  ObjectiveModel quad;
  quad.kind = ObjectiveKind::Quadratic;
  quad.hessian = Matrix::Identity(2, 2);
  quad.linear = t_vec;
  ProblemInstance reference_inst(quad, ineqs, eqs, box);

  Vector uv = Vector::Constant(1, 0.3);
  auto res = solve_lagrangian(inst, DualPoint(uv, 1), OracleConfig(1e-11));
  auto expect = solve_lagrangian(reference_inst, DualPoint(uv, 1));
  CHECK((res.xbar - expect.xbar).norm() <= 1e-9);
  CHECK(res.dual_value == doctest::Approx(expect.dual_value).epsilon(1e-9));
}
