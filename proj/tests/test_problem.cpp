#include <doctest.h>

#include <cmath>

#include "dualcert/problem.hpp"
#include "test_util.hpp"

using namespace dualcert;
using namespace dualcert::testing;

namespace {

ProblemInstance quad_instance(Matrix h, Vector t, double gamma, Matrix p,
                              Vector s, FeasibleSet set = FeasibleSet::whole_space()) {
  ObjectiveModel obj;
  obj.kind = gamma > 0 ? ObjectiveKind::QuadraticPlusL1 : ObjectiveKind::Quadratic;
  obj.hessian = std::move(h);
  obj.linear = std::move(t);
  obj.gamma = gamma;
  obj.l1_matrix = std::move(p);
  obj.l1_shift = std::move(s);
  const Eigen::Index n = obj.hessian.rows();
  Vector a = Vector::Ones(n);
  std::vector<InequalityConstraint> ineqs{
      InequalityConstraint::from_affine(a, -100.0)};
  EqualityConstraints eqs;
  eqs.a.resize(0, n);
  eqs.b.resize(0);
  return ProblemInstance(std::move(obj), std::move(ineqs), std::move(eqs),
                         std::move(set));
}

}  // namespace

TEST_CASE("objective evaluation") {
  SUBCASE("scalar quadratic") {
    auto inst = quad_instance(Matrix::Identity(1, 1), Vector::Zero(1), 0.0, {}, {});
    Vector x(1);
    x << 2.0;
    CHECK(eval_objective(inst, x) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("quadratic plus l1") {
    Vector t(2);
    t << 1.0, 0.0;
    auto inst = quad_instance(Matrix::Identity(2, 2), t, 1.0,
                              Matrix::Identity(2, 2), Vector::Zero(2));
    Vector x(2);
    x << 1.0, -1.0;
    CHECK(eval_objective(inst, x) == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("zero input") {
    auto inst = quad_instance(Matrix::Identity(2, 2), Vector::Zero(2), 1.0,
                              Matrix::Identity(2, 2), Vector::Zero(2));
    CHECK(eval_objective(inst, Vector::Zero(2)) == 0.0);
  }
  SUBCASE("dimension mismatch") {
    auto inst = quad_instance(Matrix::Identity(2, 2), Vector::Zero(2), 0.0, {}, {});
    CHECK_THROWS_AS(eval_objective(inst, Vector::Zero(3)), InputError);
  }
}

TEST_CASE("infeasibility measure") {
  ObjectiveModel obj;
  obj.kind = ObjectiveKind::Quadratic;
  obj.hessian = Matrix::Identity(2, 2);
  obj.linear = Vector::Zero(2);

  // g_1 = x1 - 1 <= 0, g_2 = x2 - 0.5 <= 0 and equalities picked so the
  // residuals below are hit exactly.
  Vector a1(2), a2(2);
  a1 << 1.0, 0.0;
  a2 << 0.0, 1.0;
  std::vector<InequalityConstraint> ineqs{
      InequalityConstraint::from_affine(a1, -1.0),
      InequalityConstraint::from_affine(a2, -0.5)};
  EqualityConstraints eqs;
  eqs.a = Matrix::Identity(2, 2);
  eqs.b = Vector::Zero(2);
  ProblemInstance inst(obj, ineqs, eqs, FeasibleSet::whole_space());

  SUBCASE("feasible point") {
    CHECK(infeasibility(inst, Vector::Zero(2)) == 0.0);
  }
  SUBCASE("mixed residuals") {
    // Ax+b = (0.3, -0.4), g = (-0.7, -0.9): equality part only.
    Vector x(2);
    x << 0.3, -0.4;
    CHECK(infeasibility(inst, x) == doctest::Approx(0.5).epsilon(1e-14));
    // g = (-1, 0.5) with equality residual (0.3, -0.4): full definition.
    Vector y(2);
    y << 0.0, 1.0;
    // g(y) = (-1, 0.5), Ay+b = (0, 1) -> sqrt(0.25 + 1)
    CHECK(infeasibility(inst, y) ==
          doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  }
  SUBCASE("hand value sqrt(0.5)") {
    // Direct arithmetic of the definition with residuals (0.3,-0.4) and
    // positive part 0.5.
    const double v = std::sqrt(0.09 + 0.16 + 0.25);
    CHECK(v == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  }
  SUBCASE("equality only") {
    auto eq = make_equality();
    Vector x(1);
    x << 2.0;  // residual x - 1 = 1
    CHECK(infeasibility(eq, x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("projection onto the dual cone") {
  SUBCASE("clamps inequality multipliers only") {
    Vector v(3);
    v << -1.0, 2.0, 3.0;
    Vector out = project_onto_d(2, v);
    CHECK(out(0) == 0.0);
    CHECK(out(1) == 2.0);
    CHECK(out(2) == 3.0);
  }
  SUBCASE("identity on D") {
    Vector v(3);
    v << 1.0, 0.0, -5.0;
    CHECK((project_onto_d(2, v) - v).norm() == 0.0);
  }
  SUBCASE("pure inequality") {
    Vector v(1);
    v << -5.0;
    CHECK(project_onto_d(1, v)(0) == 0.0);
  }
  SUBCASE("idempotent and nonexpansive, sampled") {
    Sampler rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      Vector a = rng.uniform_vector(4, -3.0, 3.0);
      Vector b = rng.uniform_vector(4, -3.0, 3.0);
      Vector pa = project_onto_d(2, a), pb = project_onto_d(2, b);
      CHECK((project_onto_d(2, pa) - pa).norm() == 0.0);
      CHECK((pa - pb).norm() <= (a - b).norm() + 1e-15);
      for (int i = 0; i < 2; ++i) CHECK(pa(i) >= 0.0);
    }
  }
}

TEST_CASE("projection onto the set") {
  SUBCASE("box clamp") {
    auto box = FeasibleSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    Vector x(2);
    x << 2.0, 0.5;
    Vector px = project_onto_x(box, x);
    CHECK(px(0) == 1.0);
    CHECK(px(1) == 0.5);
    Vector y(1);
  }
  SUBCASE("whole space identity") {
    Vector x(3);
    x << 5.0, -7.0, 0.0;
    CHECK((project_onto_x(FeasibleSet::whole_space(), x) - x).norm() == 0.0);
  }
  SUBCASE("scalar clamp") {
    auto box = FeasibleSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    Vector x(1);
    x << -3.0;
    CHECK(project_onto_x(box, x)(0) == -1.0);
  }
  SUBCASE("idempotent and nonexpansive, sampled") {
    auto box = FeasibleSet::box(Vector::Constant(3, -2.0), Vector::Constant(3, 0.5));
    Sampler rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      Vector a = rng.uniform_vector(3, -4.0, 4.0);
      Vector b = rng.uniform_vector(3, -4.0, 4.0);
      Vector pa = project_onto_x(box, a), pb = project_onto_x(box, b);
      CHECK((project_onto_x(box, pa) - pa).norm() == 0.0);
      CHECK((pa - pb).norm() <= (a - b).norm() + 1e-15);
    }
  }
}

TEST_CASE("spectral constants") {
  SUBCASE("single equality row") {
    ObjectiveModel obj;
    obj.kind = ObjectiveKind::Quadratic;
    obj.hessian = Matrix::Identity(2, 2);
    obj.linear = Vector::Zero(2);
    EqualityConstraints eqs;
    eqs.a.resize(1, 2);
    eqs.a << 0.0, 2.0;
    eqs.b = Vector::Zero(1);
    ProblemInstance inst(obj, {}, eqs, FeasibleSet::whole_space());
    CHECK(inst.spectral().sigma_max_a == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("no equality block has sigma zero") {
    auto t1 = make_t1();
    CHECK(t1.spectral().sigma_max_a == 0.0);
  }
  SUBCASE("identity stacked matrix") {
    ObjectiveModel obj;
    obj.kind = ObjectiveKind::Quadratic;
    obj.hessian = Matrix::Identity(2, 2);
    obj.linear = Vector::Zero(2);
    Vector a1(2), a2(2);
    a1 << 1.0, 0.0;
    a2 << 0.0, 1.0;
    std::vector<InequalityConstraint> ineqs{
        InequalityConstraint::from_affine(a1, 0.0),
        InequalityConstraint::from_affine(a2, 0.0)};
    EqualityConstraints eqs;
    eqs.a.resize(0, 2);
    eqs.b.resize(0);
    ProblemInstance inst(obj, ineqs, eqs, FeasibleSet::whole_space());
    CHECK(inst.spectral().sigma_max_atilde == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inst.spectral().sigma_min_atilde == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("recomputation matches the cache") {
    auto inst = make_experiment_instance();
    auto fresh = spectral_constants(inst);
    CHECK(fresh.sigma_max_a ==
          doctest::Approx(inst.spectral().sigma_max_a).epsilon(1e-10));
    CHECK(fresh.sigma_max_atilde ==
          doctest::Approx(inst.spectral().sigma_max_atilde).epsilon(1e-10));
    CHECK(fresh.lambda_min_h ==
          doctest::Approx(inst.spectral().lambda_min_h).epsilon(1e-10));
  }
  SUBCASE("non-symmetric H rejected") {
    ObjectiveModel obj;
    obj.kind = ObjectiveKind::Quadratic;
    obj.hessian.resize(2, 2);
    obj.hessian << 1.0, 0.5, 0.0, 1.0;
    obj.linear = Vector::Zero(2);
    EqualityConstraints eqs;
    eqs.a = Matrix::Identity(1, 2);
    eqs.b = Vector::Zero(1);
    CHECK_THROWS_AS(
        ProblemInstance(obj, {}, eqs, FeasibleSet::whole_space()), InputError);
  }
}

TEST_CASE("instance validation") {
  SUBCASE("at least one dualized constraint") {
    ObjectiveModel obj;
    obj.kind = ObjectiveKind::Quadratic;
    obj.hessian = Matrix::Identity(1, 1);
    obj.linear = Vector::Zero(1);
    EqualityConstraints eqs;
    eqs.a.resize(0, 1);
    eqs.b.resize(0);
    CHECK_THROWS_AS(
        ProblemInstance(obj, {}, eqs, FeasibleSet::whole_space()), InputError);
  }
  SUBCASE("zero equality matrix rejected") {
    ObjectiveModel obj;
    obj.kind = ObjectiveKind::Quadratic;
    obj.hessian = Matrix::Identity(2, 2);
    obj.linear = Vector::Zero(2);
    EqualityConstraints eqs;
    eqs.a = Matrix::Zero(1, 2);
    eqs.b = Vector::Zero(1);
    CHECK_THROWS_AS(
        ProblemInstance(obj, {}, eqs, FeasibleSet::whole_space()), InputError);
  }
  SUBCASE("theta above lambda_min rejected, below accepted") {
    ObjectiveModel obj;
    obj.kind = ObjectiveKind::Quadratic;
    obj.hessian = 2.0 * Matrix::Identity(1, 1);
    obj.linear = Vector::Zero(1);
    obj.theta = 3.0;
    EqualityConstraints eqs;
    eqs.a = Matrix::Identity(1, 1);
    eqs.b = Vector::Zero(1);
    CHECK_THROWS_AS(
        ProblemInstance(obj, {}, eqs, FeasibleSet::whole_space()), InputError);
    obj.theta = 0.5;
    ProblemInstance ok(obj, {}, eqs, FeasibleSet::whole_space());
    CHECK(ok.theta() == 0.5);
  }
  SUBCASE("theta defaults to lambda_min") {
    auto inst = make_experiment_instance();
    CHECK(inst.theta() ==
          doctest::Approx(inst.spectral().lambda_min_h).epsilon(1e-12));
  }
  SUBCASE("slater check accepts generated instances") {
    CHECK(make_experiment_instance(1).slater_point_valid());
    CHECK(make_experiment_instance(2).slater_point_valid());
    CHECK(make_separable(3).slater_point_valid());
  }
}

TEST_CASE("sampled strong convexity of the objective") {
  auto inst = make_experiment_instance(5);
  const double theta = inst.theta();
  Sampler rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = rng.uniform_vector(inst.dim_n(), -1.0, 1.0);
    Vector y = rng.uniform_vector(inst.dim_n(), -1.0, 1.0);
    const double fx = inst.objective().value(x);
    const double fy = inst.objective().value(y);
    Vector g = inst.objective().subgradient(x);
    CHECK(fy - fx - g.dot(y - x) >=
          0.5 * theta * (y - x).squaredNorm() - 1e-9);
  }
}

TEST_CASE("dual point construction enforces membership in D") {
  auto t1 = make_t1();
  Vector v(1);
  v << -2.5;
  DualPoint u(v, t1.num_inequalities());
  CHECK(u.value()(0) == 0.0);
}

TEST_CASE("infeasibility detection threshold") {
  auto eq = make_equality();
  // Residuals at the 1e-13 scale count as feasible at the 1e-12 gate.
  Vector near(1);
  near << 1.0 + 1e-13;
  CHECK(infeasibility(eq, near) <= 1e-12);
  Vector off(1);
  off << 1.0 + 1e-6;
  CHECK(infeasibility(eq, off) > 1e-12);
}
