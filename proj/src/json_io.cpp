#include "dualcert/json_io.hpp"

#include <fstream>

#include <json.hpp>

namespace dualcert {

namespace {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                        const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw InputError(std::string(what) + ": wrong row count");
  }
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(std::string(what) + ": wrong column count");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      a(i, k) = row[static_cast<size_t>(k)].get<double>();
    }
  }
  return a;
}

Vector vector_from_json(const Json& j, Eigen::Index n, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw InputError(std::string(what) + ": wrong length");
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

}  // namespace

std::string instance_to_json(const ProblemInstance& inst) {
  if (inst.objective().kind == ObjectiveKind::Custom) {
    throw UnsupportedProblemError("custom objectives are not serializable");
  }
  if (!inst.all_linear()) {
    throw UnsupportedProblemError(
        "nonlinear inequality constraints are not serializable");
  }
  const auto& obj = inst.objective();
  const Eigen::Index n = inst.dim_n(), m = inst.num_inequalities(),
                     p = inst.num_equalities(), q = inst.dim_q();

  Json j;
  j["n"] = n;
  j["m"] = m;
  j["p"] = p;
  j["q"] = q;
  j["H"] = matrix_to_json(obj.hessian);
  j["t"] = vector_to_json(obj.linear);
  j["gamma"] = obj.gamma;
  j["P"] = q > 0 ? matrix_to_json(obj.l1_matrix) : Json::array();
  j["s"] = q > 0 ? vector_to_json(obj.l1_shift) : Json::array();

  Matrix aineq(m, n);
  Vector bineq(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    aineq.row(i) = inst.inequalities()[static_cast<size_t>(i)].affine->a;
    bineq(i) = inst.inequalities()[static_cast<size_t>(i)].affine->b;
  }
  j["Aineq"] = matrix_to_json(aineq);
  j["bineq"] = vector_to_json(bineq);
  j["Aeq"] = matrix_to_json(inst.equalities().a);
  j["beq"] = vector_to_json(inst.equalities().b);

  if (inst.set().is_box()) {
    j["box_lower"] = vector_to_json(inst.set().lower);
    j["box_upper"] = vector_to_json(inst.set().upper);
  } else {
    j["box_lower"] = nullptr;
    j["box_upper"] = nullptr;
  }
  j["theta"] = inst.theta();
  if (inst.slater_point()) {
    j["slater_point"] = vector_to_json(*inst.slater_point());
  } else {
    j["slater_point"] = nullptr;
  }
  return j.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(std::string("instance parse error: ") + e.what());
  }
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const Eigen::Index m = j.at("m").get<Eigen::Index>();
  const Eigen::Index p = j.at("p").get<Eigen::Index>();
  const Eigen::Index q = j.at("q").get<Eigen::Index>();

  ObjectiveModel obj;
  obj.hessian = matrix_from_json(j.at("H"), n, n, "H");
  obj.linear = vector_from_json(j.at("t"), n, "t");
  obj.gamma = j.at("gamma").get<double>();
  obj.kind = obj.gamma > 0 ? ObjectiveKind::QuadraticPlusL1
                           : ObjectiveKind::Quadratic;
  if (q > 0) {
    obj.l1_matrix = matrix_from_json(j.at("P"), q, n, "P");
    obj.l1_shift = vector_from_json(j.at("s"), q, "s");
  }
  obj.theta = j.at("theta").get<double>();

  Matrix aineq = matrix_from_json(j.at("Aineq"), m, n, "Aineq");
  Vector bineq = vector_from_json(j.at("bineq"), m, "bineq");
  std::vector<InequalityConstraint> ineqs;
  for (Eigen::Index i = 0; i < m; ++i) {
    ineqs.push_back(InequalityConstraint::from_affine(aineq.row(i), bineq(i)));
  }

  EqualityConstraints eqs;
  eqs.a = matrix_from_json(j.at("Aeq"), p, n, "Aeq");
  eqs.b = vector_from_json(j.at("beq"), p, "beq");

  FeasibleSet set = j.at("box_lower").is_null()
                        ? FeasibleSet::whole_space()
                        : FeasibleSet::box(
                              vector_from_json(j.at("box_lower"), n, "box_lower"),
                              vector_from_json(j.at("box_upper"), n, "box_upper"));

  std::optional<Vector> slater;
  if (!j.at("slater_point").is_null()) {
    slater = vector_from_json(j.at("slater_point"), n, "slater_point");
  }
  return ProblemInstance(std::move(obj), std::move(ineqs), std::move(eqs),
                         std::move(set), std::move(slater));
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  write_file(path, instance_to_json(inst));
}

ProblemInstance load_instance(const std::string& path) {
  return instance_from_json(read_file(path));
}

std::string reference_to_json(const ReferenceSolution& ref) {
  Json j;
  j["x_star"] = vector_to_json(ref.x_star);
  j["u_star"] = vector_to_json(ref.u_star);
  j["f_star"] = ref.f_star;
  j["d_star"] = ref.d_star;
  j["dual_gap"] = ref.dual_gap;
  j["gradient_mapping_norm"] = ref.gradient_mapping_norm;
  j["method"] = ref.method;
  j["iterations"] = ref.iterations;
  return j.dump(2) + "\n";
}

ReferenceSolution reference_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(std::string("reference parse error: ") + e.what());
  }
  ReferenceSolution ref;
  const auto& xs = j.at("x_star");
  ref.x_star = vector_from_json(xs, static_cast<Eigen::Index>(xs.size()),
                                "x_star");
  const auto& us = j.at("u_star");
  ref.u_star = vector_from_json(us, static_cast<Eigen::Index>(us.size()),
                                "u_star");
  ref.f_star = j.at("f_star").get<double>();
  ref.d_star = j.at("d_star").get<double>();
  ref.dual_gap = j.at("dual_gap").get<double>();
  ref.gradient_mapping_norm = j.at("gradient_mapping_norm").get<double>();
  ref.method = j.at("method").get<std::string>();
  ref.iterations = j.at("iterations").get<long>();
  return ref;
}

void save_reference(const ReferenceSolution& ref, const std::string& path) {
  write_file(path, reference_to_json(ref));
}

ReferenceSolution load_reference(const std::string& path) {
  return reference_from_json(read_file(path));
}

}  // namespace dualcert
