#include <algorithm>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualcert/certificates.hpp"
#include "dualcert/constants.hpp"
#include "dualcert/experiment.hpp"
#include "dualcert/generator.hpp"
#include "dualcert/json_io.hpp"
#include "dualcert/methods.hpp"
#include "dualcert/oracle.hpp"
#include "dualcert/reference.hpp"

namespace py = pybind11;
using namespace dualcert;

namespace {

DualPoint as_dual(const ProblemInstance& inst, const Vector& u) {
  return DualPoint(u, inst.num_inequalities());
}

Vector column(const RunTrace& trace, double TracePoint::*field) {
  Vector out(static_cast<Eigen::Index>(trace.points.size()));
  for (size_t i = 0; i < trace.points.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = trace.points[i].*field;
  }
  return out;
}

Matrix stacked(const RunTrace& trace, Vector TracePoint::*field) {
  if (trace.points.empty()) return Matrix(0, 0);
  const Eigen::Index cols = (trace.points.front().*field).size();
  Matrix out(static_cast<Eigen::Index>(trace.points.size()), cols);
  for (size_t i = 0; i < trace.points.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = (trace.points[i].*field).transpose();
  }
  return out;
}

CertificateContext build_context(const ProblemInstance& inst,
                                 const ReferenceSolution& ref, double tol) {
  return make_certificate_context(inst, ref, tol);
}

}  // namespace

PYBIND11_MODULE(_dualcert, m) {
  m.doc() = "Dual first-order methods with primal error certificates";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnsupportedProblemError>(m, "UnsupportedProblemError",
                                                  PyExc_ValueError);
  py::register_exception<ReferenceInconsistency>(m, "ReferenceInconsistency",
                                                 PyExc_RuntimeError);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_property_readonly("n", &ProblemInstance::dim_n)
      .def_property_readonly("m", &ProblemInstance::num_inequalities)
      .def_property_readonly("p", &ProblemInstance::num_equalities)
      .def_property_readonly("q", &ProblemInstance::dim_q)
      .def_property_readonly("theta", &ProblemInstance::theta)
      .def_property_readonly("all_linear", &ProblemInstance::all_linear)
      .def_property_readonly("sigma_max_a",
                             [](const ProblemInstance& inst) {
                               return inst.spectral().sigma_max_a;
                             })
      .def_property_readonly("sigma_max_atilde",
                             [](const ProblemInstance& inst) {
                               return inst.spectral().sigma_max_atilde;
                             })
      .def("objective_value", &eval_objective, py::arg("x"))
      .def("infeasibility", &infeasibility, py::arg("x"))
      .def("constraint_values", &constraint_values, py::arg("x"))
      .def("slater_point_valid", &ProblemInstance::slater_point_valid,
           py::arg("equality_tol") = 1e-9)
      .def("to_json", &instance_to_json)
      .def_static("from_json", &instance_from_json, py::arg("text"));

  m.def(
      "generate_instance",
      [](std::uint64_t seed, int n, int mm, int p, int q, double gamma,
         double box_radius, double eig_min, double eig_max, bool diagonal,
         bool whole_space, bool ensure_slater) {
        GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.n = n;
        cfg.m = mm;
        cfg.p = p;
        cfg.q = q;
        cfg.gamma = gamma;
        cfg.box_radius = box_radius;
        cfg.h_eigenvalue_min = eig_min;
        cfg.h_eigenvalue_max = eig_max;
        cfg.diagonal_hessian = diagonal;
        cfg.whole_space = whole_space;
        cfg.ensure_slater = ensure_slater;
        return generate_instance(cfg);
      },
      py::arg("seed") = 0, py::arg("n") = 10, py::arg("m") = 3,
      py::arg("p") = 2, py::arg("q") = 5, py::arg("gamma") = 1.0,
      py::arg("box_radius") = 1.0, py::arg("eig_min") = 1.0,
      py::arg("eig_max") = 10.0, py::arg("diagonal") = false,
      py::arg("whole_space") = false, py::arg("ensure_slater") = true);

  m.def("load_instance", &load_instance, py::arg("path"));
  m.def("save_instance", &save_instance, py::arg("instance"), py::arg("path"));

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("xbar", &OracleResult::xbar)
      .def_readonly("dual_value", &OracleResult::dual_value)
      .def_readonly("dual_gradient", &OracleResult::dual_gradient)
      .def_readonly("inner_iterations", &OracleResult::inner_iterations)
      .def_readonly("inner_residual", &OracleResult::inner_residual)
      .def_readonly("exact_path", &OracleResult::exact_path);

  m.def(
      "solve_lagrangian",
      [](const ProblemInstance& inst, const Vector& u, double tol) {
        return solve_lagrangian(inst, as_dual(inst, u), OracleConfig(tol));
      },
      py::arg("instance"), py::arg("u"), py::arg("tolerance") = 1e-10);

  m.def(
      "dual_gap_identity_check",
      [](const OracleResult& res, const ProblemInstance& inst, const Vector& u) {
        return dual_gap_identity_check(res, inst, as_dual(inst, u));
      },
      py::arg("result"), py::arg("instance"), py::arg("u"));

  m.def(
      "finite_difference_dual_gradient",
      [](const ProblemInstance& inst, const Vector& u, double step) {
        return finite_difference_dual_gradient(inst, as_dual(inst, u), step);
      },
      py::arg("instance"), py::arg("u"), py::arg("step") = 1e-5);

  m.def(
      "project_onto_d",
      [](const ProblemInstance& inst, const Vector& v) {
        return project_onto_d(inst.num_inequalities(), v);
      },
      py::arg("instance"), py::arg("v"));

  py::class_<RunTrace>(m, "RunTrace")
      .def_readonly("method", &RunTrace::method)
      .def_readonly("alpha", &RunTrace::alpha)
      .def_readonly("l_tilde", &RunTrace::l_tilde)
      .def_property_readonly("iterations", &RunTrace::last_k)
      .def_property_readonly("dual_values",
                             [](const RunTrace& t) {
                               return column(t, &TracePoint::dual_value);
                             })
      .def_property_readonly("objective_values",
                             [](const RunTrace& t) {
                               return column(t, &TracePoint::f_xbar);
                             })
      .def_property_readonly("infeasibilities",
                             [](const RunTrace& t) {
                               return column(t, &TracePoint::delta_xbar);
                             })
      .def_property_readonly("average_objective_values",
                             [](const RunTrace& t) {
                               return column(t, &TracePoint::f_xtilde);
                             })
      .def_property_readonly("weighted_objective_values",
                             [](const RunTrace& t) {
                               return column(t, &TracePoint::f_xhat);
                             })
      .def_property_readonly("betas",
                             [](const RunTrace& t) {
                               return column(t, &TracePoint::beta);
                             })
      .def_property_readonly("dual_iterates",
                             [](const RunTrace& t) {
                               return stacked(t, &TracePoint::u);
                             })
      .def_property_readonly("primal_iterates", [](const RunTrace& t) {
        return stacked(t, &TracePoint::xbar);
      });

  m.def(
      "projected_dual_gradient",
      [](const ProblemInstance& inst, int iterations,
         std::optional<double> alpha, std::optional<Vector> u0,
         double oracle_tol) {
        MethodOptions opts;
        opts.oracle = OracleConfig(oracle_tol);
        const StepSizeRule rule =
            alpha ? step_size_explicit(*alpha) : step_size_linear(inst);
        const DualPoint start =
            u0 ? as_dual(inst, *u0) : DualPoint::zero(inst);
        return projected_dual_gradient(inst, start, rule, iterations, opts);
      },
      py::arg("instance"), py::arg("iterations"),
      py::arg("alpha") = py::none(), py::arg("u0") = py::none(),
      py::arg("oracle_tolerance") = 1e-10);

  m.def(
      "fista_dual",
      [](const ProblemInstance& inst, int iterations, std::optional<Vector> u0,
         double oracle_tol) {
        MethodOptions opts;
        opts.oracle = OracleConfig(oracle_tol);
        const DualPoint start =
            u0 ? as_dual(inst, *u0) : DualPoint::zero(inst);
        return fista_dual(inst, start, iterations, opts);
      },
      py::arg("instance"), py::arg("iterations"), py::arg("u0") = py::none(),
      py::arg("oracle_tolerance") = 1e-10);

  m.def(
      "tseng_fast_gradient",
      [](const ProblemInstance& inst, int iterations,
         std::optional<double> l_tilde, std::optional<Vector> u0,
         std::optional<Vector> w0, double oracle_tol) {
        MethodOptions opts;
        opts.oracle = OracleConfig(oracle_tol);
        const double l = l_tilde.value_or(dual_gradient_lipschitz_bound(inst));
        const DualPoint start =
            u0 ? as_dual(inst, *u0) : DualPoint::zero(inst);
        const DualPoint wstart = w0 ? as_dual(inst, *w0) : start;
        return tseng_fast_gradient(inst, start, wstart, l, iterations, opts);
      },
      py::arg("instance"), py::arg("iterations"),
      py::arg("l_tilde") = py::none(), py::arg("u0") = py::none(),
      py::arg("w0") = py::none(), py::arg("oracle_tolerance") = 1e-10);

  m.def("dual_gradient_lipschitz_bound", &dual_gradient_lipschitz_bound,
        py::arg("instance"));
  m.def("gamma_hat_bound", &gamma_hat_bound, py::arg("instance"));

  py::class_<ReferenceSolution>(m, "ReferenceSolution")
      .def_readonly("x_star", &ReferenceSolution::x_star)
      .def_readonly("u_star", &ReferenceSolution::u_star)
      .def_readonly("f_star", &ReferenceSolution::f_star)
      .def_readonly("d_star", &ReferenceSolution::d_star)
      .def_readonly("dual_gap", &ReferenceSolution::dual_gap)
      .def_readonly("gradient_mapping_norm",
                    &ReferenceSolution::gradient_mapping_norm)
      .def_readonly("method", &ReferenceSolution::method)
      .def_readonly("iterations", &ReferenceSolution::iterations);

  m.def(
      "compute_reference",
      [](const ProblemInstance& inst, double tol, long max_iterations,
         double inner_tol) {
        ReferenceOptions opts;
        opts.gradient_mapping_tol = tol;
        opts.max_iterations = max_iterations;
        opts.inner_tolerance = inner_tol;
        return compute_reference(inst, opts);
      },
      py::arg("instance"), py::arg("tolerance") = 1e-11,
      py::arg("max_iterations") = 2000000,
      py::arg("inner_tolerance") = 1e-12);

  m.def("load_reference", &load_reference, py::arg("path"));
  m.def("save_reference", &save_reference, py::arg("reference"),
        py::arg("path"));

  py::class_<BoundSeries>(m, "BoundSeries")
      .def_readonly("family", &BoundSeries::family)
      .def_property_readonly("provenance",
                             [](const BoundSeries& s) {
                               return std::string(provenance_name(s.provenance));
                             })
      .def_readonly("k", &BoundSeries::k)
      .def_readonly("measured", &BoundSeries::measured)
      .def_readonly("bound", &BoundSeries::bound)
      .def_readonly("margin", &BoundSeries::margin)
      .def_readonly("violated", &BoundSeries::violated)
      .def("violations", &BoundSeries::violations)
      .def("worst_margin", &BoundSeries::worst_margin);

  py::class_<CertificateReport>(m, "CertificateReport")
      .def_readonly("method", &CertificateReport::method)
      .def_readonly("series", &CertificateReport::series)
      .def("total_violations", &CertificateReport::total_violations)
      .def("to_json", &report_to_json);

  m.def(
      "pointwise_bounds_report",
      [](const ProblemInstance& inst, const ReferenceSolution& ref,
         const RunTrace& trace, double tol) {
        auto ctx = build_context(inst, ref, tol);
        return pointwise_bounds_report(ctx, inst, trace);
      },
      py::arg("instance"), py::arg("reference"), py::arg("trace"),
      py::arg("tolerance") = 1e-7);

  m.def(
      "pg_rate_envelopes",
      [](const ProblemInstance& inst, const ReferenceSolution& ref,
         const RunTrace& trace, double tol) {
        auto ctx = build_context(inst, ref, tol);
        pg_envelope_constants(inst, ctx, trace);
        return pg_rate_envelopes(ctx, inst, trace);
      },
      py::arg("instance"), py::arg("reference"), py::arg("trace"),
      py::arg("tolerance") = 1e-7);

  m.def(
      "fg_rate_envelopes",
      [](const ProblemInstance& inst, const ReferenceSolution& ref,
         const RunTrace& trace, const std::string& variant, double tol) {
        auto ctx = build_context(inst, ref, tol);
        const FastGradientVariant v = variant == "tseng"
                                          ? FastGradientVariant::Tseng
                                          : FastGradientVariant::Fista;
        return fg_rate_envelopes(ctx, inst, trace, v);
      },
      py::arg("instance"), py::arg("reference"), py::arg("trace"),
      py::arg("variant"), py::arg("tolerance") = 1e-7);

  m.def(
      "run_experiment",
      [](const ProblemInstance& inst, const ReferenceSolution& ref,
         const std::vector<std::string>& methods, int iterations,
         const std::string& output_dir, double tol) {
        ExperimentConfig cfg;
        for (const auto& name : methods) {
          cfg.methods.push_back(method_from_name(name));
        }
        cfg.iterations = iterations;
        cfg.certificate_tolerance = tol;
        if (std::find(cfg.methods.begin(), cfg.methods.end(),
                      MethodId::ProjectedGradient) != cfg.methods.end()) {
          cfg.pg_rule = step_size_linear(inst);
        }
        auto result = run_experiment(inst, ref, cfg, output_dir);
        return py::make_tuple(result.files_written, result.total_violations);
      },
      py::arg("instance"), py::arg("reference"), py::arg("methods"),
      py::arg("iterations"), py::arg("output_dir"),
      py::arg("tolerance") = 1e-7);

  m.def(
      "verify_report",
      [](const std::string& dir) {
        auto result = verify_report(dir);
        return py::make_tuple(result.exit_code, result.summary);
      },
      py::arg("report_dir"));
}
