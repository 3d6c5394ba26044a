#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualcert/experiment.hpp"
#include "dualcert/generator.hpp"
#include "dualcert/json_io.hpp"
#include "dualcert/reference.hpp"

namespace {

using namespace dualcert;

double certificate_tolerance_default() {
  if (const char* env = std::getenv("DUALCERT_TOL")) {
    try {
      const double v = std::stod(env);
      if (v > 0) return v;
    } catch (...) {
    }
    std::cerr << "warning: ignoring invalid DUALCERT_TOL\n";
  }
  return 1e-7;
}

StepSizeRule parse_alpha_rule(const ProblemInstance& inst,
                              const ReferenceSolution& ref,
                              const std::string& spec) {
  if (spec == "linear") return step_size_linear(inst);
  if (spec == "compact") return step_size_compact_x(inst);
  if (spec == "lipschitz") {
    // u0 = 0, so 2 ||u0 - u*|| bounds the diameter of the initial dual ball.
    return step_size_lipschitz_g(inst, 2.0 * ref.u_star.norm());
  }
  if (spec.rfind("explicit:", 0) == 0) {
    return step_size_explicit(std::stod(spec.substr(9)));
  }
  throw ConfigError("unknown alpha rule: " + spec +
                    " (want linear|compact|lipschitz|explicit:<val>)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual first-order methods with primal error certificates"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random problem instance");
  GeneratorConfig gcfg;
  std::string gen_out = "inst.json";
  gen->add_option("--seed", gcfg.seed, "RNG seed");
  gen->add_option("--n", gcfg.n, "number of variables");
  gen->add_option("--m", gcfg.m, "number of inequality constraints");
  gen->add_option("--p", gcfg.p, "number of equality constraints");
  gen->add_option("--q", gcfg.q, "rows of the l1 penalty matrix");
  gen->add_option("--gamma", gcfg.gamma, "l1 penalty weight");
  gen->add_option("--box-radius", gcfg.box_radius, "box half-width");
  gen->add_option("--eig-min", gcfg.h_eigenvalue_min, "smallest eigenvalue of H");
  gen->add_option("--eig-max", gcfg.h_eigenvalue_max, "largest eigenvalue of H");
  gen->add_flag("--diagonal", gcfg.diagonal_hessian,
                "diagonal H (and P = I when q == n)");
  gen->add_flag("--whole-space", gcfg.whole_space, "X = R^n instead of a box");
  bool no_slater = false;
  gen->add_flag("--no-slater", no_slater, "skip interior-point construction");
  gen->add_option("-o,--output", gen_out, "output instance file");

  // reference
  auto* refcmd =
      app.add_subcommand("reference", "solve an instance to high accuracy");
  std::string ref_inst, ref_out = "ref.json";
  ReferenceOptions ropts;
  refcmd->add_option("instance", ref_inst, "instance JSON")->required();
  refcmd->add_option("-o,--output", ref_out, "output reference file");
  refcmd->add_option("--tol", ropts.gradient_mapping_tol,
                     "gradient-mapping tolerance");
  refcmd->add_option("--max-iters", ropts.max_iterations, "iteration budget");
  refcmd->add_option("--inner-tol", ropts.inner_tolerance,
                     "inner oracle tolerance");

  // run
  auto* run = app.add_subcommand("run", "run methods and emit certificates");
  std::string run_inst, run_ref, run_out = "out";
  std::string methods_csv = "pg,fista";
  std::string alpha_rule = "linear";
  int run_k = 10000;
  run->add_option("instance", run_inst, "instance JSON")->required();
  run->add_option("--ref", run_ref, "reference JSON")->required();
  run->add_option("--methods", methods_csv, "comma list: pg,fista,tseng");
  run->add_option("--k", run_k, "iteration count");
  run->add_option("--alpha-rule", alpha_rule,
                  "linear|compact|lipschitz|explicit:<val>");
  run->add_option("-o,--output", run_out, "output directory");

  // verify
  auto* verify = app.add_subcommand("verify", "check emitted certificates");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "report directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gcfg.ensure_slater = !no_slater;
      save_instance(generate_instance(gcfg), gen_out);
      std::cout << "wrote " << gen_out << "\n";
    } else if (refcmd->parsed()) {
      ReferenceSolution ref = compute_reference(load_instance(ref_inst), ropts);
      save_reference(ref, ref_out);
      std::cout << "wrote " << ref_out << " (d* = " << ref.d_star
                << ", gap = " << ref.dual_gap << ", " << ref.iterations
                << " iterations)\n";
    } else if (run->parsed()) {
      ProblemInstance inst = load_instance(run_inst);
      ReferenceSolution ref = load_reference(run_ref);
      ExperimentConfig cfg;
      cfg.iterations = run_k;
      cfg.certificate_tolerance = certificate_tolerance_default();
      std::stringstream ss(methods_csv);
      std::string token;
      while (std::getline(ss, token, ',')) {
        if (!token.empty()) cfg.methods.push_back(method_from_name(token));
      }
      if (std::find(cfg.methods.begin(), cfg.methods.end(),
                    MethodId::ProjectedGradient) != cfg.methods.end()) {
        cfg.pg_rule = parse_alpha_rule(inst, ref, alpha_rule);
      }
      ExperimentResult result = run_experiment(inst, ref, cfg, run_out);
      for (const auto& f : result.files_written) std::cout << "wrote " << f << "\n";
      std::cout << "total certificate violations: " << result.total_violations
                << "\n";
    } else if (verify->parsed()) {
      VerifyResult result = verify_report(verify_dir);
      std::cout << result.summary;
      return result.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
