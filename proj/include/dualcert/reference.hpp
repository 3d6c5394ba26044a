#pragma once

#include <optional>
#include <string>

#include "dualcert/methods.hpp"
#include "dualcert/problem.hpp"

namespace dualcert {

/// High-accuracy primal/dual solution used as the testing oracle for every
/// certificate. f_star and d_star agree within the achieved gap.
struct ReferenceSolution {
  Vector x_star;
  Vector u_star;
  double f_star = 0.0;
  double d_star = 0.0;
  double dual_gap = 0.0;  // |f_star - d_star| at termination
  double gradient_mapping_norm = 0.0;
  std::string method;
  long iterations = 0;
};

struct ReferenceOptions {
  long max_iterations = 2000000;
  // Stop when ||u - P_D[u + alpha grad d(u)]|| / alpha <= tol * (1 + ||u||).
  double gradient_mapping_tol = 1e-11;
  double inner_tolerance = 1e-12;
};

/// Solves the dual to high accuracy with a restarted fast gradient loop
/// (projected gradient with a surrogate step when the constraints are not
/// all linear) and returns (x*, u*, f*, d*). Throws ConfigError when the
/// budget is exhausted before reaching the tolerance.
ReferenceSolution compute_reference(const ProblemInstance& inst,
                                    const ReferenceOptions& opts = {});

}  // namespace dualcert
