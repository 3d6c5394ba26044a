#pragma once

#include <cstdint>
#include <optional>

#include "dualcert/problem.hpp"

namespace dualcert {

/// Seeded random instance generator. Produces box-constrained quadratic-plus-l1
/// problems with affine constraints; the equality block has full row rank and
/// a strictly feasible interior point is constructed first so the Slater
/// condition holds whenever ensure_slater is set.
struct GeneratorConfig {
  std::uint64_t seed = 0;
  int n = 10;
  int m = 3;
  int p = 2;
  int q = 5;
  double gamma = 1.0;
  double box_radius = 1.0;          // r_i, same for every coordinate
  double h_eigenvalue_min = 1.0;    // spectrum of H
  double h_eigenvalue_max = 10.0;
  bool ensure_slater = true;

  // Variants used for exact-oracle testing paths.
  bool diagonal_hessian = false;  // diagonal H, and P = I when q == n
  bool whole_space = false;       // X = R^n instead of a box
};

ProblemInstance generate_instance(const GeneratorConfig& cfg);

}  // namespace dualcert
