#pragma once

#include <string>

#include "dualcert/problem.hpp"
#include "dualcert/reference.hpp"

namespace dualcert {

/// Instance JSON schema: {"n","m","p","q","H","t","gamma","P","s","Aineq",
/// "bineq","Aeq","beq","box_lower","box_upper","theta","slater_point"};
/// matrices are nested row arrays (row-major), numbers IEEE doubles,
/// box_lower/box_upper null for X = R^n, slater_point null when absent.
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);

void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

std::string reference_to_json(const ReferenceSolution& ref);
ReferenceSolution reference_from_json(const std::string& text);

void save_reference(const ReferenceSolution& ref, const std::string& path);
ReferenceSolution load_reference(const std::string& path);

}  // namespace dualcert
