#pragma once

// Writes a LinearProgram in CPLEX LP text format so models can be
// cross-checked against external solvers. Format notes live in the README.

#include <filesystem>
#include <string>

#include "gridsched/lp.hpp"

namespace gridsched {

std::string to_lp_format(const LinearProgram& lp);
void export_lp(const LinearProgram& lp, const std::filesystem::path& path);

}  // namespace gridsched
