#pragma once

#include <string>
#include <string_view>

#include "refinement/ast.hpp"

namespace northpole::refine {

// Parses class and couple definitions. Throws SpecError carrying the line
// and column of the offending token. Empty text gives an empty Spec.
Spec parse_spec(std::string_view text);
Spec load_spec_file(const std::string& path);

// Parses one command ("guard -> body" or a bare body) over `system`'s fields.
Command parse_command(const Spec& spec, const Gts& system, std::string_view text);

// Type-checks a coupling against the systems it relates: parameter counts
// must match field counts and the predicate must be boolean. Throws
// StructuralError.
void bind_coupling(const Spec& spec, const Coupling& relation, const Gts& abs, const Gts& conc);

}  // namespace northpole::refine
