#pragma once

#include <string>

#include "refinement/ast.hpp"

namespace northpole::refine {

// Canonical text: binary operators fully parenthesized, guards always
// spelled out, else branches explicit. Parsing the output yields a
// structurally equal Spec.
std::string print_expr(const Expr& e, const SymbolTable& symbols);
std::string print_block(const Block& b, const SymbolTable& symbols);
std::string print_command(const Command& c, const SymbolTable& symbols);
std::string print_type(const FieldType& t, const SymbolTable& symbols);
std::string format_value(const FieldType& t, Value v, const SymbolTable& symbols);
std::string print_system(const Gts& g, const SymbolTable& symbols);
std::string print_coupling(const Coupling& r, const SymbolTable& symbols);
std::string print_spec(const Spec& spec);

}  // namespace northpole::refine
