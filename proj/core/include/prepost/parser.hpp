#pragma once

#include <string>
#include <string_view>

#include "prepost/program.hpp"

namespace prepost {

/// Parses the line-oriented channel DSL. Communication sites (sends,
/// receives, closes and select defaults) are numbered 1, 2, ... in source
/// order. Throws ParseError.
Program parse_program(std::string_view source);

/// Canonical DSL text for an un-instrumented program. parse_program of the
/// result yields the same AST.
std::string print_program(const Program& p);

}  // namespace prepost
