#pragma once

#include <string>

#include "bebop/schema/ast.hpp"

namespace bebop::schema {

/// Canonical source text for a parsed (unresolved) AST. Reparsing the output
/// gives an equal AST. Comments other than doc comments are not kept.
std::string print(const SchemaAst& ast);

std::string print_type(const TypeExpr& type);

}  // namespace bebop::schema
