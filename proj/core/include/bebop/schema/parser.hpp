#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bebop/schema/ast.hpp"
#include "bebop/schema/lexer.hpp"

namespace bebop::schema {

/// Builds an AST from a token stream. Throws bebop::Error on the first
/// problem; non-fatal findings (such as an unknown edition) go to `warnings`.
SchemaAst parse(const std::vector<Token>& tokens, std::string_view file = {},
                std::vector<Diagnostic>* warnings = nullptr);

SchemaAst parse_source(std::string_view source, std::string_view file = {},
                       std::vector<Diagnostic>* warnings = nullptr);

/// Primitive keyword or alias (`uint8`, `half`, `bf16`, `guid`).
std::optional<PrimitiveKind> primitive_from_name(std::string_view name) noexcept;

inline constexpr std::string_view kCurrentEdition = "2026";

}  // namespace bebop::schema
