#ifndef ADAPTKIT_PARSER_HPP
#define ADAPTKIT_PARSER_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptkit/diagnostics.hpp"
#include "adaptkit/model.hpp"

namespace adaptkit {

struct ParseResult {
    std::optional<ArchitectureModel> model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value() && !has_errors(diagnostics); }
};

/// Parses a model source text. On success the result holds a model whose
/// component tree is fully instantiated from the declared component types;
/// on failure it holds at least one error diagnostic with a source span.
ParseResult parse_model(std::string_view text, const std::string& file_name);

struct ExprParseResult {
    std::optional<StateExpr> expr;
    std::optional<Diagnostic> diagnostic;
};

/// Parses a state-mapping expression: atoms `Path[State]`, precedence
/// not > and > or, parentheses permitted.
ExprParseResult parse_state_mapping_expr(std::string_view text);

/// Renders the model back to source form. Parsing the result yields a
/// structurally equal model.
std::string print_model(const ArchitectureModel& model);

std::string print_state_expr(const StateExpr& expr);

} // namespace adaptkit

#endif
