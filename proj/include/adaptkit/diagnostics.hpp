#ifndef ADAPTKIT_DIAGNOSTICS_HPP
#define ADAPTKIT_DIAGNOSTICS_HPP

#include <string>
#include <vector>

namespace adaptkit {

/// Location of a construct in a model source file. line/column are 1-based.
struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
    int length = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
};

inline Diagnostic make_error(std::string message, SourceSpan span) {
    return Diagnostic{Severity::Error, std::move(message), std::move(span)};
}

inline Diagnostic make_warning(std::string message, SourceSpan span) {
    return Diagnostic{Severity::Warning, std::move(message), std::move(span)};
}

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// "file:line:column: severity: message" - the format the CLI prints.
std::string format_diagnostic(const Diagnostic& d);

} // namespace adaptkit

#endif
