#ifndef ADAPTKIT_ERRORS_HPP
#define ADAPTKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adaptkit {

/// Caller broke an operation's precondition (e.g. fired a disabled transition).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Model-level failure during transformation (e.g. nothing to transform).
struct TransformError : std::runtime_error {
    explicit TransformError(const std::string& what) : std::runtime_error(what) {}
};

/// A place exceeded the token bound during reachability exploration.
struct BoundednessError : std::runtime_error {
    BoundednessError(std::string place, int sequence_length, const std::string& what)
        : std::runtime_error(what), place_name(std::move(place)), depth(sequence_length) {}
    std::string place_name;
    int depth = 0;
};

/// Solver failure: non-convergence, vanishing loops, absorbing-state misuse.
struct AnalysisError : std::runtime_error {
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

/// Emitter misuse (partial trace map, structurally broken net).
struct EmitError : std::runtime_error {
    explicit EmitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace adaptkit

#endif
