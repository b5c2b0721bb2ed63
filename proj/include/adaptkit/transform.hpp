#ifndef ADAPTKIT_TRANSFORM_HPP
#define ADAPTKIT_TRANSFORM_HPP

#include <string>
#include <vector>

#include "adaptkit/dependency.hpp"
#include "adaptkit/gspn.hpp"
#include "adaptkit/model.hpp"

namespace adaptkit {

/// Architectural origin of one place: a component's error state, or the
/// pending buffer of a dependency link.
struct PlaceOrigin {
    enum class Kind { State, Pending };
    Kind kind = Kind::State;
    std::string component; // absolute path; State only
    std::string state;     // State only
    DependencyLink link;   // Pending only
};

/// Architectural origin of one transition: an automaton transition, the
/// consumption of a pending propagation, or its absorption in a state that
/// does not react to it.
struct TransitionOrigin {
    enum class Kind { Automaton, Consume, Absorb };
    Kind kind = Kind::Automaton;
    std::string component; // owner for Automaton, receiver otherwise
    std::string trigger;   // trigger display for Automaton, in-prop otherwise
    std::string state;     // source state; for Absorb the absorbing state
    DependencyLink link;   // Consume and Absorb only
};

struct TraceMap {
    std::vector<PlaceOrigin> place_origin;           // indexed by place id
    std::vector<TransitionOrigin> transition_origin; // indexed by transition id
};

bool operator==(const PlaceOrigin& a, const PlaceOrigin& b);
bool operator==(const TransitionOrigin& a, const TransitionOrigin& b);
bool operator==(const TraceMap& a, const TraceMap& b);

struct TransformResult {
    Gspn net;
    TraceMap trace;
    std::vector<Diagnostic> warnings;
};

/// Appends the component subnet of one resolved error-model instance:
/// one place per state named `<owner>/<state>` (initial state marked with
/// one token), one transition per event- or out-propagation-triggered
/// automaton transition. Poisson occurrences become timed transitions,
/// fixed(p) occurrences immediate transitions of weight p; fixed(0)
/// transitions can never fire and are dropped. In-triggered transitions are
/// realized by dependency subnets, not here.
void component_subnet(const ErrorModelInstance& emi, const ArchitectureModel& model, Gspn& net,
                      TraceMap& trace);

/// Appends the subnet of one non-masked dependency link: a pending place
/// `pend(<sender>/<prop>-><receiver>)` fed by every sender transition that
/// raises the propagation, one immediate consume transition per receiver
/// in-transition, and one immediate absorb transition per receiver state
/// without one. Returns a warning and adds nothing when the propagation is
/// never raised by any sender transition.
std::optional<Diagnostic> dependency_subnet(const DependencyLink& link,
                                            const ArchitectureModel& model, Gspn& net,
                                            TraceMap& trace);

/// Full transformation: component subnets in component pre-order, then
/// dependency subnets in the canonical link order. Throws TransformError
/// when no component carries an error model.
TransformResult transform(const ArchitectureModel& model);

} // namespace adaptkit

#endif
