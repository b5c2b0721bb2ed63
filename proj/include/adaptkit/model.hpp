#ifndef ADAPTKIT_MODEL_HPP
#define ADAPTKIT_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptkit/diagnostics.hpp"

namespace adaptkit {

enum class Category { System, Process, Thread, Processor, Memory, Bus, Device, Data };

enum class Direction { In, Out };

std::string_view category_name(Category c);
std::string_view direction_name(Direction d);

struct Feature {
    std::string name;
    Direction direction = Direction::In;
    SourceSpan span;
};

/// Stochastic annotation of an event or propagation: an exponential rate
/// (per hour) or a fixed probability.
struct Occurrence {
    enum class Kind { Poisson, Fixed };
    Kind kind = Kind::Fixed;
    double value = 1.0;

    static Occurrence poisson(double rate) { return {Kind::Poisson, rate}; }
    static Occurrence fixed(double probability) { return {Kind::Fixed, probability}; }
};

bool operator==(const Occurrence& a, const Occurrence& b);
std::string occurrence_display(const Occurrence& o);

struct ErrorState {
    std::string name;
    bool is_initial = false;
    SourceSpan span;
};

struct ErrorEvent {
    std::string name;
    std::optional<Occurrence> default_occurrence;
    SourceSpan span;
};

struct ErrorPropagation {
    std::string name;
    Direction direction = Direction::Out;
    std::optional<Occurrence> default_occurrence;
    SourceSpan span;
};

enum class TriggerKind { Event, InPropagation, OutPropagation };

struct ErrorTransition {
    std::string source;
    TriggerKind trigger_kind = TriggerKind::Event;
    std::string trigger;
    std::string destination;
    SourceSpan span;
};

/// "Fault" for events, "in X" / "out X" for propagations.
std::string trigger_display(const ErrorTransition& t);

/// A stochastic automaton: states, events, in/out propagations and the
/// transitions between states they trigger.
struct ErrorModelType {
    std::string name;
    std::vector<ErrorState> states;
    std::vector<ErrorEvent> events;
    std::vector<ErrorPropagation> propagations;
    std::vector<ErrorTransition> transitions;
    SourceSpan span;

    const ErrorState* find_state(std::string_view state_name) const;
    const ErrorEvent* find_event(std::string_view event_name) const;
    const ErrorPropagation* find_propagation(std::string_view prop_name) const;
};

/// Maps propagations arriving on one in-feature to an internal in-propagation
/// (raise) or discards them (mask). Condition names match any-of.
struct GuardInRule {
    std::string feature;
    std::vector<std::string> condition;
    bool mask = false;
    std::string raise; // in-propagation name; empty when mask
    SourceSpan span;
};

struct ErrorModelBinding {
    std::string type_name;
    std::map<std::string, Occurrence> occurrence_overrides;
    std::vector<GuardInRule> guard_in_rules;
    SourceSpan span;
};

/// Boolean expression over component[state] atoms. And/Or have two children,
/// Not has one; Atom has none. Atom component paths are written relative to
/// the component that declares the mapping.
struct StateExpr {
    enum class Kind { Atom, And, Or, Not };
    Kind kind = Kind::Atom;
    std::string component;
    std::string state;
    std::vector<StateExpr> children;
    SourceSpan span;

    static StateExpr atom(std::string component, std::string state);
    static StateExpr conjunction(StateExpr lhs, StateExpr rhs);
    static StateExpr disjunction(StateExpr lhs, StateExpr rhs);
    static StateExpr negation(StateExpr operand);

    /// All atoms in the expression, left to right.
    void collect_atoms(std::vector<const StateExpr*>& out) const;
};

struct StateMapping {
    std::string label;
    StateExpr expr;
    SourceSpan span;
};

struct ComponentInstance {
    std::string name;
    std::string path; // absolute dot-separated path from the root
    Category category = Category::System;
    std::vector<Feature> features;
    std::vector<ComponentInstance> subcomponents;
    std::optional<ErrorModelBinding> error_model;
    std::vector<StateMapping> state_mappings;
    SourceSpan span;

    const Feature* find_feature(std::string_view feature_name) const;
    const StateMapping* find_mapping(std::string_view label) const;
};

struct ConnectionEnd {
    std::string component; // absolute path
    std::string feature;
};

struct Connection {
    ConnectionEnd source;
    ConnectionEnd target;
    SourceSpan span;

    std::string display() const;
};

struct Binding {
    std::string application; // absolute path, process or thread
    std::string platform;    // absolute path, processor or memory
    SourceSpan span;
};

struct BusAccess {
    std::string accessor; // absolute path, processor/memory/device
    std::string bus;      // absolute path, bus
    SourceSpan span;
};

struct ArchitectureModel {
    std::map<std::string, ErrorModelType> error_types;
    ComponentInstance root;
    std::vector<Connection> connections;
    std::vector<Binding> bindings;
    std::vector<BusAccess> bus_accesses;

    const ComponentInstance* find_component(std::string_view path) const;

    /// Depth-first pre-order walk over all component instances.
    template <typename Fn>
    void for_each_component(Fn&& fn) const {
        walk(root, fn);
    }

    /// Path with the root segment removed; the root itself keeps its name.
    std::string display_path(std::string_view path) const;

private:
    template <typename Fn>
    static void walk(const ComponentInstance& c, Fn& fn) {
        fn(c);
        for (const auto& sub : c.subcomponents) walk(sub, fn);
    }
};

/// Error-model automaton attached to one component, with all occurrence
/// values resolved: override first, else the type default, else fixed(1.0).
struct ErrorModelInstance {
    std::string owner; // absolute path
    std::string type_name;
    std::vector<ErrorState> states;
    std::vector<ErrorEvent> events;
    std::vector<ErrorPropagation> propagations;
    std::vector<ErrorTransition> transitions;
    std::map<std::string, Occurrence> effective_occurrences;

    const std::string& initial_state() const;
    const Occurrence& occurrence_of(std::string_view trigger_name) const;
};

// Structural equality, ignoring source spans.
bool operator==(const Feature& a, const Feature& b);
bool operator==(const ErrorState& a, const ErrorState& b);
bool operator==(const ErrorEvent& a, const ErrorEvent& b);
bool operator==(const ErrorPropagation& a, const ErrorPropagation& b);
bool operator==(const ErrorTransition& a, const ErrorTransition& b);
bool operator==(const ErrorModelType& a, const ErrorModelType& b);
bool operator==(const GuardInRule& a, const GuardInRule& b);
bool operator==(const ErrorModelBinding& a, const ErrorModelBinding& b);
bool operator==(const StateExpr& a, const StateExpr& b);
bool operator==(const StateMapping& a, const StateMapping& b);
bool operator==(const ComponentInstance& a, const ComponentInstance& b);
bool operator==(const Connection& a, const Connection& b);
bool operator==(const Binding& a, const Binding& b);
bool operator==(const BusAccess& a, const BusAccess& b);
bool operator==(const ArchitectureModel& a, const ArchitectureModel& b);
bool operator==(const ErrorModelInstance& a, const ErrorModelInstance& b);

/// Resolves the component's error-model binding against the model's type
/// table. Returns absent when the component carries no binding. Throws
/// ContractError when the type name does not resolve.
std::optional<ErrorModelInstance> resolve_error_model(const ComponentInstance& component,
                                                      const ArchitectureModel& model);

/// Checks every structural invariant of the model and returns the violations.
/// An empty result means the model is ready for dependency analysis and
/// transformation.
std::vector<Diagnostic> validate_architecture(const ArchitectureModel& model);

/// Standard Boolean semantics; atom(c, s) is true iff assignment[c] == s.
/// Throws ContractError when an atom's component is missing from the
/// assignment.
bool evaluate_state_expr(const StateExpr& expr,
                         const std::map<std::string, std::string>& assignment);

} // namespace adaptkit

#endif
