#include "adaptkit/transform.hpp"

#include <algorithm>

#include "adaptkit/errors.hpp"

namespace adaptkit {

bool operator==(const PlaceOrigin& a, const PlaceOrigin& b) {
    return a.kind == b.kind && a.component == b.component && a.state == b.state && a.link == b.link;
}

bool operator==(const TransitionOrigin& a, const TransitionOrigin& b) {
    return a.kind == b.kind && a.component == b.component && a.trigger == b.trigger &&
           a.state == b.state && a.link == b.link;
}

bool operator==(const TraceMap& a, const TraceMap& b) {
    return a.place_origin == b.place_origin && a.transition_origin == b.transition_origin;
}

namespace {

int add_place(Gspn& net, TraceMap& trace, std::string name, int m0, PlaceOrigin origin) {
    int id = static_cast<int>(net.places.size());
    net.places.push_back({id, std::move(name), m0});
    trace.place_origin.push_back(std::move(origin));
    return id;
}

int add_transition(Gspn& net, TraceMap& trace, Transition t, TransitionOrigin origin) {
    t.id = static_cast<int>(net.transitions.size());
    int id = t.id;
    net.transitions.push_back(std::move(t));
    trace.transition_origin.push_back(std::move(origin));
    return id;
}

void add_arc(Gspn& net, ArcDirection direction, int place, int transition, int weight = 1) {
    int id = static_cast<int>(net.arcs.size());
    net.arcs.push_back({id, direction, place, transition, weight});
}

std::string pending_name(const ArchitectureModel& model, const DependencyLink& link) {
    return "pend(" + model.display_path(link.sender) + "/" + link.out_prop + "->" +
           model.display_path(link.receiver) + ")";
}

// Lookup by architectural origin rather than by place name: display names
// may collide (a child of the root sharing the root's name), paths cannot.
int place_for_state(const TraceMap& trace, const std::string& component,
                    const std::string& state) {
    for (std::size_t i = 0; i < trace.place_origin.size(); ++i) {
        const PlaceOrigin& origin = trace.place_origin[i];
        if (origin.kind == PlaceOrigin::Kind::State && origin.component == component &&
            origin.state == state)
            return static_cast<int>(i);
    }
    throw TransformError("missing place for state " + component + "/" + state);
}

} // namespace

void component_subnet(const ErrorModelInstance& emi, const ArchitectureModel& model, Gspn& net,
                      TraceMap& trace) {
    std::string owner = model.display_path(emi.owner);
    for (const auto& s : emi.states) {
        PlaceOrigin origin;
        origin.kind = PlaceOrigin::Kind::State;
        origin.component = emi.owner;
        origin.state = s.name;
        add_place(net, trace, owner + "/" + s.name, s.is_initial ? 1 : 0, std::move(origin));
    }
    for (const auto& t : emi.transitions) {
        if (t.trigger_kind == TriggerKind::InPropagation) continue;
        const Occurrence& occurrence = emi.occurrence_of(t.trigger);
        if (occurrence.kind == Occurrence::Kind::Fixed && occurrence.value == 0.0) continue;
        std::string name =
            owner + "/" + t.source + "-[" + trigger_display(t) + "]->" + t.destination;
        Transition transition = occurrence.kind == Occurrence::Kind::Poisson
                                    ? Transition::timed(0, std::move(name), occurrence.value)
                                    : Transition::immediate(0, std::move(name), occurrence.value);
        TransitionOrigin origin;
        origin.kind = TransitionOrigin::Kind::Automaton;
        origin.component = emi.owner;
        origin.trigger = trigger_display(t);
        origin.state = t.source;
        int id = add_transition(net, trace, std::move(transition), std::move(origin));
        add_arc(net, ArcDirection::PlaceToTransition, place_for_state(trace, emi.owner, t.source),
                id);
        add_arc(net, ArcDirection::TransitionToPlace,
                place_for_state(trace, emi.owner, t.destination), id);
    }
}

std::optional<Diagnostic> dependency_subnet(const DependencyLink& link,
                                            const ArchitectureModel& model, Gspn& net,
                                            TraceMap& trace) {
    if (link.masked) throw ContractError("masked link produces no dependency subnet");

    std::vector<int> anchors;
    std::string raising = "out " + link.out_prop;
    for (std::size_t i = 0; i < trace.transition_origin.size(); ++i) {
        const TransitionOrigin& origin = trace.transition_origin[i];
        if (origin.kind == TransitionOrigin::Kind::Automaton && origin.component == link.sender &&
            origin.trigger == raising)
            anchors.push_back(net.transitions[i].id);
    }
    if (anchors.empty()) {
        return make_warning("unanchored propagation: out propagation " + link.out_prop + " of " +
                                model.display_path(link.sender) +
                                " is never raised by a transition; link to " +
                                model.display_path(link.receiver) + " ignored",
                            SourceSpan{});
    }

    const ComponentInstance* receiver = model.find_component(link.receiver);
    auto emi = resolve_error_model(*receiver, model);
    if (!emi) throw ContractError("link receiver " + link.receiver + " has no error model");

    std::string pend = pending_name(model, link);
    PlaceOrigin pend_origin;
    pend_origin.kind = PlaceOrigin::Kind::Pending;
    pend_origin.link = link;
    int pend_place = add_place(net, trace, pend, 0, std::move(pend_origin));
    for (int anchor : anchors) add_arc(net, ArcDirection::TransitionToPlace, pend_place, anchor);

    for (const auto& t : emi->transitions) {
        if (t.trigger_kind != TriggerKind::InPropagation || t.trigger != link.in_prop) continue;
        TransitionOrigin origin;
        origin.kind = TransitionOrigin::Kind::Consume;
        origin.component = link.receiver;
        origin.trigger = link.in_prop;
        origin.state = t.source;
        origin.link = link;
        int id = add_transition(
            net, trace,
            Transition::immediate(
                0, pend + "/" + t.source + "-[in " + link.in_prop + "]->" + t.destination, 1.0),
            std::move(origin));
        add_arc(net, ArcDirection::PlaceToTransition, pend_place, id);
        add_arc(net, ArcDirection::PlaceToTransition,
                place_for_state(trace, link.receiver, t.source), id);
        add_arc(net, ArcDirection::TransitionToPlace,
                place_for_state(trace, link.receiver, t.destination), id);
    }
    for (const auto& s : emi->states) {
        bool reacts = std::any_of(emi->transitions.begin(), emi->transitions.end(),
                                  [&](const ErrorTransition& t) {
                                      return t.trigger_kind == TriggerKind::InPropagation &&
                                             t.trigger == link.in_prop && t.source == s.name;
                                  });
        if (reacts) continue;
        TransitionOrigin origin;
        origin.kind = TransitionOrigin::Kind::Absorb;
        origin.component = link.receiver;
        origin.trigger = link.in_prop;
        origin.state = s.name;
        origin.link = link;
        int id = add_transition(net, trace,
                                Transition::immediate(0, pend + "/absorb@" + s.name, 1.0),
                                std::move(origin));
        int state_place = place_for_state(trace, link.receiver, s.name);
        add_arc(net, ArcDirection::PlaceToTransition, pend_place, id);
        add_arc(net, ArcDirection::PlaceToTransition, state_place, id);
        add_arc(net, ArcDirection::TransitionToPlace, state_place, id);
    }
    return std::nullopt;
}

TransformResult transform(const ArchitectureModel& model) {
    TransformResult result;
    std::vector<ErrorModelInstance> instances;
    model.for_each_component([&](const ComponentInstance& c) {
        auto emi = resolve_error_model(c, model);
        if (emi) instances.push_back(std::move(*emi));
    });
    if (instances.empty()) throw TransformError("nothing to transform");

    for (const auto& emi : instances)
        component_subnet(emi, model, result.net, result.trace);
    for (const auto& link : find_dependencies(model)) {
        if (link.masked) continue;
        auto warning = dependency_subnet(link, model, result.net, result.trace);
        if (warning) result.warnings.push_back(std::move(*warning));
    }
    return result;
}

} // namespace adaptkit
