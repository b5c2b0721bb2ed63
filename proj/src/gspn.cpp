#include "adaptkit/gspn.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "adaptkit/errors.hpp"
#include "adaptkit/text.hpp"

namespace adaptkit {

Transition Transition::timed(int id, std::string name, double rate) {
    Transition t;
    t.id = id;
    t.name = std::move(name);
    t.kind = Kind::TimedExponential;
    t.parameter = rate;
    return t;
}

Transition Transition::immediate(int id, std::string name, double weight) {
    Transition t;
    t.id = id;
    t.name = std::move(name);
    t.kind = Kind::Immediate;
    t.parameter = weight;
    return t;
}

const Place* Gspn::find_place(std::string_view name) const {
    for (const auto& p : places)
        if (p.name == name) return &p;
    return nullptr;
}

const Transition* Gspn::find_transition(std::string_view name) const {
    for (const auto& t : transitions)
        if (t.name == name) return &t;
    return nullptr;
}

bool operator==(const Place& a, const Place& b) {
    return a.id == b.id && a.name == b.name && a.initial_marking == b.initial_marking;
}

bool operator==(const Transition& a, const Transition& b) {
    return a.id == b.id && a.name == b.name && a.kind == b.kind && a.parameter == b.parameter;
}

bool operator==(const Arc& a, const Arc& b) {
    return a.id == b.id && a.direction == b.direction && a.place == b.place &&
           a.transition == b.transition && a.weight == b.weight;
}

bool operator==(const Gspn& a, const Gspn& b) {
    return a.places == b.places && a.transitions == b.transitions && a.arcs == b.arcs;
}

Marking initial_marking(const Gspn& net) {
    Marking m(net.places.size(), 0);
    for (const auto& p : net.places)
        if (p.id >= 0 && p.id < static_cast<int>(m.size())) m[p.id] = p.initial_marking;
    return m;
}

std::vector<Diagnostic> validate_gspn(const Gspn& net) {
    std::vector<Diagnostic> diagnostics;
    SourceSpan span;
    auto error = [&](std::string message) {
        diagnostics.push_back(make_error(std::move(message), span));
    };

    int place_count = static_cast<int>(net.places.size());
    int transition_count = static_cast<int>(net.transitions.size());
    std::set<int> place_ids;
    for (const auto& p : net.places) {
        if (p.id < 0 || p.id >= place_count)
            error("invalid net: place id " + std::to_string(p.id) + " out of range");
        else if (!place_ids.insert(p.id).second)
            error("invalid net: duplicate place id " + std::to_string(p.id));
        if (p.initial_marking < 0)
            error("invalid net: place " + p.name + " has negative initial marking");
    }
    std::set<int> transition_ids;
    for (const auto& t : net.transitions) {
        if (t.id < 0 || t.id >= transition_count)
            error("invalid net: transition id " + std::to_string(t.id) + " out of range");
        else if (!transition_ids.insert(t.id).second)
            error("invalid net: duplicate transition id " + std::to_string(t.id));
        if (!(t.parameter > 0.0)) {
            const char* what = t.kind == Transition::Kind::Immediate ? "weight" : "rate";
            error("invalid net: transition " + t.name + " requires a positive " + what +
                  ", got " + format_double(t.parameter));
        }
    }

    std::set<std::tuple<int, int, int>> arc_keys;
    std::set<int> arc_ids;
    std::vector<bool> has_input(net.transitions.size(), false);
    std::vector<bool> has_output(net.transitions.size(), false);
    for (const auto& a : net.arcs) {
        if (!arc_ids.insert(a.id).second)
            error("invalid net: duplicate arc id " + std::to_string(a.id));
        bool place_ok = a.place >= 0 && a.place < place_count && place_ids.count(a.place);
        bool transition_ok =
            a.transition >= 0 && a.transition < transition_count && transition_ids.count(a.transition);
        if (!place_ok)
            error("invalid net: arc " + std::to_string(a.id) + " references unknown place " +
                  std::to_string(a.place));
        if (!transition_ok)
            error("invalid net: arc " + std::to_string(a.id) +
                  " references unknown transition " + std::to_string(a.transition));
        if (a.weight < 1)
            error("invalid net: arc " + std::to_string(a.id) + " has weight " +
                  std::to_string(a.weight) + ", minimum is 1");
        if (place_ok && transition_ok) {
            auto key = std::make_tuple(static_cast<int>(a.direction), a.place, a.transition);
            if (!arc_keys.insert(key).second) {
                const auto& p = *std::find_if(net.places.begin(), net.places.end(),
                                              [&](const Place& x) { return x.id == a.place; });
                const auto& t =
                    *std::find_if(net.transitions.begin(), net.transitions.end(),
                                  [&](const Transition& x) { return x.id == a.transition; });
                error("invalid net: duplicate arc between place " + p.name + " and transition " +
                      t.name);
            }
            if (a.direction == ArcDirection::PlaceToTransition)
                has_input[a.transition] = true;
            else
                has_output[a.transition] = true;
        }
    }
    for (const auto& t : net.transitions) {
        if (t.id < 0 || t.id >= transition_count) continue;
        if (!has_input[t.id]) error("invalid net: transition " + t.name + " has no input arc");
        if (!has_output[t.id]) error("invalid net: transition " + t.name + " has no output arc");
    }
    return diagnostics;
}

namespace {

// Input and output arc weights of each transition, indexed by transition id.
struct ArcIndex {
    std::vector<std::vector<std::pair<int, int>>> inputs;  // (place, weight)
    std::vector<std::vector<std::pair<int, int>>> outputs; // (place, weight)

    explicit ArcIndex(const Gspn& net)
        : inputs(net.transitions.size()), outputs(net.transitions.size()) {
        for (const auto& a : net.arcs) {
            if (a.direction == ArcDirection::PlaceToTransition)
                inputs[a.transition].push_back({a.place, a.weight});
            else
                outputs[a.transition].push_back({a.place, a.weight});
        }
    }

    bool is_enabled(int t, const Marking& m) const {
        for (auto [place, weight] : inputs[t])
            if (m[place] < weight) return false;
        return true;
    }
};

std::vector<int> enabled_with(const Gspn& net, const ArcIndex& index, const Marking& m) {
    std::vector<int> timed;
    std::vector<int> immediate;
    for (const auto& t : net.transitions) {
        if (!index.is_enabled(t.id, m)) continue;
        (t.kind == Transition::Kind::Immediate ? immediate : timed).push_back(t.id);
    }
    std::vector<int>& chosen = immediate.empty() ? timed : immediate;
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

} // namespace

std::vector<int> enabled(const Gspn& net, const Marking& m) {
    if (m.size() != net.places.size())
        throw ContractError("marking dimension does not match the net");
    return enabled_with(net, ArcIndex(net), m);
}

Marking fire(const Gspn& net, const Marking& m, int t) {
    if (m.size() != net.places.size())
        throw ContractError("marking dimension does not match the net");
    if (t < 0 || t >= static_cast<int>(net.transitions.size()))
        throw ContractError("unknown transition id " + std::to_string(t));
    ArcIndex index(net);
    if (!index.is_enabled(t, m)) {
        const auto& name = std::find_if(net.transitions.begin(), net.transitions.end(),
                                        [&](const Transition& x) { return x.id == t; })
                               ->name;
        throw ContractError("transition " + name + " is not enabled");
    }
    Marking next = m;
    for (auto [place, weight] : index.inputs[t]) next[place] -= weight;
    for (auto [place, weight] : index.outputs[t]) next[place] += weight;
    return next;
}

int MarkingGraph::tangible_count() const {
    return static_cast<int>(std::count(vanishing.begin(), vanishing.end(), false));
}

int MarkingGraph::vanishing_count() const {
    return static_cast<int>(std::count(vanishing.begin(), vanishing.end(), true));
}

MarkingGraph reachability(const Gspn& net, int bound) {
    if (bound < 1) throw ContractError("reachability bound must be positive");
    ArcIndex index(net);
    MarkingGraph graph;
    std::map<Marking, int> seen;

    Marking m0 = initial_marking(net);
    for (const auto& p : net.places) {
        if (p.initial_marking > bound)
            throw BoundednessError(p.name, 0,
                                   "place " + p.name + " holds " +
                                       std::to_string(p.initial_marking) +
                                       " tokens initially, bound is " + std::to_string(bound));
    }
    seen.emplace(m0, 0);
    graph.markings.push_back(m0);
    std::deque<std::pair<int, int>> frontier; // (marking index, firing depth)
    frontier.push_back({0, 0});

    while (!frontier.empty()) {
        auto [current, depth] = frontier.front();
        frontier.pop_front();
        Marking m = graph.markings[current];
        std::vector<int> firable = enabled_with(net, index, m);
        bool is_vanishing = false;
        if (!firable.empty()) {
            const Transition& first = *std::find_if(
                net.transitions.begin(), net.transitions.end(),
                [&](const Transition& t) { return t.id == firable.front(); });
            is_vanishing = first.kind == Transition::Kind::Immediate;
        }
        if (static_cast<int>(graph.vanishing.size()) <= current)
            graph.vanishing.resize(current + 1, false);
        graph.vanishing[current] = is_vanishing;
        for (int t : firable) {
            Marking next = m;
            for (auto [place, weight] : index.inputs[t]) next[place] -= weight;
            for (auto [place, weight] : index.outputs[t]) next[place] += weight;
            for (const auto& p : net.places) {
                if (next[p.id] > bound)
                    throw BoundednessError(
                        p.name, depth + 1,
                        "place " + p.name + " exceeds bound " + std::to_string(bound) +
                            " after a firing sequence of length " + std::to_string(depth + 1));
            }
            auto [it, inserted] = seen.emplace(std::move(next), graph.markings.size());
            if (inserted) {
                graph.markings.push_back(it->first);
                frontier.push_back({it->second, depth + 1});
            }
            graph.edges.push_back({current, t, it->second});
        }
    }
    graph.vanishing.resize(graph.markings.size(), false);
    return graph;
}

} // namespace adaptkit
