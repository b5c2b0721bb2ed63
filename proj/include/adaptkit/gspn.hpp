#ifndef ADAPTKIT_GSPN_HPP
#define ADAPTKIT_GSPN_HPP

#include <string>
#include <vector>

#include "adaptkit/diagnostics.hpp"

namespace adaptkit {

struct Place {
    int id = 0; // dense, 0-based, unique across the net
    std::string name;
    int initial_marking = 0;
};

/// Timed transitions carry an exponential rate (per hour), immediate
/// transitions a relative weight used to resolve conflicts.
struct Transition {
    enum class Kind { TimedExponential, Immediate };
    int id = 0;
    std::string name;
    Kind kind = Kind::TimedExponential;
    double parameter = 1.0; // rate for timed, weight for immediate

    static Transition timed(int id, std::string name, double rate);
    static Transition immediate(int id, std::string name, double weight);
};

enum class ArcDirection { PlaceToTransition, TransitionToPlace };

struct Arc {
    int id = 0;
    ArcDirection direction = ArcDirection::PlaceToTransition;
    int place = 0;
    int transition = 0;
    int weight = 1;
};

struct Gspn {
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::vector<Arc> arcs;

    const Place* find_place(std::string_view name) const;
    const Transition* find_transition(std::string_view name) const;
};

bool operator==(const Place& a, const Place& b);
bool operator==(const Transition& a, const Transition& b);
bool operator==(const Arc& a, const Arc& b);
bool operator==(const Gspn& a, const Gspn& b);

/// Token counts indexed by place id.
using Marking = std::vector<int>;

Marking initial_marking(const Gspn& net);

/// Reports every structural violation: ids must be dense and unique,
/// parameters positive, arc weights >= 1, arc endpoints must exist, no two
/// arcs may share (direction, place, transition), and every transition needs
/// at least one input and one output arc.
std::vector<Diagnostic> validate_gspn(const Gspn& net);

/// Transition ids enabled in m, ascending. A transition is enabled when
/// every input arc is covered; enabled immediate transitions pre-empt all
/// timed ones.
std::vector<int> enabled(const Gspn& net, const Marking& m);

/// Fires t in m. Throws ContractError when t is not enabled in m.
Marking fire(const Gspn& net, const Marking& m, int t);

struct MarkingGraph {
    struct Edge {
        int from = 0;
        int transition = 0;
        int to = 0;
    };

    std::vector<Marking> markings;
    std::vector<bool> vanishing; // one flag per marking
    std::vector<Edge> edges;     // grouped by `from` in BFS order
    int initial = 0;

    int tangible_count() const;
    int vanishing_count() const;
};

/// Breadth-first exploration from the initial marking. Successors of each
/// marking are expanded in ascending transition id, so indices are
/// deterministic. A marking is vanishing when an immediate transition is
/// enabled in it. Throws BoundednessError when a place's token count
/// exceeds `bound`, naming the place and the firing sequence length.
MarkingGraph reachability(const Gspn& net, int bound);

} // namespace adaptkit

#endif
