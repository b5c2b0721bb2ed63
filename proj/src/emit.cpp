#include "adaptkit/emit.hpp"

#include <algorithm>

#include "adaptkit/errors.hpp"
#include "adaptkit/text.hpp"

namespace adaptkit {

namespace {

void check_net(const Gspn& net) {
    auto diagnostics = validate_gspn(net);
    if (!diagnostics.empty())
        throw EmitError("refusing to emit a structurally broken net: " + diagnostics[0].message);
}

Gspn by_id(const Gspn& net) {
    Gspn sorted = net;
    std::sort(sorted.places.begin(), sorted.places.end(),
              [](const Place& a, const Place& b) { return a.id < b.id; });
    std::sort(sorted.transitions.begin(), sorted.transitions.end(),
              [](const Transition& a, const Transition& b) { return a.id < b.id; });
    std::sort(sorted.arcs.begin(), sorted.arcs.end(),
              [](const Arc& a, const Arc& b) { return a.id < b.id; });
    return sorted;
}

const char* kind_name(Transition::Kind kind) {
    return kind == Transition::Kind::Immediate ? "immediate" : "timed_exponential";
}

} // namespace

std::string emit_pnml(const Gspn& net) {
    check_net(net);
    Gspn sorted = by_id(net);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n";
    out += "  <net id=\"net0\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
    out += "    <page id=\"page0\">\n";
    for (const auto& p : sorted.places) {
        out += "      <place id=\"p" + std::to_string(p.id) + "\">\n";
        out += "        <name><text>" + xml_escape(p.name) + "</text></name>\n";
        if (p.initial_marking > 0)
            out += "        <initialMarking><text>" + std::to_string(p.initial_marking) +
                   "</text></initialMarking>\n";
        out += "      </place>\n";
    }
    for (const auto& t : sorted.transitions) {
        out += "      <transition id=\"t" + std::to_string(t.id) + "\">\n";
        out += "        <name><text>" + xml_escape(t.name) + "</text></name>\n";
        out += "        <toolspecific tool=\"adapt-kit\" version=\"1\">\n";
        out += "          <kind>" + std::string(kind_name(t.kind)) + "</kind>\n";
        out += "          <parameter>" + format_double(t.parameter) + "</parameter>\n";
        out += "        </toolspecific>\n";
        out += "      </transition>\n";
    }
    for (const auto& a : sorted.arcs) {
        std::string place = "p" + std::to_string(a.place);
        std::string transition = "t" + std::to_string(a.transition);
        bool from_place = a.direction == ArcDirection::PlaceToTransition;
        out += "      <arc id=\"a" + std::to_string(a.id) + "\" source=\"" +
               (from_place ? place : transition) + "\" target=\"" +
               (from_place ? transition : place) + "\"";
        if (a.weight == 1) {
            out += "/>\n";
        } else {
            out += ">\n        <inscription><text>" + std::to_string(a.weight) +
                   "</text></inscription>\n      </arc>\n";
        }
    }
    out += "    </page>\n";
    out += "  </net>\n";
    out += "</pnml>\n";
    return out;
}

std::string emit_generic_xml(const Gspn& net, const TraceMap& trace) {
    check_net(net);
    if (trace.place_origin.size() != net.places.size() ||
        trace.transition_origin.size() != net.transitions.size())
        throw EmitError("trace map does not cover the net: " +
                        std::to_string(trace.place_origin.size()) + "/" +
                        std::to_string(net.places.size()) + " places, " +
                        std::to_string(trace.transition_origin.size()) + "/" +
                        std::to_string(net.transitions.size()) + " transitions");
    Gspn sorted = by_id(net);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<gspn>\n";
    out += "  <places>\n";
    for (const auto& p : sorted.places)
        out += "    <place id=\"" + std::to_string(p.id) + "\" name=\"" + xml_escape(p.name) +
               "\" initialMarking=\"" + std::to_string(p.initial_marking) + "\"/>\n";
    out += "  </places>\n";
    out += "  <transitions>\n";
    for (const auto& t : sorted.transitions) {
        const char* parameter = t.kind == Transition::Kind::Immediate ? "weight" : "rate";
        out += "    <transition id=\"" + std::to_string(t.id) + "\" name=\"" +
               xml_escape(t.name) + "\" kind=\"" + kind_name(t.kind) + "\" " + parameter +
               "=\"" + format_double(t.parameter) + "\"/>\n";
    }
    out += "  </transitions>\n";
    out += "  <arcs>\n";
    for (const auto& a : sorted.arcs)
        out += "    <arc id=\"" + std::to_string(a.id) + "\" direction=\"" +
               (a.direction == ArcDirection::PlaceToTransition ? "place_to_transition"
                                                               : "transition_to_place") +
               "\" place=\"" + std::to_string(a.place) + "\" transition=\"" +
               std::to_string(a.transition) + "\" weight=\"" + std::to_string(a.weight) + "\"/>\n";
    out += "  </arcs>\n";
    out += "  <trace>\n";
    for (const auto& p : sorted.places) {
        const PlaceOrigin& origin = trace.place_origin[p.id];
        if (origin.kind == PlaceOrigin::Kind::State) {
            out += "    <place id=\"" + std::to_string(p.id) + "\" origin=\"state\" component=\"" +
                   xml_escape(origin.component) + "\" state=\"" + xml_escape(origin.state) +
                   "\"/>\n";
        } else {
            out += "    <place id=\"" + std::to_string(p.id) +
                   "\" origin=\"pending\" sender=\"" + xml_escape(origin.link.sender) +
                   "\" propagation=\"" + xml_escape(origin.link.out_prop) + "\" receiver=\"" +
                   xml_escape(origin.link.receiver) + "\"/>\n";
        }
    }
    for (const auto& t : sorted.transitions) {
        const TransitionOrigin& origin = trace.transition_origin[t.id];
        out += "    <transition id=\"" + std::to_string(t.id) + "\" origin=\"";
        switch (origin.kind) {
            case TransitionOrigin::Kind::Automaton:
                out += "automaton\" component=\"" + xml_escape(origin.component) +
                       "\" trigger=\"" + xml_escape(origin.trigger) + "\" state=\"" +
                       xml_escape(origin.state);
                break;
            case TransitionOrigin::Kind::Consume:
                out += "consume\" component=\"" + xml_escape(origin.component) + "\" trigger=\"" +
                       xml_escape(origin.trigger) + "\" state=\"" + xml_escape(origin.state) +
                       "\" sender=\"" + xml_escape(origin.link.sender);
                break;
            case TransitionOrigin::Kind::Absorb:
                out += "absorb\" component=\"" + xml_escape(origin.component) + "\" trigger=\"" +
                       xml_escape(origin.trigger) + "\" state=\"" + xml_escape(origin.state) +
                       "\" sender=\"" + xml_escape(origin.link.sender);
                break;
        }
        out += "\"/>\n";
    }
    out += "  </trace>\n";
    out += "</gspn>\n";
    return out;
}

namespace {

std::string dot_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string emit_dot(const Gspn& net) {
    check_net(net);
    Gspn sorted = by_id(net);
    std::string out;
    out += "digraph gspn {\n";
    out += "  rankdir=LR;\n";
    out += "  node [fontsize=10];\n";
    for (const auto& p : sorted.places) {
        std::string label = dot_escape(p.name);
        if (p.initial_marking > 0) label += "\\n" + std::to_string(p.initial_marking);
        out += "  p" + std::to_string(p.id) + " [shape=circle, label=\"" + label + "\"];\n";
    }
    for (const auto& t : sorted.transitions) {
        std::string label = dot_escape(t.name) + "\\n" + format_double(t.parameter);
        if (t.kind == Transition::Kind::Immediate)
            out += "  t" + std::to_string(t.id) +
                   " [shape=box, style=filled, fillcolor=black, fontcolor=white, height=0.1, "
                   "label=\"" +
                   label + "\"];\n";
        else
            out += "  t" + std::to_string(t.id) + " [shape=box, label=\"" + label + "\"];\n";
    }
    for (const auto& a : sorted.arcs) {
        std::string place = "p" + std::to_string(a.place);
        std::string transition = "t" + std::to_string(a.transition);
        bool from_place = a.direction == ArcDirection::PlaceToTransition;
        out += "  " + (from_place ? place : transition) + " -> " +
               (from_place ? transition : place);
        if (a.weight > 1) out += " [label=\"" + std::to_string(a.weight) + "\"]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

} // namespace adaptkit
