#include <doctest.h>

#include <random>
#include <string>

#include "adaptkit/emit.hpp"
#include "adaptkit/errors.hpp"
#include "adaptkit/transform.hpp"
#include "test_support.hpp"

using namespace adaptkit;
using namespace adaptkit::testing;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

TransformResult transformed_fixture(const std::string& name) {
    return transform(parse_fixture(name));
}

} // namespace

TEST_CASE("PNML carries the net in the 2009 PT-net dialect") {
    TransformResult result = transformed_fixture("l1.adm");
    std::string pnml = emit_pnml(result.net);

    CHECK(contains(pnml, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>"));
    CHECK(contains(pnml, "xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\""));
    CHECK(contains(pnml, "type=\"http://www.pnml.org/version-2009/grammar/ptnet\""));
    CHECK(contains(pnml, "<place id=\"p0\">"));
    CHECK(contains(pnml, "<transition id=\"t0\">"));
    CHECK(contains(pnml, "<arc id=\"a0\""));
    CHECK(contains(pnml, "<name><text>CPU/ErrorFree</text></name>"));
    CHECK(contains(pnml, "<name><text>CPU/ErrorFree-[Fault]-&gt;Failed</text></name>"));

    // Timing rides in a toolspecific block.
    CHECK(contains(pnml, "<toolspecific tool=\"adapt-kit\" version=\"1\">"));
    CHECK(contains(pnml, "<kind>timed_exponential</kind>"));
    CHECK(contains(pnml, "<parameter>0.001</parameter>"));

    // Only the marked place declares an initialMarking.
    CHECK(contains(pnml, "<initialMarking><text>1</text></initialMarking>"));
    CHECK(pnml.find("<initialMarking><text>0</text>") == std::string::npos);
}

TEST_CASE("PNML spells out arc weights above one as inscriptions") {
    Gspn net;
    net.places = {{0, "pool", 2}, {1, "sink", 0}};
    net.transitions = {Transition::timed(0, "drain", 1.0)};
    net.arcs = {{0, ArcDirection::PlaceToTransition, 0, 0, 2},
                {1, ArcDirection::TransitionToPlace, 1, 0, 1}};
    REQUIRE(validate_gspn(net).empty());
    std::string pnml = emit_pnml(net);
    CHECK(contains(pnml, "<inscription><text>2</text></inscription>"));
    // The weight-1 arc stays self-closing.
    CHECK(contains(pnml, "<arc id=\"a1\" source=\"t0\" target=\"p1\"/>"));
    CHECK(contains(pnml, "<arc id=\"a0\" source=\"p0\" target=\"t0\">"));
}

TEST_CASE("immediate transitions carry their weight as the parameter") {
    TransformResult result = transformed_fixture("duplex.adm");
    std::string pnml = emit_pnml(result.net);
    CHECK(contains(pnml, "<kind>immediate</kind>"));
    std::string xml = emit_generic_xml(result.net, result.trace);
    CHECK(contains(xml, "kind=\"immediate\" weight=\"1\""));
    CHECK(contains(xml, "kind=\"timed_exponential\" rate=\"0.001\""));
}

TEST_CASE("every emitter refuses a structurally broken net") {
    Gspn net;
    net.places = {{0, "p", 1}};
    net.transitions = {Transition::timed(0, "t", 1.0)};
    // No arcs: the transition has neither input nor output.
    TraceMap trace;
    trace.place_origin.resize(1);
    trace.transition_origin.resize(1);
    CHECK_THROWS_AS((void)emit_pnml(net), EmitError);
    CHECK_THROWS_AS((void)emit_generic_xml(net, trace), EmitError);
    CHECK_THROWS_AS((void)emit_dot(net), EmitError);
}

TEST_CASE("the generic document requires a trace covering the net") {
    TransformResult result = transformed_fixture("l1.adm");
    TraceMap short_trace = result.trace;
    short_trace.transition_origin.pop_back();
    try {
        emit_generic_xml(result.net, short_trace);
        FAIL("expected EmitError");
    } catch (const EmitError& e) {
        CHECK(contains(e.what(), "trace map does not cover the net"));
    }
}

TEST_CASE("the generic document round-trips through its reader") {
    for (const char* name : {"l1.adm", "duplex.adm", "repairman.adm", "cpu_thread.adm"}) {
        CAPTURE(name);
        TransformResult result = transformed_fixture(name);
        Gspn back = read_generic_xml(emit_generic_xml(result.net, result.trace));
        CHECK(back == result.net);
    }
}

TEST_CASE("random nets round-trip through the generic document") {
    std::mt19937 rng(777);
    for (int i = 0; i < 20; ++i) {
        GeneratedModel generated = random_model(rng);
        CAPTURE(generated.text);
        TransformResult result = transform(parse_text(generated.text));
        Gspn back = read_generic_xml(emit_generic_xml(result.net, result.trace));
        CHECK(back == result.net);
    }
}

TEST_CASE("the trace section states where each node came from") {
    TransformResult result = transformed_fixture("duplex.adm");
    std::string xml = emit_generic_xml(result.net, result.trace);

    CHECK(contains(xml, "origin=\"state\" component=\"Top.S\" state=\"ErrorFree\""));
    CHECK(contains(xml,
                   "origin=\"pending\" sender=\"Top.S\" propagation=\"DataOmission\" "
                   "receiver=\"Top.R\""));
    CHECK(contains(xml, "origin=\"automaton\""));
    CHECK(contains(xml, "origin=\"consume\""));
    CHECK(contains(xml, "origin=\"absorb\""));
    CHECK(contains(xml, "sender=\"Top.S\""));
    CHECK(contains(xml, "trigger=\"DataOmission\""));
}

TEST_CASE("markup characters in names are escaped") {
    Gspn net;
    net.places = {{0, "a<b>&\"q\"", 1}, {1, "other", 0}};
    net.transitions = {Transition::timed(0, "go", 1.0)};
    net.arcs = {{0, ArcDirection::PlaceToTransition, 0, 0, 1},
                {1, ArcDirection::TransitionToPlace, 1, 0, 1}};
    REQUIRE(validate_gspn(net).empty());
    TraceMap trace;
    trace.place_origin = {PlaceOrigin{PlaceOrigin::Kind::State, "Top.A", "a<b>&\"q\"", {}},
                          PlaceOrigin{PlaceOrigin::Kind::State, "Top.A", "other", {}}};
    trace.transition_origin = {
        TransitionOrigin{TransitionOrigin::Kind::Automaton, "Top.A", "go", "a<b>&\"q\"", {}}};

    std::string pnml = emit_pnml(net);
    CHECK(contains(pnml, "a&lt;b&gt;&amp;&quot;q&quot;"));
    CHECK(pnml.find("<b>") == std::string::npos);

    std::string xml = emit_generic_xml(net, trace);
    CHECK(contains(xml, "name=\"a&lt;b&gt;&amp;&quot;q&quot;\""));
    Gspn back = read_generic_xml(xml);
    CHECK(back == net);
}

TEST_CASE("the dot rendering distinguishes node kinds") {
    Gspn net;
    net.places = {{0, "up", 1}, {1, "down", 0}};
    net.transitions = {Transition::timed(0, "fail", 0.5),
                       Transition::immediate(1, "switch\"x\\y", 2.0)};
    net.arcs = {{0, ArcDirection::PlaceToTransition, 0, 0, 1},
                {1, ArcDirection::TransitionToPlace, 1, 0, 1},
                {2, ArcDirection::PlaceToTransition, 1, 1, 2},
                {3, ArcDirection::TransitionToPlace, 0, 1, 1}};
    REQUIRE(validate_gspn(net).empty());
    std::string dot = emit_dot(net);

    CHECK(contains(dot, "digraph gspn {"));
    // Marked place shows its token count in the label.
    CHECK(contains(dot, "p0 [shape=circle, label=\"up\\n1\"];"));
    CHECK(contains(dot, "p1 [shape=circle, label=\"down\"];"));
    // Timed: open box; immediate: filled.
    CHECK(contains(dot, "t0 [shape=box, label=\"fail\\n0.5\"];"));
    CHECK(contains(dot, "style=filled"));
    // Quotes and backslashes in names are escaped for the label.
    CHECK(contains(dot, "switch\\\"x\\\\y"));
    // Arc weight 2 labels its edge; weight-1 arcs stay bare.
    CHECK(contains(dot, "p1 -> t1 [label=\"2\"];"));
    CHECK(contains(dot, "p0 -> t0;"));
}

TEST_CASE("emission is deterministic") {
    TransformResult result = transformed_fixture("repairman.adm");
    CHECK(emit_pnml(result.net) == emit_pnml(result.net));
    CHECK(emit_generic_xml(result.net, result.trace) ==
          emit_generic_xml(result.net, result.trace));
    CHECK(emit_dot(result.net) == emit_dot(result.net));

    // Node order in the document follows ids, not container order.
    Gspn shuffled = result.net;
    std::swap(shuffled.places.front(), shuffled.places.back());
    std::swap(shuffled.transitions.front(), shuffled.transitions.back());
    CHECK(emit_pnml(shuffled) == emit_pnml(result.net));
    CHECK(emit_dot(shuffled) == emit_dot(result.net));
}
