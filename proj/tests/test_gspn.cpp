#include <doctest.h>

#include <string>

#include "adaptkit/diagnostics.hpp"
#include "adaptkit/errors.hpp"
#include "adaptkit/gspn.hpp"
#include "adaptkit/transform.hpp"
#include "test_support.hpp"

using namespace adaptkit;
using namespace adaptkit::testing;

namespace {

Gspn two_state_net() {
    Gspn net;
    net.places = {{0, "up", 1}, {1, "down", 0}};
    net.transitions = {Transition::timed(0, "fail", 1.0e-3),
                       Transition::timed(1, "repair", 1.0e-1)};
    net.arcs = {{0, ArcDirection::PlaceToTransition, 0, 0, 1},
                {1, ArcDirection::TransitionToPlace, 1, 0, 1},
                {2, ArcDirection::PlaceToTransition, 1, 1, 1},
                {3, ArcDirection::TransitionToPlace, 0, 1, 1}};
    return net;
}

bool has_message(const std::vector<Diagnostic>& diags, const std::string& needle) {
    for (const auto& d : diags)
        if (d.message.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("a well-formed net validates cleanly") {
    CHECK(validate_gspn(two_state_net()).empty());
}

TEST_CASE("validate_gspn reports structural violations") {
    SUBCASE("duplicate place id") {
        Gspn net = two_state_net();
        net.places[1].id = 0;
        auto diags = validate_gspn(net);
        REQUIRE(!diags.empty());
        CHECK(diags[0].message.rfind("invalid net:", 0) == 0);
        CHECK(has_message(diags, "place id 0"));
    }
    SUBCASE("place ids must be dense") {
        Gspn net = two_state_net();
        net.places[1].id = 7;
        CHECK(has_message(validate_gspn(net), "place id"));
    }
    SUBCASE("duplicate transition id") {
        Gspn net = two_state_net();
        net.transitions[1].id = 0;
        CHECK(has_message(validate_gspn(net), "transition id 0"));
    }
    SUBCASE("non-positive rate") {
        Gspn net = two_state_net();
        net.transitions[0].parameter = 0.0;
        CHECK(has_message(validate_gspn(net), "rate"));
    }
    SUBCASE("non-positive weight") {
        Gspn net = two_state_net();
        net.transitions[0] = Transition::immediate(0, "fail", -2.0);
        CHECK(has_message(validate_gspn(net), "weight"));
    }
    SUBCASE("negative initial marking") {
        Gspn net = two_state_net();
        net.places[0].initial_marking = -1;
        CHECK(has_message(validate_gspn(net), "initial marking"));
    }
    SUBCASE("arc weight below one") {
        Gspn net = two_state_net();
        net.arcs[0].weight = 0;
        CHECK(has_message(validate_gspn(net), "weight"));
    }
    SUBCASE("arc referencing a missing place") {
        Gspn net = two_state_net();
        net.arcs[0].place = 9;
        CHECK(has_message(validate_gspn(net), "place"));
    }
    SUBCASE("arc referencing a missing transition") {
        Gspn net = two_state_net();
        net.arcs[0].transition = 9;
        CHECK(has_message(validate_gspn(net), "transition"));
    }
    SUBCASE("two arcs sharing direction and endpoints") {
        Gspn net = two_state_net();
        net.arcs.push_back({4, ArcDirection::PlaceToTransition, 0, 0, 1});
        CHECK(has_message(validate_gspn(net), "duplicate"));
    }
    SUBCASE("transition without an input arc") {
        Gspn net = two_state_net();
        net.transitions.push_back(Transition::timed(2, "orphan", 1.0));
        net.arcs.push_back({4, ArcDirection::TransitionToPlace, 0, 2, 1});
        CHECK(has_message(validate_gspn(net), "input"));
    }
    SUBCASE("transition without an output arc") {
        Gspn net = two_state_net();
        net.transitions.push_back(Transition::timed(2, "sink", 1.0));
        net.arcs.push_back({4, ArcDirection::PlaceToTransition, 0, 2, 1});
        CHECK(has_message(validate_gspn(net), "output"));
    }
}

TEST_CASE("enabling respects arc coverage") {
    Gspn net = two_state_net();
    CHECK(enabled(net, {1, 0}) == std::vector<int>{0});
    CHECK(enabled(net, {0, 1}) == std::vector<int>{1});
    CHECK(enabled(net, {0, 0}).empty());
    CHECK(enabled(net, {1, 1}) == std::vector<int>{0, 1});
}

TEST_CASE("an enabled immediate transition pre-empts timed ones") {
    Gspn net = two_state_net();
    net.transitions.push_back(Transition::immediate(2, "switch", 1.0));
    net.arcs.push_back({4, ArcDirection::PlaceToTransition, 0, 2, 1});
    net.arcs.push_back({5, ArcDirection::TransitionToPlace, 1, 2, 1});
    REQUIRE(validate_gspn(net).empty());
    // Place 0 marked: the timed "fail" would be enabled, but the immediate
    // transition consumes the same token and wins.
    CHECK(enabled(net, {1, 0}) == std::vector<int>{2});
    // Place 1 marked: no immediate enabled, timed "repair" proceeds.
    CHECK(enabled(net, {0, 1}) == std::vector<int>{1});
}

TEST_CASE("firing moves tokens along the arcs") {
    Gspn net = two_state_net();
    CHECK(fire(net, {1, 0}, 0) == Marking{0, 1});
    CHECK(fire(net, {0, 1}, 1) == Marking{1, 0});
}

TEST_CASE("firing a disabled transition is a contract violation") {
    Gspn net = two_state_net();
    CHECK_THROWS_AS(fire(net, {0, 1}, 0), ContractError);
    CHECK_THROWS_AS(fire(net, {1, 0}, 7), ContractError);
    CHECK_THROWS_AS(fire(net, {1}, 0), ContractError);
}

TEST_CASE("initial_marking collects the declared tokens") {
    CHECK(initial_marking(two_state_net()) == Marking{1, 0});
}

TEST_CASE("reachability of the two-state net") {
    MarkingGraph graph = reachability(two_state_net(), 8);
    REQUIRE(graph.markings.size() == 2);
    CHECK(graph.initial == 0);
    CHECK(graph.markings[0] == Marking{1, 0});
    CHECK(graph.markings[1] == Marking{0, 1});
    CHECK(graph.tangible_count() == 2);
    CHECK(graph.vanishing_count() == 0);
    REQUIRE(graph.edges.size() == 2);
    CHECK(graph.edges[0].from == 0);
    CHECK(graph.edges[0].transition == 0);
    CHECK(graph.edges[0].to == 1);
    CHECK(graph.edges[1].from == 1);
    CHECK(graph.edges[1].transition == 1);
    CHECK(graph.edges[1].to == 0);
}

TEST_CASE("independent automata multiply out in the reachability graph") {
    ArchitectureModel model = parse_fixture("indep.adm");
    TransformResult result = transform(model);
    MarkingGraph graph = reachability(result.net, 8);
    CHECK(graph.markings.size() == 4);
    CHECK(graph.tangible_count() == 4);
    CHECK(graph.vanishing_count() == 0);
    // Each marking has two outgoing edges (one per automaton).
    CHECK(graph.edges.size() == 8);
}

TEST_CASE("a marking is vanishing when an immediate transition is enabled") {
    Gspn net = two_state_net();
    net.transitions[1] = Transition::immediate(1, "repair", 1.0);
    MarkingGraph graph = reachability(net, 8);
    REQUIRE(graph.markings.size() == 2);
    CHECK_FALSE(graph.vanishing[0]);
    CHECK(graph.vanishing[1]);
    CHECK(graph.tangible_count() == 1);
    CHECK(graph.vanishing_count() == 1);
}

TEST_CASE("an unbounded place stops the exploration with a diagnosis") {
    // One token pump: t consumes one token from p and puts two back.
    Gspn net;
    net.places = {{0, "pool", 1}};
    net.transitions = {Transition::timed(0, "pump", 1.0)};
    net.arcs = {{0, ArcDirection::PlaceToTransition, 0, 0, 1},
                {1, ArcDirection::TransitionToPlace, 0, 0, 2}};
    REQUIRE(validate_gspn(net).empty());
    try {
        reachability(net, 8);
        FAIL("expected BoundednessError");
    } catch (const BoundednessError& e) {
        std::string what = e.what();
        CHECK(what.find("pool") != std::string::npos);
        CHECK(what.find("8") != std::string::npos);
    }
}
