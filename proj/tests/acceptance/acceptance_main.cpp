// Acceptance gate: one pass/fail line per criterion, non-zero exit on any
// failure. Each criterion throws std::runtime_error with the reason.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptkit/analysis.hpp"
#include "adaptkit/cli.hpp"
#include "adaptkit/emit.hpp"
#include "adaptkit/transform.hpp"
#include "test_support.hpp"

using namespace adaptkit;
using namespace adaptkit::testing;

namespace {

void require(bool condition, const std::string& reason) {
    if (!condition) throw std::runtime_error(reason);
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

void require_close(double actual, double expected, double tolerance, bool relative,
                   const std::string& label) {
    double err = std::fabs(actual - expected);
    if (relative) err /= std::fabs(expected);
    require(err <= tolerance, label + ": got " + fmt(actual) + ", expected " + fmt(expected) +
                                  (relative ? " (relative" : " (absolute") + " error " + fmt(err) +
                                  " > " + fmt(tolerance) + ")");
}

struct Pipeline {
    ArchitectureModel model;
    TransformResult transformed;
    MarkingGraph graph;
    Ctmc ctmc;
    StatePartition partition;
};

Pipeline run_pipeline(const std::string& fixture) {
    Pipeline p;
    p.model = parse_fixture(fixture);
    p.transformed = transform(p.model);
    p.graph = reachability(p.transformed.net, 8);
    p.ctmc = eliminate_vanishing(p.graph, p.transformed.net);
    p.partition = classify(p.model, p.transformed.trace, p.graph);
    return p;
}

struct CliRun {
    int exit_code;
    std::string out;
    std::string err;
};

CliRun run_cli_args(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("adaptkit");
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// --- criterion 1: analytic two-state oracle ---------------------------------

void criterion_single_component() {
    auto start = std::chrono::steady_clock::now();

    Pipeline repairable = run_pipeline("l1.adm");
    MeasureReport full =
        compute_measures(repairable.ctmc, repairable.partition, {1000.0}, 1.0e-10);
    require(full.steady_availability.has_value(), "steady availability missing");
    require_close(*full.steady_availability, 0.1 / 0.101, 1.0e-9, true, "steady availability");

    Pipeline absorbing = run_pipeline("l1_norepair.adm");
    MeasureReport no_repair =
        compute_measures(absorbing.ctmc, absorbing.partition, {1000.0}, 1.0e-10);
    require(no_repair.mttf.has_value(), "MTTF missing");
    require_close(*no_repair.mttf, 1000.0, 1.0e-9, true, "MTTF");
    require(no_repair.reliability_curve.size() == 1, "reliability grid size");
    require_close(no_repair.reliability_curve[0].second, std::exp(-1.0), 1.0e-6, false,
                  "R(1000)");

    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    require(elapsed.count() < 1.0,
            "runtime " + fmt(elapsed.count()) + " s exceeds the 1 s budget");
}

// --- criterion 2: shared repairman vs birth-death closed form ---------------

void criterion_shared_repairman() {
    Pipeline p = run_pipeline("repairman.adm");

    // Brute-force enumeration of the lumped process gives 5 tangible states:
    // both machines up; one down (x2, by which machine); both down (x2, by
    // repair order).
    require(p.graph.tangible_count() == 5,
            "tangible count " + std::to_string(p.graph.tangible_count()) + ", expected 5");

    std::vector<double> pi = steady_state(p.ctmc, 1.0e-10);

    // Aggregate by the number of machines away from Ok. With lambda = 1e-2,
    // mu = 1e-1 and one repairman the birth-death solution is
    // pi_k proportional to (1, 2*lambda/mu, 2*lambda^2/mu^2) = (1, 0.2, 0.02).
    std::map<std::string, std::map<std::string, int>> state_place; // component -> state -> id
    for (const auto& place : p.transformed.net.places) {
        const PlaceOrigin& origin = p.transformed.trace.place_origin[place.id];
        if (origin.kind == PlaceOrigin::Kind::State)
            state_place[origin.component][origin.state] = place.id;
    }
    double aggregated[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < p.ctmc.size(); ++k) {
        const Marking& marking = p.graph.markings[p.ctmc.states[k]];
        int down = 0;
        for (const char* machine : {"Top.MA", "Top.MB"})
            if (marking[state_place.at(machine).at("Ok")] == 0) ++down;
        aggregated[down] += pi[k];
    }
    const double expected[3] = {1.0 / 1.22, 0.2 / 1.22, 0.02 / 1.22};
    for (int k = 0; k < 3; ++k)
        require_close(aggregated[k], expected[k], 1.0e-8, false,
                      "pi(" + std::to_string(k) + " down)");
}

// --- criterion 3: propagation over a binding, end to end --------------------

void criterion_dependency_propagation() {
    Pipeline p = run_pipeline("cpu_thread.adm");
    MeasureReport report =
        compute_measures(p.ctmc, p.partition, {100.0, 1000.0}, 1.0e-10);
    require(report.reliability_curve.size() == 2, "reliability grid size");
    for (auto [t, r] : report.reliability_curve)
        require_close(r, std::exp(-1.0e-3 * t), 1.0e-6, false, "R(" + fmt(t) + ")");
}

// --- criterion 4: structural invariants over random models ------------------

void criterion_structural_invariants() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(20260819);
    const int kModels = 220;
    for (int i = 0; i < kModels; ++i) {
        GeneratedModel generated = random_model(rng);
        std::string context = "model " + std::to_string(i);
        ArchitectureModel model = [&] {
            try {
                return parse_text(generated.text);
            } catch (const std::exception& e) {
                throw std::runtime_error(context + " rejected: " + e.what());
            }
        }();
        TransformResult result = transform(model);
        auto problems = validate_gspn(result.net);
        require(problems.empty(), context + ": " + (problems.empty() ? "" : problems[0].message));
        require(static_cast<int>(result.net.places.size()) == generated.expected_places,
                context + ": place count " + std::to_string(result.net.places.size()) +
                    " != " + std::to_string(generated.expected_places));
        require(static_cast<int>(result.net.transitions.size()) == generated.expected_transitions,
                context + ": transition count " + std::to_string(result.net.transitions.size()) +
                    " != " + std::to_string(generated.expected_transitions));

        MarkingGraph graph = reachability(result.net, 8);
        std::map<std::string, std::vector<int>> component_places;
        std::vector<int> pending_places;
        for (const auto& place : result.net.places) {
            const PlaceOrigin& origin = result.trace.place_origin[place.id];
            if (origin.kind == PlaceOrigin::Kind::State)
                component_places[origin.component].push_back(place.id);
            else
                pending_places.push_back(place.id);
        }
        for (std::size_t m = 0; m < graph.markings.size(); ++m) {
            for (const auto& [component, ids] : component_places) {
                int tokens = 0;
                for (int id : ids) tokens += graph.markings[m][id];
                require(tokens == 1, context + ": component " + component + " holds " +
                                         std::to_string(tokens) + " tokens in marking " +
                                         std::to_string(m));
            }
            if (!graph.vanishing[m])
                for (int id : pending_places)
                    require(graph.markings[m][id] == 0,
                            context + ": pending tokens in tangible marking " +
                                std::to_string(m));
        }
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    require(elapsed.count() < 60.0,
            "runtime " + fmt(elapsed.count()) + " s exceeds the 60 s budget");
}

// --- criterion 5: numerical properties ---------------------------------------

void criterion_numerical_properties() {
    Pipeline base = run_pipeline("l1.adm");

    // The same model with every rate multiplied by ten.
    ArchitectureModel scaled_model = parse_text(R"(
error model TwoState {
  states { ErrorFree : initial; Failed; }
  events { Fault occurrence poisson 1.0e-2; Repair occurrence poisson 1.0; }
  propagations { }
  transitions { ErrorFree -[Fault]-> Failed; Failed -[Repair]-> ErrorFree; }
}
processor CpuT { annex error_model { use TwoState; } }
system Top {
  sub CPU : CpuT;
  state_mapping failed => CPU[Failed];
}
root Top;
)");
    TransformResult scaled_transformed = transform(scaled_model);
    MarkingGraph scaled_graph = reachability(scaled_transformed.net, 8);
    Ctmc scaled_ctmc = eliminate_vanishing(scaled_graph, scaled_transformed.net);
    StatePartition scaled_partition =
        classify(scaled_model, scaled_transformed.trace, scaled_graph);

    std::vector<double> pi = steady_state(base.ctmc, 1.0e-10);
    std::vector<double> pi_scaled = steady_state(scaled_ctmc, 1.0e-10);
    require(pi.size() == pi_scaled.size(), "state space changed under scaling");
    for (std::size_t i = 0; i < pi.size(); ++i)
        require(std::fabs(pi[i] - pi_scaled[i]) <= 1.0e-12,
                "steady state drifted under rate scaling: component " + std::to_string(i) +
                    " moved by " + fmt(std::fabs(pi[i] - pi_scaled[i])));

    const std::vector<double> grid = {100.0, 1000.0, 10000.0, 100000.0};
    MeasureReport base_report = compute_measures(base.ctmc, base.partition, grid, 1.0e-10);
    MeasureReport scaled_report =
        compute_measures(scaled_ctmc, scaled_partition, grid, 1.0e-10);
    require(base_report.mttf.has_value() && scaled_report.mttf.has_value(), "MTTF missing");
    require_close(*scaled_report.mttf / *base_report.mttf, 0.1, 1.0e-9, true,
                  "MTTF scaling factor");

    // Distributions are distributions.
    auto check_sum = [](const std::vector<double>& d, const std::string& label) {
        double sum = 0.0;
        for (double v : d) sum += v;
        require_close(sum, 1.0, 1.0e-9, false, label + " mass");
    };
    check_sum(pi, "stationary distribution");
    check_sum(pi_scaled, "scaled stationary distribution");
    for (double t : grid) {
        check_sum(transient(base.ctmc, t, 1.0e-10), "transient(" + fmt(t) + ")");
        check_sum(transient(scaled_ctmc, t, 1.0e-10), "scaled transient(" + fmt(t) + ")");
    }

    // Reliability is non-increasing on the default grid.
    for (std::size_t i = 1; i < base_report.reliability_curve.size(); ++i)
        require(base_report.reliability_curve[i].second <=
                    base_report.reliability_curve[i - 1].second + 1.0e-12,
                "reliability increased between grid points " + std::to_string(i - 1) + " and " +
                    std::to_string(i));
}

// --- criterion 6: determinism and formats ------------------------------------

void criterion_determinism_and_formats() {
    // Library level: two independent transforms emit byte-identical text.
    TransformResult first = transform(parse_fixture("repairman.adm"));
    TransformResult second = transform(parse_fixture("repairman.adm"));
    require(emit_pnml(first.net) == emit_pnml(second.net), "PNML differs across runs");
    require(emit_generic_xml(first.net, first.trace) ==
                emit_generic_xml(second.net, second.trace),
            "generic XML differs across runs");
    require(emit_dot(first.net) == emit_dot(second.net), "dot differs across runs");

    // PNML passes the internal structural re-check (emitting already
    // re-validates; an empty diagnostics list keeps that meaningful).
    require(validate_gspn(first.net).empty(), "net fails its structural re-check");

    // Generic XML round-trips through the test reader.
    for (const char* name : {"l1.adm", "duplex.adm", "repairman.adm"}) {
        TransformResult result = transform(parse_fixture(name));
        Gspn back = read_generic_xml(emit_generic_xml(result.net, result.trace));
        require(back == result.net, std::string(name) + " does not round-trip");
    }

    // CLI level: transform twice and analyze twice, byte-identical.
    auto dir = std::filesystem::temp_directory_path() / "adaptkit-acceptance";
    std::filesystem::create_directories(dir);
    auto a = (dir / "a.pnml").string();
    auto b = (dir / "b.pnml").string();
    require(run_cli_args({"transform", fixture_path("repairman.adm"), "--pnml", a}).exit_code ==
                0,
            "transform run 1 failed");
    require(run_cli_args({"transform", fixture_path("repairman.adm"), "--pnml", b}).exit_code ==
                0,
            "transform run 2 failed");
    require(slurp(a) == slurp(b), "CLI transform output differs across runs");

    CliRun analyze1 = run_cli_args({"analyze", fixture_path("repairman.adm")});
    CliRun analyze2 = run_cli_args({"analyze", fixture_path("repairman.adm")});
    require(analyze1.exit_code == 0 && analyze2.exit_code == 0, "analyze failed");
    require(analyze1.out == analyze2.out, "CLI analyze output differs across runs");
    std::filesystem::remove_all(dir);
}

// --- criterion 7: diagnostics corpus -----------------------------------------

void criterion_diagnostics() {
    struct Entry {
        const char* file;
        const char* message;
    };
    const Entry corpus[] = {
        {"bad_lexical.adm", "lexical error: unexpected character '@'"},
        {"bad_real.adm", "lexical error: malformed real literal"},
        {"bad_toplevel.adm", "syntax error: expected component declaration"},
        {"bad_noroot.adm", "syntax error: expected root declaration"},
        {"bad_expr_truncated.adm", "syntax error: expected component path in state expression"},
        {"bad_unresolved_state.adm", "unresolved reference: state Gone"},
        {"bad_unresolved_event.adm", "unresolved reference: event Whoops"},
        {"bad_unresolved_prop.adm", "unresolved reference: propagation Ghost"},
        {"bad_unresolved_comp_type.adm", "unresolved reference: component type Missing"},
        {"bad_unresolved_error_model.adm", "unresolved reference: error model Phantom"},
        {"bad_override_unknown.adm", "unresolved reference: event or propagation Ghost"},
        {"bad_guard_feature.adm", "unresolved reference: feature ghost"},
        {"bad_connect_feature.adm", "unresolved reference: feature nope of Top.A"},
        {"bad_recursive.adm", "invalid declaration: recursive component type Loop"},
        {"bad_duplicate_state.adm", "duplicate declaration: state Ok in error model M"},
        {"bad_duplicate_feature.adm", "duplicate declaration: feature p in D"},
        {"bad_duplicate_root.adm", "duplicate declaration: root"},
        {"bad_root_category.adm", "category mismatch: root component Top must be a system"},
        {"bad_binding_category.adm",
         "category mismatch: binding application Top.A must be a process or thread"},
        {"bad_access_category.adm", "category mismatch: bus access target Top.B must be a bus"},
        {"bad_missing_failed.adm",
         "missing failed mapping: root system Top must define state mapping label failed"},
        {"bad_occurrence_rate.adm", "invalid occurrence:"},
        {"bad_occurrence_prob.adm", "invalid occurrence:"},
        {"bad_occurrence_in_prop.adm", "invalid occurrence:"},
        {"bad_two_initials.adm",
         "invalid error model: M must declare exactly one initial state (found 2)"},
        {"bad_prop_direction.adm",
         "direction mismatch: propagation P is declared out but used as an in trigger"},
        {"bad_connect_direction.adm", "direction mismatch: connection Top.A.p -> Top.B.q"},
        {"bad_guard_raise.adm",
         "direction mismatch: guard_in raises propagation Q which is not declared in"},
        {"bad_mapping_state.adm",
         "invalid state mapping: state Broken not declared in error model of A"},
        {"bad_mapping_no_em.adm", "invalid state mapping: component A has no error model"},
    };
    int covered = 0;
    for (const Entry& entry : corpus) {
        CliRun r = run_cli_args({"check", fixture_path(std::string("bad/") + entry.file)});
        require(r.exit_code == 1, std::string(entry.file) + ": exit code " +
                                      std::to_string(r.exit_code) + ", expected 1");
        std::string first_line = r.err.substr(0, r.err.find('\n'));
        require(first_line.find(entry.message) != std::string::npos,
                std::string(entry.file) + ": first diagnostic \"" + first_line +
                    "\" does not carry \"" + entry.message + "\"");
        ++covered;
    }
    require(covered >= 15, "corpus too small");
}

} // namespace

int main() {
    struct Criterion {
        const char* title;
        std::function<void()> body;
    };
    const Criterion criteria[] = {
        {"single-component oracle (availability, MTTF, reliability)",
         criterion_single_component},
        {"shared repairman matches the birth-death closed form", criterion_shared_repairman},
        {"propagation over a binding drives the receiver", criterion_dependency_propagation},
        {"structural invariants over 220 random models", criterion_structural_invariants},
        {"numerical properties (scaling, mass, monotonicity)",
         criterion_numerical_properties},
        {"deterministic output and format round-trips", criterion_determinism_and_formats},
        {"diagnostics corpus produces the documented messages", criterion_diagnostics},
    };

    int failures = 0;
    int number = 1;
    for (const auto& criterion : criteria) {
        try {
            criterion.body();
            std::cout << "[PASS] criterion " << number << ": " << criterion.title << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << number << ": " << criterion.title << " - "
                      << e.what() << "\n";
        }
        ++number;
    }
    if (failures > 0) {
        std::cout << failures << " of 7 criteria failed\n";
        return 1;
    }
    std::cout << "all 7 criteria passed\n";
    return 0;
}
