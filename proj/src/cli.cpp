#include "adaptkit/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "adaptkit/analysis.hpp"
#include "adaptkit/dependency.hpp"
#include "adaptkit/emit.hpp"
#include "adaptkit/errors.hpp"
#include "adaptkit/parser.hpp"
#include "adaptkit/text.hpp"
#include "adaptkit/transform.hpp"

namespace adaptkit {

namespace {

constexpr const char* kVersion = "adaptkit 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct Options {
    bool quiet = false;
    std::string model_file;
    std::string pnml_file;
    std::string xml_file;
    std::string dot_file;
    std::string report_file;
    std::vector<double> times = {100.0, 1000.0, 10000.0, 100000.0};
    double tol = 1.0e-10;
    int bound = 8;
};

void print_diagnostics(const std::vector<Diagnostic>& diagnostics, const Options& options,
                       std::ostream& err) {
    for (const auto& d : diagnostics) {
        if (options.quiet && d.severity != Severity::Error) continue;
        err << format_diagnostic(d) << "\n";
    }
}

// All output files of a command are staged in memory and written together:
// a command that fails leaves no file behind.
class OutputStage {
public:
    void stage(std::string path, std::string content) {
        files_.push_back({std::move(path), std::move(content)});
    }

    void commit() {
        std::vector<std::string> staged;
        for (const auto& [path, content] : files_) {
            std::string temp = path + ".tmp";
            std::ofstream stream(temp, std::ios::binary | std::ios::trunc);
            stream << content;
            stream.flush();
            if (!stream) {
                for (const auto& t : staged) std::remove(t.c_str());
                std::remove(temp.c_str());
                throw EmitError("cannot write " + temp);
            }
            staged.push_back(temp);
        }
        for (const auto& [path, content] : files_) {
            std::string temp = path + ".tmp";
            if (std::rename(temp.c_str(), path.c_str()) != 0) {
                std::remove(temp.c_str());
                throw EmitError("cannot rename " + temp + " to " + path);
            }
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) return std::nullopt;
    std::ostringstream content;
    content << stream.rdbuf();
    return std::move(content).str();
}

// Parse + validate; on failure prints diagnostics, sets the exit code and
// returns absent. An unreadable file is a usage error, not a model error.
std::optional<ArchitectureModel> load_model(const Options& options, std::ostream& err,
                                            int& exit_code,
                                            std::vector<Diagnostic>* warnings = nullptr) {
    exit_code = kExitDiagnostics;
    auto text = read_file(options.model_file);
    if (!text) {
        err << "error: cannot open " << options.model_file << "\n";
        exit_code = kExitUsage;
        return std::nullopt;
    }
    ParseResult parsed = parse_model(*text, options.model_file);
    if (!parsed.ok()) {
        print_diagnostics(parsed.diagnostics, options, err);
        return std::nullopt;
    }
    std::vector<Diagnostic> diagnostics = validate_architecture(*parsed.model);
    if (has_errors(diagnostics)) {
        print_diagnostics(diagnostics, options, err);
        return std::nullopt;
    }
    if (warnings)
        warnings->insert(warnings->end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    if (warnings) warnings->insert(warnings->end(), diagnostics.begin(), diagnostics.end());
    return std::move(parsed.model);
}

// Model-level pitfalls that are legal but almost certainly unintended.
std::vector<Diagnostic> lint_model(const ArchitectureModel& model) {
    std::vector<Diagnostic> warnings;
    for (auto [component, propagation] : unmatched_out_propagations(model)) {
        const ComponentInstance* c = model.find_component(component);
        warnings.push_back(make_warning("unmatched propagation: out propagation " + propagation +
                                            " of " + model.display_path(component) +
                                            " reaches no receiver",
                                        c ? c->span : SourceSpan{}));
    }
    model.for_each_component([&](const ComponentInstance& c) {
        auto emi = resolve_error_model(c, model);
        if (!emi) return;
        for (const auto& t : emi->transitions) {
            if (t.trigger_kind == TriggerKind::InPropagation) continue;
            const Occurrence& occurrence = emi->occurrence_of(t.trigger);
            if (occurrence.kind != Occurrence::Kind::Fixed || occurrence.value >= 1.0) continue;
            bool has_sibling = false;
            for (const auto& other : emi->transitions) {
                if (&other == &t || other.source != t.source) continue;
                if (other.trigger_kind == TriggerKind::InPropagation) continue;
                if (emi->occurrence_of(other.trigger).kind == Occurrence::Kind::Fixed)
                    has_sibling = true;
            }
            if (!has_sibling)
                warnings.push_back(make_warning(
                    "ineffective probability: " + occurrence_display(occurrence) + " on " +
                        trigger_display(t) + " of " + model.display_path(c.path) +
                        " fires with probability 1; no conflicting immediate transition leaves "
                        "state " +
                        t.source,
                    t.span));
        }
    });
    return warnings;
}

int run_check(const Options& options, std::ostream& out, std::ostream& err) {
    std::vector<Diagnostic> warnings;
    int exit_code = kExitDiagnostics;
    auto model = load_model(options, err, exit_code, &warnings);
    if (!model) return exit_code;
    auto lint = lint_model(*model);
    warnings.insert(warnings.end(), lint.begin(), lint.end());
    print_diagnostics(warnings, options, err);
    if (!options.quiet)
        out << options.model_file << ": ok" << (warnings.empty() ? "" : " (with warnings)")
            << "\n";
    return kExitOk;
}

int run_transform(const Options& options, std::ostream& out, std::ostream& err) {
    int exit_code = kExitDiagnostics;
    auto model = load_model(options, err, exit_code);
    if (!model) return exit_code;
    TransformResult result = transform(*model);
    print_diagnostics(result.warnings, options, err);

    OutputStage stage;
    stage.stage(options.pnml_file, emit_pnml(result.net));
    if (!options.xml_file.empty())
        stage.stage(options.xml_file, emit_generic_xml(result.net, result.trace));
    if (!options.dot_file.empty()) stage.stage(options.dot_file, emit_dot(result.net));
    stage.commit();
    if (!options.quiet)
        out << options.model_file << ": " << result.net.places.size() << " places, "
            << result.net.transitions.size() << " transitions, " << result.net.arcs.size()
            << " arcs\n";
    return kExitOk;
}

std::string render_report(const Options& options, const TransformResult& transformed,
                          const MarkingGraph& graph, const MeasureReport& report) {
    std::string text;
    text += "# adaptkit analysis report\n";
    text += "# model: " + options.model_file + "\n";
    text += "places = " + std::to_string(transformed.net.places.size()) + "\n";
    text += "transitions = " + std::to_string(transformed.net.transitions.size()) + "\n";
    text += "markings = " + std::to_string(graph.markings.size()) + "\n";
    text += "tangible = " + std::to_string(graph.tangible_count()) + "\n";
    text += "vanishing = " + std::to_string(graph.vanishing_count()) + "\n";
    if (report.steady_availability)
        text += "steady_availability = " + format_double(*report.steady_availability) + "\n";
    else
        text += "# steady-state availability undefined: chain has absorbing states\n";
    for (auto [t, r] : report.reliability_curve)
        text += "reliability(" + format_double(t) + ") = " + format_double(r) + "\n";
    if (report.mttf_infinite)
        text += "mttf = infinite\n";
    else if (report.mttf)
        text += "mttf = " + format_double(*report.mttf) + "\n";
    text += "solver_iterations = " + std::to_string(report.solver.iterations) + "\n";
    text += "solver_residual = " + format_double(report.solver.residual) + "\n";
    return text;
}

int run_analyze(const Options& options, std::ostream& out, std::ostream& err) {
    int exit_code = kExitDiagnostics;
    auto model = load_model(options, err, exit_code);
    if (!model) return exit_code;
    TransformResult transformed = transform(*model);
    print_diagnostics(transformed.warnings, options, err);

    MarkingGraph graph = reachability(transformed.net, options.bound);
    Ctmc ctmc = eliminate_vanishing(graph, transformed.net);
    StatePartition partition = classify(*model, transformed.trace, graph);
    MeasureReport report = compute_measures(ctmc, partition, options.times, options.tol);

    std::string text = render_report(options, transformed, graph, report);
    if (!options.report_file.empty()) {
        OutputStage stage;
        stage.stage(options.report_file, text);
        stage.commit();
    }
    if (!options.quiet) out << text;
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options options;
    CLI::App app{"architecture dependability models to GSPN and CTMC measures"};
    app.set_version_flag("--version", kVersion);
    app.add_flag("--quiet", options.quiet, "suppress informational output");
    app.require_subcommand(1);

    CLI::App* check = app.add_subcommand("check", "parse, validate and lint a model");
    check->fallthrough();
    check->add_option("model", options.model_file, "model file (.adm)")->required();

    CLI::App* transform_cmd =
        app.add_subcommand("transform", "transform a model into a stochastic Petri net");
    transform_cmd->fallthrough();
    transform_cmd->add_option("model", options.model_file, "model file (.adm)")->required();
    transform_cmd->add_option("--pnml", options.pnml_file, "PNML output file")->required();
    transform_cmd->add_option("--xml", options.xml_file, "generic XML output file");
    transform_cmd->add_option("--dot", options.dot_file, "graph description output file");

    CLI::App* analyze =
        app.add_subcommand("analyze", "compute availability, reliability and MTTF");
    analyze->fallthrough();
    analyze->add_option("model", options.model_file, "model file (.adm)")->required();
    analyze->add_option("--times", options.times, "reliability evaluation times in hours")
        ->delimiter(',');
    analyze->add_option("--tol", options.tol, "solver tolerance");
    analyze->add_option("--bound", options.bound, "token bound per place")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--report", options.report_file, "structured report output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (check->parsed()) return run_check(options, out, err);
        if (transform_cmd->parsed()) return run_transform(options, out, err);
        return run_analyze(options, out, err);
    } catch (const BoundednessError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const AnalysisError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const TransformError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const EmitError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const ContractError& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace adaptkit
