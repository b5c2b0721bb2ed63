#include "adaptkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "adaptkit/errors.hpp"
#include "adaptkit/text.hpp"

namespace adaptkit {

std::vector<double> Ctmc::dense_row(int i) const {
    std::vector<double> row(states.size(), 0.0);
    for (auto [j, rate] : rows[i]) row[j] = rate;
    row[i] = diagonal[i];
    return row;
}

int StatePartition::failed_count() const {
    return static_cast<int>(std::count(failed.begin(), failed.end(), true));
}

namespace {

constexpr long kIterationCap = 1000000;
constexpr double kUniformizationLimit = 1.0e6;

struct EdgeView {
    int transition;
    int to;
};

// Resolves the tangible probability distribution reached from a vanishing
// marking by following random switches; memoized per marking.
class VanishingResolver {
public:
    VanishingResolver(const MarkingGraph& graph, const std::vector<std::vector<EdgeView>>& out,
                      const std::vector<double>& weight_of)
        : graph_(graph), out_(out), weight_of_(weight_of), memo_(graph.markings.size()),
          on_stack_(graph.markings.size(), false) {}

    const std::map<int, double>& resolve(int marking) {
        if (memo_[marking]) return *memo_[marking];
        if (on_stack_[marking]) {
            std::string cycle;
            for (std::size_t i = 0; i < stack_.size(); ++i) {
                if (stack_[i] != marking && cycle.empty()) continue;
                cycle += "marking " + std::to_string(stack_[i]) + " -> ";
            }
            cycle += "marking " + std::to_string(marking);
            throw AnalysisError("vanishing loop detected: " + cycle);
        }
        on_stack_[marking] = true;
        stack_.push_back(marking);
        double total = 0.0;
        for (const auto& e : out_[marking]) total += weight_of_[e.transition];
        std::map<int, double> result;
        for (const auto& e : out_[marking]) {
            double p = weight_of_[e.transition] / total;
            if (!graph_.vanishing[e.to]) {
                result[e.to] += p;
            } else {
                for (auto [tangible, q] : resolve(e.to)) result[tangible] += p * q;
            }
        }
        stack_.pop_back();
        on_stack_[marking] = false;
        memo_[marking] = std::move(result);
        return *memo_[marking];
    }

private:
    const MarkingGraph& graph_;
    const std::vector<std::vector<EdgeView>>& out_;
    const std::vector<double>& weight_of_;
    std::vector<std::optional<std::map<int, double>>> memo_;
    std::vector<bool> on_stack_;
    std::vector<int> stack_;
};

} // namespace

Ctmc eliminate_vanishing(const MarkingGraph& graph, const Gspn& net) {
    std::vector<double> parameter_of(net.transitions.size(), 0.0);
    for (const auto& t : net.transitions) parameter_of[t.id] = t.parameter;

    std::vector<std::vector<EdgeView>> out(graph.markings.size());
    for (const auto& e : graph.edges) out[e.from].push_back({e.transition, e.to});

    Ctmc ctmc;
    std::vector<int> tangible_index(graph.markings.size(), -1);
    for (std::size_t m = 0; m < graph.markings.size(); ++m) {
        if (graph.vanishing[m]) continue;
        tangible_index[m] = ctmc.size();
        ctmc.states.push_back(static_cast<int>(m));
    }
    if (ctmc.states.empty()) throw AnalysisError("no tangible marking reachable");

    VanishingResolver resolver(graph, out, parameter_of);
    ctmc.rows.resize(ctmc.states.size());
    ctmc.diagonal.resize(ctmc.states.size(), 0.0);
    for (int i = 0; i < ctmc.size(); ++i) {
        std::map<int, double> flow; // tangible marking index -> rate
        for (const auto& e : out[ctmc.states[i]]) {
            double rate = parameter_of[e.transition];
            if (!graph.vanishing[e.to]) {
                flow[e.to] += rate;
            } else {
                for (auto [tangible, p] : resolver.resolve(e.to)) flow[tangible] += rate * p;
            }
        }
        for (auto [marking, rate] : flow) {
            int j = tangible_index[marking];
            if (j == i) continue; // zero-time excursion back to the same state
            ctmc.rows[i].push_back({j, rate});
            ctmc.diagonal[i] -= rate;
        }
    }

    ctmc.initial.assign(ctmc.states.size(), 0.0);
    if (!graph.vanishing[graph.initial]) {
        ctmc.initial[tangible_index[graph.initial]] = 1.0;
    } else {
        for (auto [tangible, p] : resolver.resolve(graph.initial))
            ctmc.initial[tangible_index[tangible]] = p;
    }
    return ctmc;
}

namespace {

// Atom paths in a mapping are relative to the declaring component (the
// root); the trace records absolute paths.
void absolutize_atoms(StateExpr& expr, const std::string& prefix) {
    if (expr.kind == StateExpr::Kind::Atom) {
        expr.component = prefix + "." + expr.component;
        return;
    }
    for (auto& child : expr.children) absolutize_atoms(child, prefix);
}

} // namespace

StatePartition classify(const ArchitectureModel& model, const TraceMap& trace,
                        const MarkingGraph& graph) {
    const StateMapping* failed = model.root.find_mapping("failed");
    if (!failed) throw AnalysisError("classification error: root defines no failed mapping");
    const StateMapping* catastrophic = model.root.find_mapping("catastrophic");

    StateExpr failed_expr = failed->expr;
    absolutize_atoms(failed_expr, model.root.path);
    StateExpr catastrophic_expr;
    if (catastrophic) {
        catastrophic_expr = catastrophic->expr;
        absolutize_atoms(catastrophic_expr, model.root.path);
    }

    std::set<std::string> traced;
    for (const auto& origin : trace.place_origin)
        if (origin.kind == PlaceOrigin::Kind::State) traced.insert(origin.component);
    auto check_atoms = [&](const StateExpr& expr) {
        std::vector<const StateExpr*> atoms;
        expr.collect_atoms(atoms);
        for (const StateExpr* atom : atoms)
            if (!traced.count(atom->component))
                throw AnalysisError("classification error: component " + atom->component +
                                    " has no error model");
    };
    check_atoms(failed_expr);
    if (catastrophic) check_atoms(catastrophic_expr);

    StatePartition partition;
    partition.has_catastrophic = catastrophic != nullptr;
    for (std::size_t m = 0; m < graph.markings.size(); ++m) {
        if (graph.vanishing[m]) continue;
        const Marking& marking = graph.markings[m];
        std::map<std::string, std::string> assignment;
        for (std::size_t p = 0; p < trace.place_origin.size(); ++p) {
            const PlaceOrigin& origin = trace.place_origin[p];
            if (origin.kind != PlaceOrigin::Kind::State || marking[p] == 0) continue;
            assignment[origin.component] = origin.state;
        }
        partition.failed.push_back(evaluate_state_expr(failed_expr, assignment));
        partition.catastrophic.push_back(catastrophic
                                             ? evaluate_state_expr(catastrophic_expr, assignment)
                                             : false);
    }
    return partition;
}

namespace {

double max_exit_rate(const Ctmc& ctmc) {
    double rate = 0.0;
    for (double d : ctmc.diagonal) rate = std::max(rate, -d);
    return rate;
}

// One step of the uniformized chain: next = pi * (I + Q/Lambda).
void uniformized_step(const Ctmc& ctmc, double lambda, const std::vector<double>& pi,
                      std::vector<double>& next) {
    int n = ctmc.size();
    for (int i = 0; i < n; ++i) next[i] = pi[i] * (1.0 + ctmc.diagonal[i] / lambda);
    for (int i = 0; i < n; ++i) {
        if (pi[i] == 0.0) continue;
        for (auto [j, rate] : ctmc.rows[i]) next[j] += pi[i] * rate / lambda;
    }
}

double residual_norm(const Ctmc& ctmc, const std::vector<double>& pi) {
    int n = ctmc.size();
    std::vector<double> flow(n, 0.0);
    for (int i = 0; i < n; ++i) {
        flow[i] += pi[i] * ctmc.diagonal[i];
        for (auto [j, rate] : ctmc.rows[i]) flow[j] += pi[i] * rate;
    }
    double norm = 0.0;
    for (double f : flow) norm = std::max(norm, std::fabs(f));
    return norm;
}

} // namespace

std::vector<double> steady_state(const Ctmc& ctmc, double tol, SolverInfo* info) {
    if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
    int n = ctmc.size();
    if (n == 1) {
        if (info) *info = {0, 0.0};
        return {1.0};
    }
    for (int i = 0; i < n; ++i) {
        if (ctmc.diagonal[i] == 0.0)
            throw AnalysisError(
                "absorbing state present; steady-state availability is undefined, use "
                "reliability or MTTF analysis");
    }

    double lambda = 1.001 * max_exit_rate(ctmc);
    std::vector<double> pi = ctmc.initial;
    std::vector<double> next(n, 0.0);
    // Converge to tol, then polish to the floating-point floor so that the
    // result does not depend on the absolute rate scale.
    double target = std::min(tol / lambda, 1.0e-15);
    double best_delta = std::numeric_limits<double>::infinity();
    long since_improvement = 0;
    long iterations = 0;
    double delta = std::numeric_limits<double>::infinity();
    while (iterations < kIterationCap) {
        uniformized_step(ctmc, lambda, pi, next);
        delta = 0.0;
        for (int i = 0; i < n; ++i) delta = std::max(delta, std::fabs(next[i] - pi[i]));
        pi.swap(next);
        ++iterations;
        if (delta < best_delta) {
            best_delta = delta;
            since_improvement = 0;
        } else if (++since_improvement > 200 && lambda * delta <= tol) {
            break; // rounding floor reached, contract already met
        }
        if (delta <= target) break;
    }
    double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& p : pi) p /= sum;
    double residual = residual_norm(ctmc, pi);
    if (residual > tol)
        throw AnalysisError("steady-state iteration did not converge: residual " +
                            format_double(residual) + " after " + std::to_string(iterations) +
                            " iterations, tolerance " + format_double(tol));
    if (info) *info = {iterations, residual};
    return pi;
}

std::vector<double> transient(const Ctmc& ctmc, double t, double tol, SolverInfo* info) {
    if (t < 0.0) throw ContractError("time must be non-negative");
    if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
    int n = ctmc.size();
    double lambda_raw = max_exit_rate(ctmc);
    if (t == 0.0 || lambda_raw == 0.0) {
        if (info) *info = {0, 0.0};
        return ctmc.initial;
    }
    double lambda = 1.001 * lambda_raw;
    double horizon = lambda * t;
    if (horizon > kUniformizationLimit)
        throw AnalysisError("uniformization horizon too large (Lambda*t = " +
                            format_double(horizon) +
                            "); the distribution is effectively stationary, use steady-state "
                            "analysis");

    // Poisson(horizon) weights in log space around the mode; the window is
    // normalized, so far tails cost accuracy tol at most.
    long mode = static_cast<long>(horizon);
    auto log_weight = [&](long k) {
        return -horizon + static_cast<double>(k) * std::log(horizon) - std::lgamma(k + 1.0);
    };
    double log_mode = log_weight(mode);
    double cutoff = std::log(tol) - std::log(1.0e6); // relative window cutoff
    long lo = mode;
    while (lo > 0 && log_weight(lo - 1) - log_mode > cutoff) --lo;
    long hi = mode;
    while (log_weight(hi + 1) - log_mode > cutoff) ++hi;
    std::vector<double> weights(hi - lo + 1);
    double total = 0.0;
    for (long k = lo; k <= hi; ++k) {
        weights[k - lo] = std::exp(log_weight(k) - log_mode);
        total += weights[k - lo];
    }
    for (double& w : weights) w /= total;

    std::vector<double> v = ctmc.initial;
    std::vector<double> next(n, 0.0);
    std::vector<double> result(n, 0.0);
    for (long k = 0; k <= hi; ++k) {
        if (k >= lo) {
            double w = weights[k - lo];
            for (int i = 0; i < n; ++i) result[i] += w * v[i];
        }
        if (k < hi) {
            uniformized_step(ctmc, lambda, v, next);
            v.swap(next);
        }
    }
    double sum = std::accumulate(result.begin(), result.end(), 0.0);
    for (double& p : result) p /= sum;
    if (info) *info = {hi, 1.0 - total * std::exp(log_mode)};
    return result;
}

namespace {

// Solves A*x = b in place by Gaussian elimination with partial pivoting.
// Returns false when a pivot is negligibly small (singular system).
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    int n = static_cast<int>(a.size());
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return false;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
        if (std::fabs(a[pivot][col]) <= scale * 1.0e-14) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < n; ++row) {
            double factor = a[row][col] / a[col][col];
            if (factor == 0.0) continue;
            for (int k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double sum = b[row];
        for (int k = row + 1; k < n; ++k) sum -= a[row][k] * b[k];
        b[row] = sum / a[row][row];
    }
    return true;
}

Ctmc make_failed_absorbing(const Ctmc& ctmc, const StatePartition& partition) {
    Ctmc absorbing = ctmc;
    for (int i = 0; i < ctmc.size(); ++i) {
        if (!partition.failed[i]) continue;
        absorbing.rows[i].clear();
        absorbing.diagonal[i] = 0.0;
    }
    return absorbing;
}

} // namespace

MeasureReport compute_measures(const Ctmc& ctmc, const StatePartition& partition,
                               const std::vector<double>& times, double tol) {
    int n = ctmc.size();
    if (static_cast<int>(partition.failed.size()) != n)
        throw ContractError("partition does not cover every CTMC state");
    MeasureReport report;

    double initial_failed_mass = 0.0;
    for (int i = 0; i < n; ++i)
        if (partition.failed[i]) initial_failed_mass += ctmc.initial[i];
    if (initial_failed_mass > 0.0)
        throw AnalysisError(
            "initial distribution puts mass on a failed state; reliability analysis requires an "
            "operational initial state");

    bool has_absorbing = false;
    for (int i = 0; i < n && n > 1; ++i)
        if (ctmc.diagonal[i] == 0.0) has_absorbing = true;
    if (!has_absorbing) {
        SolverInfo info;
        std::vector<double> pi = steady_state(ctmc, tol, &info);
        double up = 0.0;
        for (int i = 0; i < n; ++i)
            if (!partition.failed[i]) up += pi[i];
        report.steady_availability = up;
        report.solver = info;
    }

    Ctmc absorbing = make_failed_absorbing(ctmc, partition);
    for (double t : times) {
        SolverInfo info;
        std::vector<double> pi = transient(absorbing, t, tol, &info);
        double up = 0.0;
        for (int i = 0; i < n; ++i)
            if (!partition.failed[i]) up += pi[i];
        report.reliability_curve.push_back({t, up});
        if (!report.steady_availability && info.iterations > report.solver.iterations)
            report.solver = info;
    }

    // MTTF: mean absorption time from the up states.
    std::vector<int> up_states;
    for (int i = 0; i < n; ++i)
        if (!partition.failed[i]) up_states.push_back(i);
    if (partition.failed_count() == 0) {
        report.mttf_infinite = true;
        return report;
    }
    int m = static_cast<int>(up_states.size());
    std::vector<int> up_index(n, -1);
    for (int k = 0; k < m; ++k) up_index[up_states[k]] = k;
    std::vector<std::vector<double>> q(m, std::vector<double>(m, 0.0));
    for (int k = 0; k < m; ++k) {
        int i = up_states[k];
        q[k][k] = ctmc.diagonal[i];
        for (auto [j, rate] : ctmc.rows[i])
            if (up_index[j] >= 0) q[k][up_index[j]] += rate;
    }
    std::vector<double> rhs(m, -1.0);
    if (!solve_dense(q, rhs)) {
        report.mttf_infinite = true;
        return report;
    }
    double mttf = 0.0;
    for (int k = 0; k < m; ++k) mttf += ctmc.initial[up_states[k]] * rhs[k];
    if (!std::isfinite(mttf) || mttf < 0.0) {
        report.mttf_infinite = true;
        return report;
    }
    report.mttf = mttf;
    return report;
}

} // namespace adaptkit
