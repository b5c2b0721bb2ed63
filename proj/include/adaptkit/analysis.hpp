#ifndef ADAPTKIT_ANALYSIS_HPP
#define ADAPTKIT_ANALYSIS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "adaptkit/gspn.hpp"
#include "adaptkit/model.hpp"
#include "adaptkit/transform.hpp"

namespace adaptkit {

/// Continuous-time Markov chain over the tangible markings of a marking
/// graph. State k corresponds to graph marking index states[k]; states are
/// listed in ascending marking index order.
struct Ctmc {
    std::vector<int> states;
    std::vector<std::vector<std::pair<int, double>>> rows; // off-diagonal (column, rate)
    std::vector<double> diagonal;                          // negative row sum
    std::vector<double> initial;                           // sums to 1

    int size() const { return static_cast<int>(states.size()); }

    /// Dense row i of the generator, diagonal included.
    std::vector<double> dense_row(int i) const;
};

/// Collapses vanishing markings into probabilistic switches: each vanishing
/// marking distributes over its immediate successors with probability
/// weight/sum(weights), chains are folded by multiplication, and timed rates
/// into vanishing markings are redistributed onto the tangible targets.
/// An initial vanishing marking contributes its resolved distribution as the
/// CTMC's initial distribution. Throws AnalysisError on a cycle of vanishing
/// markings ("vanishing loop detected").
Ctmc eliminate_vanishing(const MarkingGraph& graph, const Gspn& net);

/// Labels of the tangible markings, aligned with Ctmc::states (ascending
/// marking index). A state is `up` exactly when it is not failed.
struct StatePartition {
    std::vector<bool> failed;
    std::vector<bool> catastrophic;
    bool has_catastrophic = false; // whether a catastrophic mapping exists

    int failed_count() const;
};

/// Evaluates the root component's `failed` (and, when present,
/// `catastrophic`) state mapping against every tangible marking. An atom
/// Path[State] is true when the place traced to that component and state
/// holds a token. Throws AnalysisError when an atom cannot be resolved
/// against the trace.
StatePartition classify(const ArchitectureModel& model, const TraceMap& trace,
                        const MarkingGraph& graph);

struct SolverInfo {
    long iterations = 0;
    double residual = 0.0;
};

/// Stationary distribution via power iteration on the uniformized chain
/// P = I + Q/Lambda with Lambda = 1.001 * max|Q_ii|. Converges until the
/// residual norm of pi*Q drops below tol, then polishes toward the floating
/// point fixed point so results are reproducible across rate scalings.
/// Throws AnalysisError when absorbing states are present (use reliability
/// or MTTF instead) or the iteration cap is hit before reaching tol.
std::vector<double> steady_state(const Ctmc& ctmc, double tol, SolverInfo* info = nullptr);

/// Transient distribution at time t (hours) by uniformization, with the
/// Poisson weights computed in log space around the mode so large Lambda*t
/// horizons do not underflow. Throws AnalysisError when Lambda*t exceeds
/// 10^6 (steady-state analysis is the right tool there).
std::vector<double> transient(const Ctmc& ctmc, double t, double tol, SolverInfo* info = nullptr);

struct MeasureReport {
    std::optional<double> steady_availability; // absent when absorbing states exist
    std::vector<std::pair<double, double>> reliability_curve; // (t hours, R(t))
    std::optional<double> mttf; // hours; absent when infinite
    bool mttf_infinite = false;
    SolverInfo solver;
};

/// Availability, reliability, and MTTF of a classified chain.
/// Steady availability sums the stationary probability of up states and is
/// omitted when the chain has absorbing states. Reliability makes every
/// failed state absorbing and evaluates R(t) = P(no failure by t) on the
/// given grid. MTTF solves Q_uu * m = -1 on the up states by Gaussian
/// elimination and reports the initial-distribution average; a singular
/// system or an empty failed set yields an infinite MTTF. Throws
/// AnalysisError when the initial distribution puts mass on a failed state.
MeasureReport compute_measures(const Ctmc& ctmc, const StatePartition& partition,
                               const std::vector<double>& times, double tol);

} // namespace adaptkit

#endif
