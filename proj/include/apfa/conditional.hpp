/* conditional.hpp -- covariate-conditional models.
 *
 * One shared topology, with edge probabilities allowed to depend on a
 * covariate: per-group relative frequencies for a categorical covariate,
 * per-state logistic regressions on a continuous one. Local LRTs and the
 * selection sweep carry over by summing within-group quantities.
 */

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "apfa/inference.hpp"
#include "apfa/selection.hpp"

namespace apfa {

// ---------------------------------------------------------------------------
// Categorical covariate

struct GroupedCounts {
    CountedApfa pooled;
    std::vector<int> group_codes;  // sorted distinct covariate codes
    std::vector<std::vector<Count>> edge_counts;  // [group][edge]
    std::vector<std::vector<Count>> node_counts;  // [group][state]

    int groups() const { return static_cast<int>(group_codes.size()); }
    /// Node-symbol table of `group` restricted to covariate group g.
    Eigen::MatrixXd group_table(std::span<const StateId> group, int g) const;
};

/// Routes every row into its covariate group. Requires a categorical
/// covariate whose pooled counts reproduce c's; throws DataError otherwise.
GroupedCounts fit_grouped(const CountedApfa& c, const Dataset& d);

/// Within-group MLE pi(e|z) = n(e|z)/n(v|z); nullopt when the group never
/// reaches the edge's source.
std::optional<double> group_edge_prob(const GroupedCounts& g, int group_index, EdgeId e);

/// Conditional log-likelihood: sum over groups of the within-group count
/// likelihoods.
double grouped_log_lik(const GroupedCounts& g);

/// Sum over covariate groups of the within-group independence G^2 for the
/// state group's node-symbol table; dfs summed likewise.
G2Result conditional_local_lrt(const GroupedCounts& g, std::span<const StateId> group);

/// Conditional analogue of merge_test: parts indexed by (cascade group,
/// covariate code).
TestResult conditional_merge_test(const GroupedCounts& g, std::span<const StateId> seed);

// ---------------------------------------------------------------------------
// Continuous covariate (binary alphabets only)

/// Per-state logistic model for the reference out-edge (symbol 1):
/// log pi/(1-pi) = intercept + slope * z; the symbol-2 edge takes the
/// complement.
struct LogisticEdgeFit {
    StateId state = kNoState;
    double intercept = 0.0, slope = 0.0;
    double se_intercept = 0.0, se_slope = 0.0;
    double log_lik = 0.0;
    Count n_obs = 0;
    int iterations = 0;
    double max_gradient = 0.0;
    bool converged = false;
    bool separated = false;  // no finite MLE (supremum likelihood reported)
};

struct LogisticApfaModel {
    CountedApfa base;
    std::vector<LogisticEdgeFit> fits;  // indexed by state; sink slot unused
    std::vector<std::vector<std::pair<double, int>>> observations;  // per state: (z, y)
    double total_log_lik = 0.0;
};

/// Fits one logistic regression per non-sink state over the rows routed
/// through it. Requires every alphabet binary and every state reached;
/// throws ModelError otherwise. Newton iteration on a standardized
/// covariate, convergence at max |score| < 1e-8 or 50 iterations;
/// separation detected and flagged.
LogisticApfaModel fit_logistic_edges(const CountedApfa& c, const Dataset& d);

/// Standalone univariate logistic fit of y in {0,1} on z.
LogisticEdgeFit fit_logistic_1d(std::span<const std::pair<double, int>> obs);

/// Log-likelihood and analytic score of the univariate model at (a, b);
/// the score's finite-difference consistency is part of the test suite.
double logistic_log_lik(std::span<const std::pair<double, int>> obs, double a, double b);
Eigen::Vector2d logistic_score(std::span<const std::pair<double, int>> obs, double a, double b);

/// -2 [pooled fit - separate fits] summed over L({v,w}); df = 2 per merged
/// state pair. Components without a finite MLE set separation_flagged.
TestResult logistic_merge_test(const LogisticApfaModel& m, StateId v, StateId w);

// ---------------------------------------------------------------------------
// Conditional selection and the global covariate test

struct ConditionalSelection {
    FittedApfa pooled;  // marginal fit of the selected topology
    std::vector<TraceEntry> trace;
    std::optional<GroupedCounts> grouped;       // categorical covariate
    std::optional<LogisticApfaModel> logistic;  // continuous covariate
};

/// The greedy sweep with scores from conditional_merge_test (categorical) or
/// logistic_merge_test (continuous), penalized by alpha * df.
ConditionalSelection conditional_select(const Dataset& d, const SelectionConfig& cfg);

/// Global test of equality of the conditional distributions across covariate
/// groups: the covariate is prepended as variable 0, the augmented sample
/// automaton built, and the level-1 states merge-tested.
TestResult covariate_global_test(const Dataset& d);

}  // namespace apfa
