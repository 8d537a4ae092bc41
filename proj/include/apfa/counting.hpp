/* counting.hpp -- sample trees, sample automata, and count bookkeeping. */

#pragma once

#include <vector>

#include "apfa/automaton.hpp"
#include "apfa/dataset.hpp"

namespace apfa {

/// An automaton whose edges all carry sample counts, with derived per-state
/// counts. Invariants (checked by make_counted): n(v) equals the sum of
/// incoming edge counts for non-root states, outgoing counts sum to n(v) at
/// every non-sink state, and n(root) = N.
struct CountedApfa {
    Apfa graph;
    std::vector<Count> node_counts;
    Count total = 0;
};

/// Derives node counts from edge counts and verifies the count invariants.
/// Throws ModelError on inconsistent counts or missing edge counts.
CountedApfa make_counted(Apfa graph);

/// The rooted tree of observed prefixes: level-q states are the distinct
/// x_{<=q} in the data, edges carry sample counts, level-p leaves stay
/// distinct. No zero-count edges. State ids are dense and level-major,
/// lexicographic within a level. Note the tree form has one leaf per distinct
/// outcome, so it fails the single-sink invariant by construction; contract
/// the leaves (sample_apfa) to obtain a valid automaton.
CountedApfa sample_tree(const Dataset& d);

/// The sample tree with all leaves contracted to a single sink. Generally
/// incomplete: only observed prefixes have states, only observed transitions
/// have edges.
CountedApfa sample_apfa(const Dataset& d);

/// Routes every row of `d` through `topology` and accumulates edge counts.
/// Throws DataError (with the row number) when a row has no path.
CountedApfa count_onto(const Apfa& topology, const Dataset& d);

/// Sum over rows of log-probabilities under the relative-frequency fit,
/// computed directly from counts: sum_e n(e) log(n(e)/n(source)), with
/// 0 log 0 = 0.
double counted_log_lik(const CountedApfa& c);

}  // namespace apfa
