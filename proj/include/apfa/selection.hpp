/* selection.hpp -- greedy level-wise model selection by state merging.
 *
 * Starting from the sample automaton, the algorithm sweeps levels 1..p-1.
 * At each level the most similar pair of states is merged, and this repeats
 * until the remaining states at the level are pairwise dissimilar. Scores
 * are recomputed from scratch after every merge, because a merge cascades
 * through descendant counts.
 */

#pragma once

#include <vector>

#include "apfa/dataset.hpp"
#include "apfa/estimation.hpp"
#include "apfa/inference.hpp"

namespace apfa {

struct SelectionConfig {
    enum class ScoreKind { penalized_likelihood, max_difference };
    ScoreKind score = ScoreKind::penalized_likelihood;

    /// Penalized-likelihood mode: similarity is G^2 - alpha * df_adjusted;
    /// a pair is merged while the minimal score is negative. Pairs whose
    /// merge has zero adjusted df leave the criterion unchanged and are
    /// merged for parsimony (logged distinctly).
    double alpha = 2.0;

    /// Max-difference mode: similarity is the largest |pi difference| over
    /// corresponding out-edges of corresponding descendant states, absent
    /// edges read as probability zero; a pair is merged while the minimal
    /// score is below mu. Must lie in (0, 1].
    double mu = 0.05;

    bool trace = false;
};

/// Similarity of two same-level states under the configured score.
double score_pair(const CountedApfa& c, StateId v, StateId w, const SelectionConfig& cfg);

struct TraceEntry {
    int level = 0;
    StateId first = kNoState, second = kNoState;  // pair ids in the model of that step
    double score = 0.0;
    double g2 = 0.0;
    int df_adjusted = 0;
    double ic_before = 0.0, ic_after = 0.0;
    bool parsimony = false;  // zero-df merge, criterion unchanged
};

struct SelectionRun {
    FittedApfa model;
    std::vector<TraceEntry> trace;
};

SelectionRun select(const Dataset& d, const SelectionConfig& cfg);
SelectionRun select_from(CountedApfa start, const SelectionConfig& cfg);

/// Applies the merges of a trace to a fresh start model; reproduces the
/// selected model exactly.
CountedApfa replay(CountedApfa start, const std::vector<TraceEntry>& trace);

}  // namespace apfa
