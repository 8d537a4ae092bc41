/* automaton.hpp -- levelled probabilistic finite automata.
 *
 * An Apfa is a levelled directed multigraph generating fixed-length symbol
 * strings: one root at level 0, one sink at level p, every edge goes from a
 * level-i state to a level-(i+1) state. Each edge carries a symbol, and
 * optionally a probability and a sample count. Outgoing edges of a state
 * have pairwise distinct symbols, so an edge is identified by (source,
 * symbol) and every root-to-sink path spells a distinct outcome vector.
 *
 * Apfa values are treated as immutable once indexed; operations return new
 * values. Builders mutate the public fields and call reindex() once.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace apfa {

using StateId = std::int32_t;
using EdgeId = std::int32_t;
using Symbol = std::int32_t;  // 1-based category codes
using Count = std::int64_t;

inline constexpr StateId kNoState = -1;
inline constexpr Count kNoCount = -1;

/// A realization (x_1, ..., x_p), one symbol per level.
using Outcome = std::vector<Symbol>;

struct Edge {
    StateId source = kNoState;
    StateId target = kNoState;
    Symbol symbol = 0;
    double prob = std::numeric_limits<double>::quiet_NaN();  // NaN = unset
    Count count = kNoCount;                                  // -1  = unset
    bool synthetic = false;  // added by completion, hidden in exports

    bool has_prob() const { return prob == prob; }
    bool has_count() const { return count >= 0; }
};

struct Apfa {
    int num_levels = 0;              // p
    std::vector<int> alphabet_sizes; // size p; out-symbols of a level-i state lie in 1..alphabet_sizes[i]
    std::vector<int> state_level;    // level per state, ids are dense 0..V-1
    std::vector<Edge> edges;         // sorted by (source, symbol) after reindex()

    // Derived indexes, rebuilt by reindex().
    std::vector<EdgeId> out_offset;   // CSR over edges, size V+1
    std::vector<StateId> level_begin; // size p+2 when ids are level-major, else empty

    int num_states() const { return static_cast<int>(state_level.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }

    /// Sorts edges by (source, symbol) and rebuilds the out-edge index.
    /// Detects whether state ids are level-major (nondecreasing levels) and
    /// if so fills level_begin for O(1) per-level access.
    void reindex();

    std::span<const Edge> out_edges(StateId v) const {
        return {edges.data() + out_offset[v], edges.data() + out_offset[v + 1]};
    }
    int out_degree(StateId v) const { return out_offset[v + 1] - out_offset[v]; }

    /// Edge id of the sigma-labelled out-edge of v, if present.
    std::optional<EdgeId> out_edge(StateId v, Symbol sigma) const;

    /// First level-0 / level-p state (the unique one in a valid Apfa).
    StateId root() const;
    StateId sink() const;

    std::vector<StateId> states_at_level(int level) const;

    bool has_probs() const;   // every edge carries a probability
    bool has_counts() const;  // every edge carries a count
    bool level_major() const { return !level_begin.empty(); }
};

/// Convenience constructor for fixtures and builders: fills fields and indexes.
Apfa make_apfa(int num_levels, std::vector<int> alphabet_sizes,
               std::vector<int> state_level, std::vector<Edge> edges);

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
    enum class Code {
        bad_shape,         // p < 1, alphabet < 1, out-of-range ids/levels/symbols
        not_levelled,      // edge not from level i to level i+1
        root_violation,    // no/multiple level-0 states, or root with incoming edges
        sink_violation,    // no/multiple level-p states, or sink with outgoing edges
        degree_violation,  // interior state without incoming or outgoing edges
        duplicate_symbol,  // two out-edges of one state share a symbol
        prob_range,        // probability outside [0,1]
        prob_sum,          // out-probabilities of a state do not sum to one
        count_negative,
    };
    Code code;
    StateId state = kNoState;
    EdgeId edge = -1;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    bool has(ValidationIssue::Code code) const;
    std::string to_string() const;
};

/// Structural diagnosis; never throws. The report is empty iff `a` satisfies
/// every Apfa invariant. Probability sums are checked only where probabilities
/// are set; a state whose out-probabilities are all exactly zero is treated as
/// an inestimable placeholder (completion bookkeeping) and skipped.
ValidationReport validate(const Apfa& a);

/// Throws ModelError when validate(a) is nonempty. Used to guard preconditions.
void require_valid(const Apfa& a, const char* where);

// ---------------------------------------------------------------------------
// Completeness and canonical constructions

/// True iff every level-i non-sink state has a full out-alphabet, i.e. the
/// sample space of `a` is the whole product space.
bool is_complete(const Apfa& a);

/// The completion: missing out-edges (and the states they require) are added
/// recursively so that every non-sink state is complete. Added edges carry
/// count 0 (when `a` has counts), probability 0 (when `a` has probabilities)
/// and are flagged synthetic; descendent subgraphs of added states are
/// complete trees with the final level contracted to the sink. Existing state
/// ids are preserved; new states are appended. Idempotent on complete inputs.
/// Throws ModelError when more than `max_new_states` states would be created.
Apfa complete(const Apfa& a, int max_new_states);

/// Full per-level product expansion: level i has prod_{j<=i} |alphabet_j|
/// states, within-level order lexicographic by prefix. No distribution
/// constraints. Throws ModelError past `max_states`.
Apfa maximal_apfa(const std::vector<int>& alphabet_sizes, int max_states = 1 << 22);

/// One state per level: complete independence.
Apfa minimal_apfa(const std::vector<int>& alphabet_sizes);

// ---------------------------------------------------------------------------
// Paths, probabilities, simulation

/// The unique root-to-sink edge sequence generating x, or nullopt when x is
/// not in the sample space of `a`.
std::optional<std::vector<EdgeId>> path_for(const Apfa& a, const Outcome& x);

/// Product of edge probabilities along the path of x; 0 when there is no
/// path. Throws ModelError when probabilities are unset.
double probability_of(const Apfa& a, const Outcome& x);

struct Dataset;  // dataset.hpp

/// n independent root-to-sink walks, emitting one symbol vector per walk.
/// Deterministic given the seed. Throws ModelError when probabilities are
/// unset or the automaton is invalid.
Dataset simulate(const Apfa& a, Count n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Renumbering and comparison

/// Breadth-first canonical renumbering: ids become dense, level-major, with
/// discovery order determined only by the graph structure (out-edges visited
/// in symbol order). Returns the renumbered automaton and the old-id -> new-id
/// map. Two valid automata are isomorphic as labelled levelled multigraphs
/// iff their canonical forms are structurally equal.
std::pair<Apfa, std::vector<StateId>> canonical_form(const Apfa& a);

struct StructuralEq {
    bool counts = false;
    bool probs = false;
    bool synthetic = false;
    double prob_tol = 0.0;
};

/// Field-by-field comparison of two automata under identical numbering.
bool structurally_equal(const Apfa& a, const Apfa& b, const StructuralEq& opts = {});

/// Canonical-form comparison (topology and symbols; counts/probs per opts).
bool isomorphic(const Apfa& a, const Apfa& b, const StructuralEq& opts = {});

}  // namespace apfa
