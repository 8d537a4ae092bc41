/* merging.hpp -- state merging, merge-lists, submodel partitions, nesting. */

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "apfa/counting.hpp"

namespace apfa {

struct MergeGroup {
    int level = 0;
    std::vector<StateId> states;  // sorted, size >= 2
};

/// The full cascade L(s): the seed first, then every same-level state set
/// co-merged with it, levels nondecreasing, ordered by smallest member
/// within a level. States x and y land in one group iff they are reached
/// from seed members by paths with identical symbol sequences.
struct MergeList {
    std::vector<MergeGroup> groups;
};

/// Cascade computation. Throws ModelError when the seed states do not share
/// a level, include the sink level, or number fewer than two.
MergeList merge_list(const Apfa& a, std::span<const StateId> seed);

/// Fuses the states and edges of every L(s) group. Fused edges sum their
/// member counts; probabilities are dropped (refit afterwards). The surviving
/// identity of a fused group is its smallest member id, and the result is
/// renumbered dense level-major.
Apfa merge(const Apfa& a, std::span<const StateId> seed);
CountedApfa merge(const CountedApfa& c, std::span<const StateId> seed);

/// merge plus the old-state -> new-state map.
std::pair<Apfa, std::vector<StateId>> merge_with_map(const Apfa& a,
                                                     std::span<const StateId> seed);

/// The per-level partition of a's states whose blockwise merge yields a0, as
/// found by following symbols from the roots; fails (nullopt) when a0 is not
/// reachable from a by merges or would enlarge the sample space (the raw
/// models would not be nested). Throws ModelError on incompatible shapes.
struct SubmodelPartition {
    std::vector<StateId> state_map;                       // a-state -> a0-state
    std::vector<std::vector<std::vector<StateId>>> levels; // [level] -> blocks (singletons included)

    std::vector<MergeGroup> nontrivial_blocks() const;
};
std::optional<SubmodelPartition> submodel_partition(const Apfa& a, const Apfa& a0);

/// Builds (A+)^m and (A^m)+ and verifies they are isomorphic as labelled
/// levelled multigraphs with matching counts, returning the witnessing
/// state correspondence. Throws ModelError past the completion size guard.
struct NestingEvidence {
    bool isomorphic = false;
    std::vector<std::pair<StateId, StateId>> witness;  // (A+)^m state -> (A^m)+ state
};
NestingEvidence check_nesting(const CountedApfa& c, std::span<const StateId> seed,
                              int max_new_states);

}  // namespace apfa
