/* fixtures.hpp -- shared model and dataset fixtures for the test suites. */

#pragma once

#include "apfa/automaton.hpp"
#include "apfa/counting.hpp"
#include "apfa/dataset.hpp"

namespace apfa::testing {

/// 70 observations of 3 binary variables; all 8 outcomes occur, so the
/// sample automaton is the complete unrestricted 8-state model.
/// Root out-counts 36/34; the two level-1 states have the joint-outcome
/// profile (2,3,9,22) and (16,16,1,1).
Dataset ds70_a();

/// 70 observations of 3 binary variables with the (2,2,*) branch absent:
/// profiles (3,2,9,22) and (17,17,0,0); the sample automaton is incomplete.
Dataset ds70_b();

/// The complete unrestricted sample automaton of ds70_a (8 states).
CountedApfa unrestricted70();
/// unrestricted70 with the two level-1 states merged (5 states).
CountedApfa merged70();

/// The incomplete sample automaton of ds70_b (7 states; the second level-1
/// state has a single out-edge).
CountedApfa incomplete70();
/// incomplete70 with the two level-1 states merged.
CountedApfa incomplete70_merged();

/// Four-variable wheeze-style fitted model: three conditioning classes at
/// levels 2 and 3 (all-absent, all-present, mixed), with the documented
/// transition probabilities 0.16/0.47/0.66/0.67 along the all-present path.
Apfa wheeze_model();

/// Eight-state generator over four binary variables with one structural-
/// looking random zero: the level-2 state reached by x2 = 2 has no symbol-2
/// out-edge. Used for simulation-and-recovery runs.
Apfa generator8();

/// Graphical-model comparison fixtures over binary variables:
/// complete independence (p=4), first-order chain (p=5), second-order chain
/// (p=5), a variable-length-memory submodel of the second-order chain, and
/// a memory-gap chain (p=3: X3 depends on X1 only).
Apfa independence4();
Apfa first_order5();
Apfa second_order5();
Apfa vlmc5();
Apfa memory_gap3();

/// The two level-1 state ids of any sample automaton over binary data.
std::vector<StateId> level1_pair(const CountedApfa& c);

}  // namespace apfa::testing
