/* inference.hpp -- likelihood-ratio machinery for nested automata.
 *
 * Deviances between nested models decompose into independence G^2 tests on
 * node-symbol tables: rows are the states being merged, columns the symbols
 * of the next level, cells the outgoing-edge counts. Degrees of freedom per
 * table drop all-zero rows and columns (the adjusted accounting, which takes
 * inestimability into account); the unadjusted count is the dimension gap
 * between the completed models.
 */

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "apfa/counting.hpp"
#include "apfa/merging.hpp"

namespace apfa {

struct NodeSymbolTable {
    int level = 0;
    std::vector<StateId> states;  // row labels
    Eigen::MatrixXd counts;       // counts(r, sigma-1); absent edges are 0
};

struct G2Result {
    double g2 = 0.0;
    int df = 0;
};

/// Likelihood-ratio test of independence for an r x c count table:
/// G^2 = 2 sum n_ij log(n_ij n_++ / (n_i+ n_+j)) with 0 log 0 = 0,
/// df = (#nonzero rows - 1)(#nonzero columns - 1).
/// Throws ModelError on negative cells or an all-zero table.
G2Result g2_independence(const Eigen::MatrixXd& counts);

/// Outgoing-edge counts of a same-level state group (rows sorted by id).
NodeSymbolTable node_symbol_table(const CountedApfa& c, std::span<const StateId> group);

/// g2_independence applied to the group's node-symbol table.
G2Result local_lrt(const CountedApfa& c, std::span<const StateId> group);

struct TestPart {
    MergeGroup group;
    double g2 = 0.0;
    int df = 0;
    std::optional<int> covariate_code;  // set by conditional tests
};

struct TestResult {
    double g2 = 0.0;
    int df_adjusted = 0;
    long long df_unadjusted = 0;
    bool df_unadjusted_saturated = false;  // completion dimensions overflowed
    std::optional<double> p_value;         // upper-tail chi^2, when df_adjusted >= 1
    std::vector<TestPart> parts;
    bool separation_flagged = false;  // logistic-route tests only
};

/// Test of merging the seed set: the sum of local LRTs over L(seed).
/// df_adjusted sums the per-table dfs; df_unadjusted is
/// dim(completion(A)) - dim(completion(merged)) computed without
/// materializing the completions.
TestResult merge_test(const CountedApfa& c, std::span<const StateId> seed);

/// Like merge_test but without the unadjusted-df and p-value decoration;
/// this is the selection hot path.
TestResult merge_test_local(const CountedApfa& c, std::span<const StateId> seed);

/// Deviance of a0 versus a with the full per-level, per-block decomposition.
/// Requires submodel_partition(a, a0) to succeed and a0's counts to be the
/// blockwise sums of a's; throws ModelError otherwise.
TestResult nested_test(const CountedApfa& a, const CountedApfa& a0);

/// Upper-tail chi-square probability via the regularized incomplete gamma.
/// df < 1 yields nullopt.
std::optional<double> chi2_upper_tail(double g2, int df);

}  // namespace apfa
