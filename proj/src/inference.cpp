#include "apfa/inference.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "apfa/errors.hpp"
#include "apfa/estimation.hpp"

namespace apfa {

G2Result g2_independence(const Eigen::MatrixXd& counts) {
    const Eigen::VectorXd row = counts.rowwise().sum();
    const Eigen::VectorXd col = counts.colwise().sum();
    const double total = counts.sum();
    if ((counts.array() < 0).any()) throw ModelError("g2_independence: negative cell");
    if (total <= 0) throw ModelError("g2_independence: all-zero table");

    double g2 = 0.0;
    for (Eigen::Index i = 0; i < counts.rows(); ++i)
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            const double n = counts(i, j);
            if (n > 0) g2 += n * std::log(n * total / (row(i) * col(j)));
        }
    const int r = static_cast<int>((row.array() > 0).count());
    const int c = static_cast<int>((col.array() > 0).count());
    return {2.0 * g2, (r - 1) * (c - 1)};
}

NodeSymbolTable node_symbol_table(const CountedApfa& c, std::span<const StateId> group) {
    if (group.empty()) throw ModelError("node_symbol_table: empty group");
    const Apfa& g = c.graph;
    NodeSymbolTable t;
    t.states.assign(group.begin(), group.end());
    std::sort(t.states.begin(), t.states.end());
    t.states.erase(std::unique(t.states.begin(), t.states.end()), t.states.end());
    const int level = g.state_level[t.states.front()];
    for (StateId v : t.states) {
        if (v < 0 || v >= g.num_states()) throw ModelError("node_symbol_table: bad state id");
        if (g.state_level[v] != level)
            throw ModelError("node_symbol_table: states must share one level");
    }
    if (level >= g.num_levels) throw ModelError("node_symbol_table: sink-level group");
    t.level = level;
    t.counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.states.size()),
                                     g.alphabet_sizes[level]);
    for (std::size_t i = 0; i < t.states.size(); ++i)
        for (const Edge& e : g.out_edges(t.states[i]))
            t.counts(static_cast<Eigen::Index>(i), e.symbol - 1) =
                static_cast<double>(e.count);
    return t;
}

G2Result local_lrt(const CountedApfa& c, std::span<const StateId> group) {
    return g2_independence(node_symbol_table(c, group).counts);
}

namespace {

TestResult sum_of_local_tests(const CountedApfa& c, const MergeList& ml) {
    TestResult r;
    for (const MergeGroup& group : ml.groups) {
        // Groups of zero-count (synthetic) states contribute nothing; the
        // computation can be based on the uncompleted automaton alone.
        const NodeSymbolTable table = node_symbol_table(c, group.states);
        if (table.counts.sum() <= 0) continue;
        const G2Result local = g2_independence(table.counts);
        r.g2 += local.g2;
        r.df_adjusted += local.df;
        r.parts.push_back({group, local.g2, local.df, std::nullopt});
    }
    return r;
}

void attach_unadjusted_df(TestResult& r, const Apfa& full, const Apfa& reduced) {
    const long double diff = completed_dimension(full) - completed_dimension(reduced);
    constexpr long double kMantissaExact = 9.0e18L;  // past here the gap is approximate
    if (completed_dimension(full) > kMantissaExact || diff > kMantissaExact) {
        r.df_unadjusted = std::numeric_limits<long long>::max();
        r.df_unadjusted_saturated = true;
    } else {
        r.df_unadjusted = static_cast<long long>(llroundl(diff));
    }
}

}  // namespace

TestResult merge_test_local(const CountedApfa& c, std::span<const StateId> seed) {
    return sum_of_local_tests(c, merge_list(c.graph, seed));
}

TestResult merge_test(const CountedApfa& c, std::span<const StateId> seed) {
    TestResult r = sum_of_local_tests(c, merge_list(c.graph, seed));
    attach_unadjusted_df(r, c.graph, merge(c.graph, seed));
    if (r.df_adjusted >= 1) r.p_value = chi2_upper_tail(r.g2, r.df_adjusted);
    return r;
}

TestResult nested_test(const CountedApfa& a, const CountedApfa& a0) {
    auto part = submodel_partition(a.graph, a0.graph);
    if (!part) throw ModelError("nested_test: models are not nested");

    // The decomposition is valid only when a0's counts are the pushforward
    // of a's along the partition.
    {
        std::vector<Count> pushed(a0.graph.num_edges(), 0);
        for (const Edge& e : a.graph.edges) {
            auto f = a0.graph.out_edge(part->state_map[e.source], e.symbol);
            pushed[*f] += e.count;
        }
        for (int ei = 0; ei < a0.graph.num_edges(); ++ei)
            if (pushed[ei] != a0.graph.edges[ei].count)
                throw ModelError("nested_test: counts of the submodel do not match the data");
    }

    TestResult r;
    for (const MergeGroup& block : part->nontrivial_blocks()) {
        const NodeSymbolTable table = node_symbol_table(a, block.states);
        if (table.counts.sum() <= 0) continue;
        const G2Result local = g2_independence(table.counts);
        r.g2 += local.g2;
        r.df_adjusted += local.df;
        r.parts.push_back({block, local.g2, local.df, std::nullopt});
    }
    attach_unadjusted_df(r, a.graph, a0.graph);
    if (r.df_adjusted >= 1) r.p_value = chi2_upper_tail(r.g2, r.df_adjusted);
    return r;
}

std::optional<double> chi2_upper_tail(double g2, int df) {
    if (df < 1) return std::nullopt;
    if (g2 < 0) {
        if (g2 < -1e-9) throw ModelError("chi2_upper_tail: negative statistic");
        g2 = 0.0;
    }
    return boost::math::gamma_q(0.5 * static_cast<double>(df), 0.5 * g2);
}

}  // namespace apfa
