#include <doctest.h>

#include <cmath>
#include <random>

#include "apfa/errors.hpp"
#include "apfa/estimation.hpp"
#include "apfa/merging.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace apfa;
using namespace apfa::testing;

TEST_CASE("relative-frequency estimates on the golden data") {
    const FittedApfa f = fit_mle(unrestricted70());
    const Apfa& g = f.counted.graph;
    const auto root_edges = g.out_edges(g.root());
    REQUIRE(root_edges.size() == 2);
    CHECK(root_edges[0].prob == doctest::Approx(36.0 / 70.0).epsilon(1e-15));
    CHECK(root_edges[1].prob == doctest::Approx(34.0 / 70.0).epsilon(1e-15));
    for (StateId v = 0; v < g.num_states(); ++v) CHECK(!f.inestimable[v]);
}

TEST_CASE("deterministic data fits with certainty") {
    std::vector<std::vector<std::int32_t>> rows(9, {1, 2, 1});
    const FittedApfa f = fit_mle(sample_apfa(dataset_from_rows(std::move(rows), {2, 2, 2})));
    for (const Edge& e : f.counted.graph.edges) CHECK(e.prob == 1.0);
    CHECK(f.log_lik == 0.0);
}

TEST_CASE("zero-count completion states are flagged inestimable") {
    const FittedApfa f = fit_mle(make_counted(complete(incomplete70().graph, 100)));
    int flagged = 0;
    for (StateId v = 0; v < f.counted.graph.num_states(); ++v)
        if (f.inestimable[v]) {
            ++flagged;
            double sum = 0.0;
            for (const Edge& e : f.counted.graph.out_edges(v)) sum += e.prob;
            CHECK(sum == doctest::Approx(1.0));  // uniform placeholder
        }
    CHECK(flagged == 1);
}

TEST_CASE("fitted probabilities track a long simulation") {
    const Apfa g = generator8();
    const Count n = 100000;
    const FittedApfa f = fit_mle(sample_apfa(simulate(g, n, 2024)));
    // Compare each root edge against its generator probability.
    const auto fitted_root = f.counted.graph.out_edges(f.counted.graph.root());
    const auto true_root = g.out_edges(g.root());
    REQUIRE(fitted_root.size() == true_root.size());
    for (std::size_t i = 0; i < fitted_root.size(); ++i) {
        const double p = true_root[i].prob;
        const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
        CHECK(std::abs(fitted_root[i].prob - p) < 3 * se);
    }
}

TEST_CASE("golden log-likelihoods") {
    CHECK(std::abs(fit_mle(unrestricted70()).log_lik - (-116.2117)) < 1e-3);
    CHECK(std::abs(fit_mle(merged70()).log_lik - (-142.7731)) < 1e-3);
}

TEST_CASE("log-likelihood equals the per-row sum") {
    std::mt19937_64 rng(9119);
    for (int rep = 0; rep < 20; ++rep) {
        const Dataset d = random_dataset(rng, 5, 3, 250);
        const FittedApfa f = fit_mle(sample_apfa(d));
        CHECK(std::abs(f.log_lik - per_row_log_lik(f, d)) < 1e-9);

        // Any merged submodel fits no better than the sample automaton.
        std::vector<StateId> pair = random_pair(rng, f.counted.graph);
        if (!pair.empty()) {
            const FittedApfa sub = fit_mle(merge(f.counted, pair));
            CHECK(sub.log_lik <= f.log_lik + 1e-12);
        }
    }
}

TEST_CASE("marginals are sample proportions") {
    const FittedApfa f = fit_mle(unrestricted70());
    const Marginals m = marginals(f);
    CHECK(m.node_probs[f.counted.graph.root()] == 1.0);
    const auto level1 = f.counted.graph.states_at_level(1);
    CHECK(m.node_probs[level1[0]] == doctest::Approx(36.0 / 70.0));
    CHECK(m.node_probs[level1[1]] == doctest::Approx(34.0 / 70.0));
    for (int level = 0; level <= 3; ++level) {
        double sum = 0.0;
        for (StateId v : f.counted.graph.states_at_level(level)) sum += m.node_probs[v];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("edge marginals match exact path probabilities on simulated data") {
        const Apfa g = generator8();
        const Count n = 200000;
        const FittedApfa big = fit_mle(sample_apfa(simulate(g, n, 77)));
        const Marginals mm = marginals(big);
        // Marginal probability of the root's symbol-2 edge is 0.4; of the
        // (2,2)-prefix edge 0.4 * 0.7.
        const Apfa& bg = big.counted.graph;
        const auto e1 = bg.out_edge(bg.root(), 2);
        REQUIRE(e1.has_value());
        CHECK(std::abs(mm.edge_probs[*e1] - 0.4) < 3 * std::sqrt(0.4 * 0.6 / n));
        const StateId s2 = bg.edges[*e1].target;
        const auto e2 = bg.out_edge(s2, 2);
        REQUIRE(e2.has_value());
        const double p22 = 0.4 * 0.7;
        CHECK(std::abs(mm.edge_probs[*e2] - p22) < 3 * std::sqrt(p22 * (1 - p22) / n));
    }
}

TEST_CASE("dimension counts estimable parameters of the given graph") {
    CHECK(dimension(unrestricted70().graph) == 7);
    CHECK(dimension(merged70().graph) == 4);
    // Direct count on the incomplete graph: 11 edges over 6 internal states.
    CHECK(incomplete70().graph.num_edges() == 11);
    CHECK(dimension(incomplete70().graph) == 5);
    for (int p : {1, 2, 5, 9}) CHECK(dimension(minimal_apfa(std::vector<int>(p, 2))) == p);
}

TEST_CASE("completed dimension via the state-count recursion") {
    CHECK(completed_dimension(unrestricted70().graph) == 7.0L);
    CHECK(completed_dimension(incomplete70().graph) == 7.0L);
    CHECK(completed_dimension(incomplete70_merged().graph) == 4.0L);
    CHECK(completed_dimension(generator8()) == 8.0L);  // one synthetic level-3 subtree
}

TEST_CASE("information criterion") {
    const FittedApfa f = fit_mle(unrestricted70());
    CHECK(information_criterion(f, 0.0) == doctest::Approx(-2.0 * f.log_lik));
    CHECK_THROWS_AS(information_criterion(f, -1.0), ModelError);

    // G2 = 53.12 dwarfs 3 alpha under both AIC and BIC, so the unrestricted
    // model is preferred either way.
    const FittedApfa sub = fit_mle(merged70());
    for (double alpha : {2.0, std::log(70.0)}) {
        CHECK(information_criterion(f, alpha) < information_criterion(sub, alpha));
    }
}

TEST_CASE("independence data prefers the minimal model under BIC") {
    Apfa m = minimal_apfa({2, 2, 2});
    for (Edge& e : m.edges) e.prob = e.symbol == 1 ? 0.65 : 0.35;
    m.reindex();
    const Dataset d = simulate(m, 20000, 5);
    const double alpha = std::log(static_cast<double>(d.size()));
    const FittedApfa minimal_fit = fit_mle(count_onto(minimal_apfa({2, 2, 2}), d));
    const FittedApfa maximal_fit = fit_mle(count_onto(maximal_apfa({2, 2, 2}), d));
    CHECK(information_criterion(minimal_fit, alpha) < information_criterion(maximal_fit, alpha));
}
