#include <doctest.h>

#include <random>

#include "apfa/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace apfa;
using namespace apfa::testing;

TEST_CASE("read_dataset parses plain binary tables") {
    const Dataset d = read_dataset("1,2,1\n2,2,2\n1,1,1\n");
    CHECK(d.size() == 3);
    CHECK(d.width() == 3);
    CHECK(d.alphabet_sizes == std::vector<int>{2, 2, 2});
}

TEST_CASE("read_dataset reproduces the 70-row golden file") {
    const Dataset golden = ds70_a();
    const Dataset reread = read_dataset(write_csv(golden));
    CHECK(reread.size() == 70);
    CHECK(reread.rows == golden.rows);
}

TEST_CASE("read_dataset reports malformed rows with line numbers") {
    CHECK_THROWS_WITH_AS(read_dataset("1,2,1\n1,2,1,2\n"),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(read_dataset("1,2,x\n"), doctest::Contains("line 1"), DataError);
    CHECK_THROWS_WITH_AS(read_dataset("1,0,1\n"), doctest::Contains("positive"), DataError);
}

TEST_CASE("read_dataset attaches covariates") {
    ReadOptions by_name;
    by_name.header = true;
    by_name.covariate = "smoke";
    const Dataset d = read_dataset("w1,w2,smoke\n1,2,0\n2,1,1\n", by_name);
    CHECK(d.width() == 2);
    REQUIRE(d.covariate.has_value());
    CHECK(d.covariate->codes == std::vector<int>{0, 1});
    CHECK(d.column_names == std::vector<std::string>{"w1", "w2"});

    ReadOptions by_index;
    by_index.covariate = "3";
    by_index.covariate_continuous = true;
    const Dataset e = read_dataset("1,2,0.5\n2,1,-1.25\n", by_index);
    REQUIRE(e.covariate.has_value());
    CHECK(e.covariate->values == std::vector<double>{0.5, -1.25});

    ReadOptions missing;
    missing.header = true;
    missing.covariate = "nope";
    CHECK_THROWS_AS(read_dataset("a,b\n1,1\n", missing), DataError);
}

TEST_CASE("alphabets directive widens inferred alphabets") {
    const Dataset d = read_dataset("#alphabets 2,3\n1,1\n2,1\n");
    CHECK(d.alphabet_sizes == std::vector<int>{2, 3});
    CHECK_THROWS_AS(read_dataset("#alphabets 1,2\n2,1\n"), DataError);
}

TEST_CASE("sample tree of the golden data") {
    const CountedApfa tree = sample_tree(ds70_a());
    // Root out-counts 36/34; leaves stay distinct.
    const Apfa& g = tree.graph;
    const auto level1 = g.states_at_level(1);
    REQUIRE(level1.size() == 2);
    CHECK(tree.node_counts[level1[0]] == 36);
    CHECK(tree.node_counts[level1[1]] == 34);
    CHECK(g.states_at_level(3).size() == 8);
    CHECK(tree.total == 70);
    for (const Edge& e : g.edges) CHECK(e.count > 0);
}

TEST_CASE("sample tree omits unobserved branches") {
    const CountedApfa tree = sample_tree(ds70_b());
    CHECK(tree.graph.states_at_level(2).size() == 3);  // no (2,2) prefix
    CHECK(tree.graph.states_at_level(3).size() == 6);
}

TEST_CASE("sample tree of a repeated row is a path") {
    std::vector<std::vector<std::int32_t>> rows(5, {2, 1, 2});
    const CountedApfa tree = sample_tree(dataset_from_rows(std::move(rows), {2, 2, 2}));
    CHECK(tree.graph.num_states() == 4);
    for (const Edge& e : tree.graph.edges) CHECK(e.count == 5);
}

TEST_CASE("empty dataset rejected") {
    Dataset d;
    d.alphabet_sizes = {2, 2};
    CHECK_THROWS_AS(sample_tree(d), DataError);
    CHECK_THROWS_AS(sample_apfa(d), DataError);
}

TEST_CASE("sample automaton topologies of the golden data") {
    const CountedApfa a = unrestricted70();
    CHECK(validate(a.graph).ok());
    CHECK(is_complete(a.graph));
    CHECK(a.graph.num_states() == 8);

    const CountedApfa b = incomplete70();
    CHECK(validate(b.graph).ok());
    CHECK(!is_complete(b.graph));
    CHECK(b.graph.num_states() == 7);
    const auto level1 = b.graph.states_at_level(1);
    CHECK(b.graph.out_degree(level1[0]) == 2);
    CHECK(b.graph.out_degree(level1[1]) == 1);
}

TEST_CASE("single-row sample automaton is one path") {
    const CountedApfa c = sample_apfa(dataset_from_rows({{1, 2, 2, 1}}));
    CHECK(c.graph.num_states() == 5);
    CHECK(c.graph.num_edges() == 4);
    CHECK(c.total == 1);
}

TEST_CASE("per-level node counts telescope to N") {
    std::mt19937_64 rng(808);
    for (int rep = 0; rep < 20; ++rep) {
        const Dataset d = random_dataset(rng, 5, 3, 300);
        const CountedApfa c = sample_apfa(d);
        for (int level = 0; level <= c.graph.num_levels; ++level) {
            Count sum = 0;
            for (StateId v : c.graph.states_at_level(level)) sum += c.node_counts[v];
            CHECK(sum == d.size());
        }
        for (const Edge& e : c.graph.edges) CHECK(e.count > 0);
    }
}

TEST_CASE("simulated outcomes stay inside the generator's completed space") {
    const Apfa g = generator8();
    const Apfa plus = complete(g, 1000);
    const Dataset d = simulate(g, 2000, 31);
    const CountedApfa c = sample_apfa(d);
    const FittedApfa f = fit_mle(c);
    for (const Outcome& x : enumerate_outcomes({2, 2, 2, 2})) {
        if (path_for(c.graph, x))
            CHECK(path_for(plus, x).has_value());
    }
}

TEST_CASE("count_onto routes rows and rejects strays") {
    const CountedApfa fitted = count_onto(unrestricted70().graph, ds70_a());
    CHECK(fitted.total == 70);
    // The incomplete topology cannot absorb the (2,2,*) rows.
    CHECK_THROWS_WITH_AS(count_onto(incomplete70().graph, ds70_a()),
                         doctest::Contains("no path"), DataError);
}
