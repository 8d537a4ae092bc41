#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "apfa/errors.hpp"
#include "apfa/estimation.hpp"
#include "apfa/merging.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace apfa;
using namespace apfa::testing;

TEST_CASE("validate accepts the eight-state generator") {
    CHECK(validate(generator8()).ok());
    CHECK(validate(wheeze_model()).ok());
    CHECK(validate(unrestricted70().graph).ok());
}

TEST_CASE("validate flags a self-loop singleton") {
    Edge loop;
    loop.source = 0;
    loop.target = 0;
    loop.symbol = 1;
    Apfa a = make_apfa(1, {1}, {0}, {loop});
    ValidationReport r = validate(a);
    CHECK(!r.ok());
    CHECK(r.has(ValidationIssue::Code::not_levelled));
    CHECK(r.has(ValidationIssue::Code::root_violation));
    CHECK(r.has(ValidationIssue::Code::sink_violation));
}

TEST_CASE("validate flags a broken probability sum") {
    Apfa a = generator8();
    a.edges[0].prob = 0.59;  // root edges now sum to 0.99
    a.reindex();
    ValidationReport r = validate(a);
    REQUIRE(!r.ok());
    CHECK(r.has(ValidationIssue::Code::prob_sum));
    CHECK(r.issues.size() == 1);
    CHECK(r.issues[0].state == a.root());
}

TEST_CASE("completeness of the golden models") {
    CHECK(is_complete(unrestricted70().graph));
    CHECK(!is_complete(incomplete70().graph));  // one level-1 state lacks symbol 2
    CHECK(is_complete(minimal_apfa({2, 3, 2})));
    CHECK(is_complete(maximal_apfa({2, 2, 2})));
    CHECK(!is_complete(generator8()));
}

TEST_CASE("completion fills the incomplete sample automaton") {
    const Apfa plus = complete(incomplete70().graph, 100);
    CHECK(validate(plus).ok());
    CHECK(is_complete(plus));
    // Same topology as the complete unrestricted model.
    StructuralEq topo;
    CHECK(isomorphic(plus, unrestricted70().graph, topo));
    // Added edges carry zero counts; real counts survive.
    Count zero_edges = 0, total = 0;
    for (const Edge& e : plus.edges) {
        if (e.synthetic) {
            CHECK(e.count == 0);
            ++zero_edges;
        }
        if (plus.state_level[e.target] == plus.num_levels) total += e.count;
    }
    CHECK(zero_edges == 3);  // missing symbol-2 edge plus the two below it
    CHECK(total == 70);
}

TEST_CASE("completion is idempotent on complete inputs") {
    const Apfa base = unrestricted70().graph;
    const Apfa plus = complete(base, 100);
    StructuralEq all;
    all.counts = true;
    all.synthetic = true;
    CHECK(structurally_equal(base, plus, all));
}

TEST_CASE("completion of a one-row sample tree is the full binary tree") {
    const Dataset d = dataset_from_rows({{1, 2, 1}}, {2, 2, 2});
    const Apfa plus = complete(sample_apfa(d).graph, 100);
    CHECK(is_complete(plus));
    CHECK(plus.num_states() == 1 + 2 + 4 + 1);
    // Oracle: every one of the 2^3 outcomes must have a path.
    for (const Outcome& x : enumerate_outcomes({2, 2, 2})) CHECK(path_for(plus, x).has_value());
}

TEST_CASE("completion size guard trips") {
    const Dataset d = dataset_from_rows(
        {{1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, {2, 2, 2, 2, 2, 2, 2, 2, 2, 2}});
    CHECK_THROWS_AS(complete(sample_apfa(d).graph, 5), ModelError);
}

TEST_CASE("maximal and minimal constructions") {
    const Apfa maximal = maximal_apfa({2, 2, 2});
    CHECK(validate(maximal).ok());
    CHECK(is_complete(maximal));
    CHECK(maximal.states_at_level(0).size() == 1);
    CHECK(maximal.states_at_level(1).size() == 2);
    CHECK(maximal.states_at_level(2).size() == 4);
    CHECK(maximal.states_at_level(3).size() == 1);
    CHECK(dimension(maximal) == 7);

    const Apfa minimal = minimal_apfa({2, 2, 2});
    CHECK(validate(minimal).ok());
    CHECK(is_complete(minimal));
    CHECK(minimal.num_states() == 4);
    CHECK(dimension(minimal) == 3);

    SUBCASE("single level: k parallel edges") {
        const Apfa one_max = maximal_apfa({4});
        const Apfa one_min = minimal_apfa({4});
        StructuralEq topo;
        CHECK(structurally_equal(one_max, one_min, topo));
        CHECK(one_max.num_states() == 2);
        CHECK(one_max.num_edges() == 4);
    }

    SUBCASE("dimension identities") {
        for (std::vector<int> alphabets :
             {std::vector<int>{2, 2, 2}, std::vector<int>{3, 2, 4}, std::vector<int>{2, 3}}) {
            long long product = 1;
            int sum = 0;
            for (int k : alphabets) {
                product *= k;
                sum += k - 1;
            }
            CHECK(dimension(maximal_apfa(alphabets)) == product - 1);
            CHECK(dimension(minimal_apfa(alphabets)) == sum);
        }
    }
}

TEST_CASE("path_for walks the golden counts") {
    const CountedApfa c = unrestricted70();
    auto path = path_for(c.graph, {2, 2, 1});
    REQUIRE(path.has_value());
    REQUIRE(path->size() == 3);
    CHECK(c.graph.edges[(*path)[0]].count == 34);
    CHECK(c.graph.edges[(*path)[1]].count == 2);
    CHECK(c.graph.edges[(*path)[2]].count == 1);

    SUBCASE("absent continuation") {
        // The incomplete model has no symbol-2 edge out of the x1=2 state.
        CHECK(!path_for(incomplete70().graph, {2, 2, 1}).has_value());
        CHECK(!path_for(incomplete70().graph, {2, 3, 1}).has_value());
    }

    SUBCASE("minimal model reaches the whole product space") {
        const Apfa minimal = minimal_apfa({2, 3, 2});
        for (const Outcome& x : enumerate_outcomes({2, 3, 2}))
            CHECK(path_for(minimal, x).has_value());
    }

    SUBCASE("distinct outcomes take distinct paths") {
        const Apfa g = generator8();
        std::set<std::vector<EdgeId>> paths;
        int present = 0;
        for (const Outcome& x : enumerate_outcomes({2, 2, 2, 2})) {
            if (auto p = path_for(g, x)) {
                paths.insert(*p);
                ++present;
            }
        }
        CHECK(present == 12);  // x2 = 2 forces x3 = 1
        CHECK(static_cast<int>(paths.size()) == present);
    }
}

TEST_CASE("probability_of multiplies edge probabilities") {
    const Apfa w = wheeze_model();
    CHECK(probability_of(w, {2, 2, 2, 2}) == doctest::Approx(0.16 * 0.47 * 0.66 * 0.67).epsilon(1e-12));
    CHECK(probability_of(generator8(), {2, 2, 2, 1}) == 0.0);

    SUBCASE("unset probabilities rejected") {
        CHECK_THROWS_AS(probability_of(unrestricted70().graph, {1, 1, 1}), ModelError);
    }

    SUBCASE("total mass one on the fitted unrestricted model") {
        const FittedApfa f = fit_mle(unrestricted70());
        double total = 0.0;
        for (const Outcome& x : enumerate_outcomes({2, 2, 2}))
            total += probability_of(f.counted.graph, x);
        CHECK(std::abs(total - 1.0) < 1e-9);
    }

    SUBCASE("total mass one across random fitted models") {
        std::mt19937_64 rng(20240811);
        for (int rep = 0; rep < 20; ++rep) {
            const Dataset d = random_dataset(rng, 5, 3, 200);
            const FittedApfa f = fit_mle(sample_apfa(d));
            const Apfa plus = complete(f.counted.graph, 100000);
            double total = 0.0;
            for (const Outcome& x : enumerate_outcomes(d.alphabet_sizes))
                total += probability_of(plus, x);
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }

    SUBCASE("exhaustive mass check at twelve binary levels") {
        std::vector<int> alphabets(12, 2);
        Apfa minimal = minimal_apfa(alphabets);
        for (Edge& e : minimal.edges) e.prob = e.symbol == 1 ? 0.37 : 0.63;
        minimal.reindex();
        double total = 0.0;
        for (const Outcome& x : enumerate_outcomes(alphabets))
            total += probability_of(minimal, x);
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("simulate is deterministic and honours the distribution") {
    SUBCASE("empty run") { CHECK(simulate(generator8(), 0, 7).size() == 0); }

    SUBCASE("degenerate distribution") {
        Apfa m = minimal_apfa({2, 2, 2});
        for (Edge& e : m.edges) e.prob = e.symbol == 2 ? 1.0 : 0.0;
        m.reindex();
        const Dataset d = simulate(m, 25, 99);
        for (const auto& row : d.rows) CHECK(row == std::vector<std::int32_t>{2, 2, 2});
    }

    SUBCASE("seed determinism") {
        const Dataset a = simulate(generator8(), 500, 42);
        const Dataset b = simulate(generator8(), 500, 42);
        const Dataset c = simulate(generator8(), 500, 43);
        CHECK(a.rows == b.rows);
        CHECK(a.rows != c.rows);
    }

    SUBCASE("first-symbol frequency within three standard errors") {
        const Count n = 100000;
        const Dataset d = simulate(generator8(), n, 4242);
        Count twos = 0;
        for (const auto& row : d.rows) twos += row[0] == 2;
        const double phat = static_cast<double>(twos) / static_cast<double>(n);
        const double se = std::sqrt(0.4 * 0.6 / static_cast<double>(n));
        CHECK(std::abs(phat - 0.4) < 3.0 * se);
    }

    SUBCASE("unset probabilities rejected") {
        CHECK_THROWS_AS(simulate(unrestricted70().graph, 5, 1), ModelError);
    }
}

TEST_CASE("canonical form identifies isomorphic relabelings") {
    Apfa g = generator8();
    // Swap the two level-1 state ids (1 and 2) by hand.
    Apfa swapped = g;
    for (Edge& e : swapped.edges) {
        if (e.source == 1) e.source = 2; else if (e.source == 2) e.source = 1;
        if (e.target == 1) e.target = 2; else if (e.target == 2) e.target = 1;
    }
    std::swap(swapped.state_level[1], swapped.state_level[2]);
    swapped.reindex();
    // The graphs differ edge-by-edge but are isomorphic; probabilities ride along.
    StructuralEq with_probs;
    with_probs.probs = true;
    with_probs.prob_tol = 0.0;
    CHECK(!structurally_equal(g, swapped, with_probs));
    CHECK(isomorphic(g, swapped, with_probs));
}

TEST_CASE("random sample automata validate and complete cleanly") {
    std::mt19937_64 rng(555);
    for (int rep = 0; rep < 25; ++rep) {
        const Dataset d = random_dataset(rng, 5, 3, 120);
        const CountedApfa c = sample_apfa(d);
        CHECK(validate(c.graph).ok());
        const Apfa plus = complete(c.graph, 1 << 16);
        CHECK(validate(plus).ok());
        CHECK(is_complete(plus));
        StructuralEq all;
        all.counts = true;
        all.synthetic = true;
        CHECK(structurally_equal(plus, complete(plus, 1 << 16), all));
    }
}
