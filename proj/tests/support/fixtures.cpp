#include "support/fixtures.hpp"

#include "apfa/merging.hpp"

namespace apfa::testing {

namespace {

std::vector<std::vector<std::int32_t>> repeat_rows(
    const std::vector<std::pair<std::vector<std::int32_t>, int>>& spec) {
    std::vector<std::vector<std::int32_t>> rows;
    for (const auto& [row, times] : spec)
        for (int i = 0; i < times; ++i) rows.push_back(row);
    return rows;
}

Edge edge(StateId s, StateId t, Symbol sym, double prob) {
    Edge e;
    e.source = s;
    e.target = t;
    e.symbol = sym;
    e.prob = prob;
    return e;
}

Edge edge(StateId s, StateId t, Symbol sym) {
    Edge e;
    e.source = s;
    e.target = t;
    e.symbol = sym;
    return e;
}

}  // namespace

Dataset ds70_a() {
    return dataset_from_rows(repeat_rows({
        {{1, 1, 1}, 2}, {{1, 1, 2}, 3}, {{1, 2, 1}, 9}, {{1, 2, 2}, 22},
        {{2, 1, 1}, 16}, {{2, 1, 2}, 16}, {{2, 2, 1}, 1}, {{2, 2, 2}, 1},
    }));
}

Dataset ds70_b() {
    return dataset_from_rows(
        repeat_rows({
            {{1, 1, 1}, 3}, {{1, 1, 2}, 2}, {{1, 2, 1}, 9}, {{1, 2, 2}, 22},
            {{2, 1, 1}, 17}, {{2, 1, 2}, 17},
        }),
        {2, 2, 2});
}

CountedApfa unrestricted70() { return sample_apfa(ds70_a()); }

CountedApfa merged70() {
    CountedApfa c = unrestricted70();
    return merge(c, level1_pair(c));
}

CountedApfa incomplete70() { return sample_apfa(ds70_b()); }

CountedApfa incomplete70_merged() {
    CountedApfa c = incomplete70();
    return merge(c, level1_pair(c));
}

std::vector<StateId> level1_pair(const CountedApfa& c) {
    return c.graph.states_at_level(1);
}

Apfa wheeze_model() {
    // Levels: root; {w1=1},{w1=2}; {11},{12,21},{22}; {111},{mixed},{222}; sink.
    std::vector<int> levels{0, 1, 1, 2, 2, 2, 3, 3, 3, 4};
    std::vector<Edge> edges{
        edge(0, 1, 1, 0.84), edge(0, 2, 2, 0.16),
        edge(1, 3, 1, 0.89), edge(1, 4, 2, 0.11),
        edge(2, 4, 1, 0.53), edge(2, 5, 2, 0.47),
        edge(3, 6, 1, 0.93), edge(3, 7, 2, 0.07),
        edge(4, 7, 1, 0.30), edge(4, 7, 2, 0.70),
        edge(5, 7, 1, 0.34), edge(5, 8, 2, 0.66),
        edge(6, 9, 1, 0.96), edge(6, 9, 2, 0.04),
        edge(7, 9, 1, 0.21), edge(7, 9, 2, 0.79),
        edge(8, 9, 1, 0.33), edge(8, 9, 2, 0.67),
    };
    return make_apfa(4, {2, 2, 2, 2}, std::move(levels), std::move(edges));
}

Apfa generator8() {
    std::vector<int> levels{0, 1, 1, 2, 2, 3, 3, 4};
    std::vector<Edge> edges{
        edge(0, 1, 1, 0.6), edge(0, 2, 2, 0.4),
        edge(1, 3, 1, 0.7), edge(1, 4, 2, 0.3),
        edge(2, 3, 1, 0.3), edge(2, 4, 2, 0.7),
        edge(3, 5, 1, 0.5), edge(3, 6, 2, 0.5),
        edge(4, 5, 1, 1.0),
        edge(5, 7, 1, 0.65), edge(5, 7, 2, 0.35),
        edge(6, 7, 1, 0.2), edge(6, 7, 2, 0.8),
    };
    return make_apfa(4, {2, 2, 2, 2}, std::move(levels), std::move(edges));
}

Apfa independence4() { return minimal_apfa({2, 2, 2, 2}); }

Apfa first_order5() {
    std::vector<int> levels{0, 1, 1, 2, 2, 3, 3, 4, 4, 5};
    std::vector<Edge> edges;
    edges.push_back(edge(0, 1, 1));
    edges.push_back(edge(0, 2, 2));
    for (int l = 1; l < 4; ++l) {
        const StateId a = static_cast<StateId>(2 * l - 1), b = a + 1;  // [x_l = 1], [x_l = 2]
        edges.push_back(edge(a, a + 2, 1));
        edges.push_back(edge(a, b + 2, 2));
        edges.push_back(edge(b, a + 2, 1));
        edges.push_back(edge(b, b + 2, 2));
    }
    edges.push_back(edge(7, 9, 1));
    edges.push_back(edge(7, 9, 2));
    edges.push_back(edge(8, 9, 1));
    edges.push_back(edge(8, 9, 2));
    return make_apfa(5, {2, 2, 2, 2, 2}, std::move(levels), std::move(edges));
}

Apfa second_order5() {
    // Levels 2..4 hold the four (x_{i-1}, x_i) classes in lexicographic
    // order: ids 3..6, 7..10, 11..14; root 0, level 1 {1,2}, sink 15.
    std::vector<int> levels{0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 5};
    std::vector<Edge> edges;
    edges.push_back(edge(0, 1, 1));
    edges.push_back(edge(0, 2, 2));
    // level 1: [a] --sigma--> (a, sigma)
    for (int a = 1; a <= 2; ++a)
        for (Symbol sigma = 1; sigma <= 2; ++sigma)
            edges.push_back(edge(a, static_cast<StateId>(3 + 2 * (a - 1) + (sigma - 1)), sigma));
    // levels 2 and 3: (a,b) --sigma--> (b, sigma)
    for (int base : {3, 7}) {
        for (int a = 1; a <= 2; ++a)
            for (int b = 1; b <= 2; ++b)
                for (Symbol sigma = 1; sigma <= 2; ++sigma) {
                    const StateId from = static_cast<StateId>(base + 2 * (a - 1) + (b - 1));
                    const StateId to =
                        static_cast<StateId>(base + 4 + 2 * (b - 1) + (sigma - 1));
                    edges.push_back(edge(from, to, sigma));
                }
    }
    for (StateId v = 11; v <= 14; ++v) {
        edges.push_back(edge(v, 15, 1));
        edges.push_back(edge(v, 15, 2));
    }
    return make_apfa(5, {2, 2, 2, 2, 2}, std::move(levels), std::move(edges));
}

Apfa vlmc5() {
    // Memory 1 after seeing x_i = 1, memory 2 after x_i = 2: levels 2..4
    // hold {x_i=1}, (1,2), (2,2) as ids 3..5, 6..8, 9..11.
    std::vector<int> levels{0, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5};
    std::vector<Edge> edges{
        edge(0, 1, 1), edge(0, 2, 2),
        edge(1, 3, 1), edge(1, 4, 2),
        edge(2, 3, 1), edge(2, 5, 2),
        edge(3, 6, 1), edge(3, 7, 2),
        edge(4, 6, 1), edge(4, 8, 2),
        edge(5, 6, 1), edge(5, 8, 2),
        edge(6, 9, 1), edge(6, 10, 2),
        edge(7, 9, 1), edge(7, 11, 2),
        edge(8, 9, 1), edge(8, 11, 2),
        edge(9, 12, 1), edge(9, 12, 2),
        edge(10, 12, 1), edge(10, 12, 2),
        edge(11, 12, 1), edge(11, 12, 2),
    };
    return make_apfa(5, {2, 2, 2, 2, 2}, std::move(levels), std::move(edges));
}

Apfa memory_gap3() {
    // X3 depends on X1 alone: level 2 keeps the level-1 split.
    std::vector<int> levels{0, 1, 1, 2, 2, 3};
    std::vector<Edge> edges{
        edge(0, 1, 1), edge(0, 2, 2),
        edge(1, 3, 1), edge(1, 3, 2),
        edge(2, 4, 1), edge(2, 4, 2),
        edge(3, 5, 1), edge(3, 5, 2),
        edge(4, 5, 1), edge(4, 5, 2),
    };
    return make_apfa(3, {2, 2, 2}, std::move(levels), std::move(edges));
}

}  // namespace apfa::testing
