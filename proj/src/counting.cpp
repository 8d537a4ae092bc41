#include "apfa/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apfa/errors.hpp"

namespace apfa {

CountedApfa make_counted(Apfa graph) {
    if (!graph.has_counts()) throw ModelError("make_counted: edge counts unset");
    CountedApfa c;
    c.graph = std::move(graph);
    const Apfa& g = c.graph;
    c.node_counts.assign(g.num_states(), 0);
    for (const Edge& e : g.edges) {
        if (e.count < 0) throw ModelError("make_counted: negative edge count");
        c.node_counts[e.target] += e.count;
    }
    const StateId root = g.root();
    if (root == kNoState) throw ModelError("make_counted: no root");
    Count root_out = 0;
    for (const Edge& e : g.out_edges(root)) root_out += e.count;
    c.node_counts[root] = root_out;
    c.total = root_out;
    for (StateId v = 0; v < g.num_states(); ++v) {
        if (g.state_level[v] >= g.num_levels) continue;
        Count out = 0;
        for (const Edge& e : g.out_edges(v)) out += e.count;
        if (out != c.node_counts[v])
            throw ModelError("make_counted: counts at state " + std::to_string(v) +
                             " do not telescope (in " + std::to_string(c.node_counts[v]) +
                             ", out " + std::to_string(out) + ")");
    }
    return c;
}

namespace {

CountedApfa build_from_rows(const Dataset& d, bool contract_leaves) {
    if (d.size() < 1) throw DataError("empty dataset");
    const int p = d.width();
    if (p < 1) throw DataError("dataset has no columns");

    // Sorting groups duplicate rows and makes trie construction a single
    // pass over shared prefixes.
    std::vector<std::size_t> order(d.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d.rows[a] < d.rows[b];
    });

    // Trie states created in depth-first (lexicographic) order, renumbered
    // level-major below.
    struct Node { int level; };
    std::vector<Node> nodes{{0}};
    std::vector<Edge> edges;                 // trie edges, target ids provisional
    std::vector<std::vector<EdgeId>> out{{}};  // per provisional node

    std::vector<StateId> stack(p + 1, 0);  // stack[q] = node for current prefix of length q
    const std::vector<std::int32_t>* prev = nullptr;
    for (std::size_t idx : order) {
        const auto& row = d.rows[idx];
        int q = 0;
        if (prev) {
            while (q < p && (*prev)[q] == row[q]) ++q;
        }
        for (int i = q; i < p; ++i) {
            const StateId parent = stack[i];
            // Rows are sorted, so at the branch point the symbol is either
            // brand new or equal to the last edge added under this parent.
            if (!out[parent].empty() && edges[out[parent].back()].symbol == row[i]) {
                stack[i + 1] = edges[out[parent].back()].target;
                continue;
            }
            const StateId child = static_cast<StateId>(nodes.size());
            nodes.push_back({i + 1});
            out.emplace_back();
            Edge e;
            e.source = parent;
            e.target = child;
            e.symbol = row[i];
            e.count = 0;
            out[parent].push_back(static_cast<EdgeId>(edges.size()));
            edges.push_back(e);
            stack[i + 1] = child;
        }
        // Re-walk the full path to bump counts (q may skip shared prefix).
        StateId cur = 0;
        for (int i = 0; i < p; ++i) {
            auto& adj = out[cur];
            EdgeId eid = adj.back();
            if (edges[eid].symbol != row[i]) {
                // shared prefix: the edge is not the last-added one
                for (EdgeId cand : adj)
                    if (edges[cand].symbol == row[i]) { eid = cand; break; }
            }
            ++edges[eid].count;
            cur = edges[eid].target;
        }
        prev = &d.rows[idx];
    }

    // Level-major renumbering; DFS creation order is already lexicographic
    // within a level once grouped.
    const int v_count = static_cast<int>(nodes.size());
    std::vector<int> per_level(p + 2, 0);
    for (const Node& n : nodes) ++per_level[n.level + 1];
    for (int l = 0; l <= p; ++l) per_level[l + 1] += per_level[l];
    std::vector<StateId> new_id(v_count);
    {
        std::vector<int> cursor(per_level.begin(), per_level.end());
        for (int v = 0; v < v_count; ++v) new_id[v] = cursor[nodes[v].level]++;
    }

    Apfa g;
    g.num_levels = p;
    g.alphabet_sizes = d.alphabet_sizes;

    if (contract_leaves) {
        // All level-p leaves become one sink with the smallest level-p id.
        const StateId sink = per_level[p];
        g.state_level.assign(sink + 1, 0);
        for (int v = 0; v < v_count; ++v) {
            StateId nv = std::min(new_id[v], sink);
            g.state_level[nv] = nodes[v].level;
        }
        g.state_level[sink] = p;
        for (Edge e : edges) {
            e.source = std::min(new_id[e.source], sink);
            e.target = std::min(new_id[e.target], sink);
            g.edges.push_back(e);
        }
    } else {
        g.state_level.resize(v_count);
        for (int v = 0; v < v_count; ++v) g.state_level[new_id[v]] = nodes[v].level;
        for (Edge e : edges) {
            e.source = new_id[e.source];
            e.target = new_id[e.target];
            g.edges.push_back(e);
        }
    }
    g.reindex();
    return make_counted(std::move(g));
}

}  // namespace

CountedApfa sample_tree(const Dataset& d) { return build_from_rows(d, false); }

CountedApfa sample_apfa(const Dataset& d) { return build_from_rows(d, true); }

CountedApfa count_onto(const Apfa& topology, const Dataset& d) {
    if (static_cast<int>(d.width()) != topology.num_levels)
        throw DataError("count_onto: dataset width differs from model levels");
    Apfa g = topology;
    for (Edge& e : g.edges) e.count = 0;
    g.reindex();

    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        StateId cur = g.root();
        for (int i = 0; i < g.num_levels; ++i) {
            auto eid = g.out_edge(cur, d.rows[k][i]);
            if (!eid)
                throw DataError("row " + std::to_string(k + 1) +
                                ": no path through the model (symbol " +
                                std::to_string(d.rows[k][i]) + " at position " +
                                std::to_string(i + 1) + ")");
            ++g.edges[*eid].count;
            cur = g.edges[*eid].target;
        }
    }
    return make_counted(std::move(g));
}

double counted_log_lik(const CountedApfa& c) {
    double ll = 0.0;
    for (const Edge& e : c.graph.edges) {
        if (e.count > 0)
            ll += static_cast<double>(e.count) *
                  std::log(static_cast<double>(e.count) /
                           static_cast<double>(c.node_counts[e.source]));
    }
    return ll;
}

}  // namespace apfa
