#include "apfa/merging.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>

#include "apfa/errors.hpp"

namespace apfa {

namespace {

struct UnionFind {
    std::vector<StateId> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    StateId find(StateId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // Smaller id wins so the surviving identity is the minimum member.
    void unite(StateId a, StateId b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

std::vector<StateId> checked_seed(const Apfa& a, std::span<const StateId> seed) {
    std::vector<StateId> s(seed.begin(), seed.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.size() < 2) throw ModelError("merge: need at least two distinct states");
    for (StateId v : s)
        if (v < 0 || v >= a.num_states()) throw ModelError("merge: state id out of range");
    const int level = a.state_level[s.front()];
    for (StateId v : s)
        if (a.state_level[v] != level)
            throw ModelError("merge: states must share one level");
    if (level >= a.num_levels) throw ModelError("merge: cannot merge the sink level");
    if (level < 0) throw ModelError("merge: bad state level");
    return s;
}

/// Runs the cascade; returns the union-find and the groups (size >= 2),
/// ordered by (level, smallest member).
std::pair<UnionFind, std::vector<MergeGroup>> cascade(const Apfa& a,
                                                      std::span<const StateId> seed_in) {
    std::vector<StateId> seed = checked_seed(a, seed_in);
    UnionFind uf(a.num_states());
    for (std::size_t i = 1; i < seed.size(); ++i) uf.unite(seed[0], seed[i]);

    std::vector<MergeGroup> groups;
    std::vector<StateId> active = seed;  // states at the current level in nontrivial classes
    int level = a.state_level[seed.front()];

    while (!active.empty() && level < a.num_levels) {
        // Group the active states by class.
        std::sort(active.begin(), active.end());
        active.erase(std::unique(active.begin(), active.end()), active.end());
        std::unordered_map<StateId, std::vector<StateId>> classes;
        for (StateId v : active) classes[uf.find(v)].push_back(v);

        std::vector<StateId> next;
        for (auto& [rep, members] : classes) {
            if (members.size() < 2) continue;
            groups.push_back({level, members});
            if (level + 1 >= a.num_levels) continue;  // children are the sink
            // For every symbol, the targets reached from the members merge.
            std::vector<StateId> targets;
            const int k = a.alphabet_sizes[level];
            for (Symbol sigma = 1; sigma <= k; ++sigma) {
                targets.clear();
                for (StateId m : members) {
                    if (auto e = a.out_edge(m, sigma)) targets.push_back(a.edges[*e].target);
                }
                std::sort(targets.begin(), targets.end());
                targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
                if (targets.size() < 2) continue;
                for (std::size_t i = 1; i < targets.size(); ++i) uf.unite(targets[0], targets[i]);
                next.insert(next.end(), targets.begin(), targets.end());
            }
        }
        active = std::move(next);
        ++level;
    }

    std::sort(groups.begin(), groups.end(), [](const MergeGroup& x, const MergeGroup& y) {
        if (x.level != y.level) return x.level < y.level;
        return x.states.front() < y.states.front();
    });
    return {std::move(uf), std::move(groups)};
}

}  // namespace

MergeList merge_list(const Apfa& a, std::span<const StateId> seed) {
    return {cascade(a, seed).second};
}

std::pair<Apfa, std::vector<StateId>> merge_with_map(const Apfa& a,
                                                     std::span<const StateId> seed) {
    auto [uf, groups] = cascade(a, seed);

    // New ids: classes keyed by smallest member, dense level-major. Since
    // ids within a level keep their relative order and class representatives
    // are minima, ranking representatives preserves determinism.
    const int v_count = a.num_states();
    std::vector<StateId> rep(v_count);
    for (StateId v = 0; v < v_count; ++v) rep[v] = uf.find(v);

    std::vector<StateId> new_id(v_count, kNoState);
    std::vector<int> per_level(a.num_levels + 2, 0);
    for (StateId v = 0; v < v_count; ++v)
        if (rep[v] == v) ++per_level[a.state_level[v] + 1];
    for (int l = 0; l <= a.num_levels; ++l) per_level[l + 1] += per_level[l];
    {
        std::vector<int> cursor(per_level.begin(), per_level.end());
        for (StateId v = 0; v < v_count; ++v)
            if (rep[v] == v) new_id[v] = cursor[a.state_level[v]]++;
    }

    Apfa out;
    out.num_levels = a.num_levels;
    out.alphabet_sizes = a.alphabet_sizes;
    out.state_level.resize(per_level[a.num_levels + 1]);
    for (StateId v = 0; v < v_count; ++v)
        if (rep[v] == v) out.state_level[new_id[v]] = a.state_level[v];

    // Fuse edges per (class, symbol), iterating members in id order so the
    // per-symbol slots come out deterministic.
    std::vector<std::vector<StateId>> members(v_count);
    for (StateId v = 0; v < v_count; ++v) members[rep[v]].push_back(v);

    out.edges.reserve(a.edges.size());
    for (StateId r = 0; r < v_count; ++r) {
        if (members[r].empty() || a.state_level[r] >= a.num_levels) continue;
        const int k = a.alphabet_sizes[a.state_level[r]];
        // slot per symbol: index into out.edges, or -1
        std::vector<int> slot(k + 1, -1);
        for (StateId m : members[r]) {
            for (const Edge& e : a.out_edges(m)) {
                const StateId t = new_id[rep[e.target]];
                if (slot[e.symbol] < 0) {
                    Edge merged = e;
                    merged.source = new_id[r];
                    merged.target = t;
                    merged.prob = std::numeric_limits<double>::quiet_NaN();
                    slot[e.symbol] = static_cast<int>(out.edges.size());
                    out.edges.push_back(merged);
                } else {
                    Edge& merged = out.edges[slot[e.symbol]];
                    assert(merged.target == t);
                    if (merged.has_count() && e.has_count()) merged.count += e.count;
                    else merged.count = kNoCount;
                    merged.synthetic = merged.synthetic && e.synthetic;
                }
            }
        }
    }
    out.reindex();
    // Map every old state (not only representatives) to its fused id.
    std::vector<StateId> map(v_count);
    for (StateId v = 0; v < v_count; ++v) map[v] = new_id[rep[v]];
    return {std::move(out), std::move(map)};
}

Apfa merge(const Apfa& a, std::span<const StateId> seed) {
    return merge_with_map(a, seed).first;
}

CountedApfa merge(const CountedApfa& c, std::span<const StateId> seed) {
    return make_counted(merge(c.graph, seed));
}

std::vector<MergeGroup> SubmodelPartition::nontrivial_blocks() const {
    std::vector<MergeGroup> out;
    for (std::size_t l = 0; l < levels.size(); ++l)
        for (const auto& block : levels[l])
            if (block.size() >= 2) out.push_back({static_cast<int>(l), block});
    return out;
}

std::optional<SubmodelPartition> submodel_partition(const Apfa& a, const Apfa& a0) {
    if (a.num_levels != a0.num_levels || a.alphabet_sizes != a0.alphabet_sizes)
        throw ModelError("submodel_partition: incompatible shapes");

    const StateId root = a.root(), root0 = a0.root();
    if (root == kNoState || root0 == kNoState)
        throw ModelError("submodel_partition: missing root");

    std::vector<StateId> map(a.num_states(), kNoState);
    map[root] = root0;
    // States are level-major in library-produced graphs, but walk explicitly
    // level by level to stay order-independent.
    std::vector<StateId> frontier{root};
    while (!frontier.empty()) {
        std::vector<StateId> next;
        for (StateId v : frontier) {
            const StateId w = map[v];
            for (const Edge& e : a.out_edges(v)) {
                auto f = a0.out_edge(w, e.symbol);
                if (!f) return std::nullopt;  // a0 lacks a transition a has
                const StateId y = a0.edges[*f].target;
                if (map[e.target] == kNoState) {
                    map[e.target] = y;
                    next.push_back(e.target);
                } else if (map[e.target] != y) {
                    return std::nullopt;  // conflicting correspondence
                }
            }
        }
        frontier = std::move(next);
    }

    // Every a0 state must be covered and, for the models (not just the
    // graphs) to be nested, merging must not enlarge the sample space: each
    // state must offer exactly the out-symbols of its image.
    std::vector<bool> covered(a0.num_states(), false);
    for (StateId v = 0; v < a.num_states(); ++v) {
        if (map[v] == kNoState) return std::nullopt;  // unreachable state (invalid input)
        covered[map[v]] = true;
        if (a.out_degree(v) != a0.out_degree(map[v])) return std::nullopt;
    }
    for (bool c : covered)
        if (!c) return std::nullopt;

    SubmodelPartition part;
    part.state_map = map;
    part.levels.assign(a.num_levels + 1, {});
    std::unordered_map<StateId, std::vector<StateId>> blocks;
    for (StateId v = 0; v < a.num_states(); ++v) blocks[map[v]].push_back(v);
    std::vector<StateId> images;
    images.reserve(blocks.size());
    for (auto& [w, block] : blocks) images.push_back(w);
    std::sort(images.begin(), images.end());
    for (StateId w : images) {
        auto& block = blocks[w];
        std::sort(block.begin(), block.end());
        part.levels[a0.state_level[w]].push_back(std::move(block));
    }
    return part;
}

NestingEvidence check_nesting(const CountedApfa& c, std::span<const StateId> seed,
                              int max_new_states) {
    const CountedApfa completed = make_counted(complete(c.graph, max_new_states));
    const CountedApfa left = merge(completed, seed);                        // (A+)^m
    const CountedApfa right = make_counted(complete(merge(c, seed).graph,  // (A^m)+
                                                    max_new_states));

    auto [canon_left, map_left] = canonical_form(left.graph);
    auto [canon_right, map_right] = canonical_form(right.graph);

    NestingEvidence ev;
    StructuralEq opts;
    opts.counts = true;
    opts.synthetic = true;
    ev.isomorphic = structurally_equal(canon_left, canon_right, opts);
    if (ev.isomorphic) {
        std::vector<StateId> inverse_right(canon_right.num_states(), kNoState);
        for (StateId v = 0; v < right.graph.num_states(); ++v) inverse_right[map_right[v]] = v;
        ev.witness.reserve(left.graph.num_states());
        for (StateId v = 0; v < left.graph.num_states(); ++v)
            ev.witness.emplace_back(v, inverse_right[map_left[v]]);
    }
    return ev;
}

}  // namespace apfa
