#include "apfa/equivalence.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "apfa/errors.hpp"

namespace apfa {

std::string IndependenceStatement::to_string() const {
    auto var_list = [](int from, int to) {
        std::ostringstream os;
        if (from == to) { os << 'X' << from; return os.str(); }
        os << '(';
        for (int v = from; v <= to; ++v) {
            if (v > from) os << ',';
            os << 'X' << v;
        }
        os << ')';
        return os.str();
    };
    std::ostringstream os;
    os << var_list(level + 1, total_levels) << " _||_ " << var_list(1, level);
    if (kind == Kind::context_specific) {
        os << " | " << var_list(1, level) << " in {";
        for (std::size_t k = 0; k < context.size(); ++k) {
            if (k) os << ", ";
            os << '(';
            for (std::size_t j = 0; j < context[k].size(); ++j) {
                if (j) os << ',';
                os << context[k][j];
            }
            os << ')';
        }
        os << '}';
    }
    return os.str();
}

std::vector<std::vector<Outcome>> contexts_by_state(const Apfa& a, std::size_t max_total) {
    require_valid(a, "contexts_by_state");
    std::vector<std::vector<Outcome>> ctx(a.num_states());
    ctx[a.root()].push_back({});
    std::size_t total = 1;
    for (int level = 0; level < a.num_levels; ++level) {
        for (StateId v : a.states_at_level(level)) {
            for (const Edge& e : a.out_edges(v)) {
                total += ctx[v].size();
                if (total > max_total)
                    throw ModelError("contexts_by_state: too many root paths");
                for (const Outcome& prefix : ctx[v]) {
                    Outcome extended = prefix;
                    extended.push_back(e.symbol);
                    ctx[e.target].push_back(std::move(extended));
                }
            }
        }
    }
    return ctx;
}

std::vector<IndependenceStatement> extract_statements(const Apfa& a) {
    const auto ctx = contexts_by_state(a);
    std::vector<IndependenceStatement> out;
    for (int level = 1; level < a.num_levels; ++level) {
        const std::vector<StateId> states = a.states_at_level(level);
        if (states.size() == 1) {
            IndependenceStatement s;
            s.kind = IndependenceStatement::Kind::marginal;
            s.level = level;
            s.total_levels = a.num_levels;
            s.state = states.front();
            out.push_back(std::move(s));
            continue;
        }
        for (StateId w : states) {
            if (ctx[w].size() < 2) continue;  // single-path contexts carry no content
            IndependenceStatement s;
            s.kind = IndependenceStatement::Kind::context_specific;
            s.level = level;
            s.total_levels = a.num_levels;
            s.state = w;
            s.context = ctx[w];
            std::sort(s.context.begin(), s.context.end());
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::optional<std::vector<std::vector<int>>> property_q(const Apfa& a) {
    const auto ctx = contexts_by_state(a);
    std::vector<std::vector<int>> result;
    for (int level = 1; level < a.num_levels; ++level) {
        const std::vector<StateId> states = a.states_at_level(level);
        // Candidate coordinates: constant within every state's context set.
        std::vector<int> constant;
        for (int j = 0; j < level; ++j) {
            bool ok = true;
            for (StateId w : states) {
                const Symbol first = ctx[w].front()[j];
                for (const Outcome& x : ctx[w])
                    if (x[j] != first) { ok = false; break; }
                if (!ok) break;
            }
            if (ok) constant.push_back(j + 1);  // 1-based variable index
        }
        // Distinct states must carry distinct signatures, otherwise two
        // states share every candidate value and no A(i) separates them.
        std::map<Outcome, int> seen;
        bool distinct = true;
        for (StateId w : states) {
            Outcome sig;
            for (int j : constant) sig.push_back(ctx[w].front()[j - 1]);
            if (!seen.emplace(sig, w).second) { distinct = false; break; }
        }
        if (!distinct) return std::nullopt;
        result.push_back(std::move(constant));
    }
    return result;
}

Dag Dag::empty(int n) {
    Dag g;
    g.n = n;
    g.parents.assign(n + 1, {});
    return g;
}

UndirectedGraph UndirectedGraph::empty(int n) {
    UndirectedGraph u;
    u.n = n;
    u.adj.assign(n + 1, {});
    return u;
}

void UndirectedGraph::add_edge(int a, int b) {
    if (a == b || a < 1 || b < 1 || a > n || b > n)
        throw ModelError("UndirectedGraph: bad edge");
    auto insert = [](std::vector<int>& v, int x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it == v.end() || *it != x) v.insert(it, x);
    };
    insert(adj[a], b);
    insert(adj[b], a);
}

Dag apfa_to_dag(const Apfa& a) {
    auto q = property_q(a);
    if (!q) throw ModelError("apfa_to_dag: property Q absent");
    Dag g = Dag::empty(a.num_levels);
    for (int i = 2; i <= g.n; ++i) g.parents[i] = (*q)[i - 2];  // pa(i) = A(i-1)
    return g;
}

Apfa dag_to_apfa(const Dag& g, const std::vector<int>& alphabet_sizes) {
    const int p = g.n;
    if (p < 1) throw ModelError("dag_to_apfa: empty graph");
    if (static_cast<int>(alphabet_sizes.size()) != p)
        throw ModelError("dag_to_apfa: alphabet count differs from variable count");
    if (static_cast<int>(g.parents.size()) != p + 1)
        throw ModelError("dag_to_apfa: malformed parent sets");

    for (int i = 1; i <= p; ++i) {
        for (int j : g.parents[i])
            if (j < 1 || j >= i)
                throw ModelError("dag_to_apfa: parent of " + std::to_string(i) +
                                 " violates the variable order");
        if (i >= 2) {
            std::vector<int> allowed = i >= 2 ? g.parents[i - 1] : std::vector<int>{};
            allowed.push_back(i - 1);
            std::sort(allowed.begin(), allowed.end());
            for (int j : g.parents[i])
                if (!std::binary_search(allowed.begin(), allowed.end(), j))
                    throw ModelError(
                        "dag_to_apfa: no equivalent automaton, pa(" + std::to_string(i) +
                        ") is not contained in pa(" + std::to_string(i - 1) + ") + {" +
                        std::to_string(i - 1) + "}");
        }
    }

    // A(i) = pa(i+1) for internal levels; level-i states are value classes
    // of x_{A(i)}, ordered lexicographically.
    std::vector<std::vector<int>> memory(p);  // memory[i] = A(i), memory[0] unused
    for (int i = 1; i < p; ++i) memory[i] = g.parents[i + 1];

    std::vector<long long> level_count(p + 1, 1);
    for (int i = 1; i < p; ++i) {
        long long states = 1;
        for (int j : memory[i]) states *= alphabet_sizes[j - 1];
        level_count[i] = states;
    }
    std::vector<long long> offset(p + 2, 0);
    for (int i = 0; i <= p; ++i) offset[i + 1] = offset[i] + level_count[i];

    Apfa a;
    a.num_levels = p;
    a.alphabet_sizes = alphabet_sizes;
    a.state_level.resize(static_cast<std::size_t>(offset[p + 1]));
    for (int i = 0; i <= p; ++i)
        for (long long r = offset[i]; r < offset[i + 1]; ++r)
            a.state_level[static_cast<std::size_t>(r)] = i;

    // Rank of a value tuple over A(i) in lexicographic order.
    auto rank_of = [&](int i, const std::vector<Symbol>& values) {
        long long r = 0;
        for (std::size_t k = 0; k < memory[i].size(); ++k)
            r = r * alphabet_sizes[memory[i][k] - 1] + (values[k] - 1);
        return r;
    };
    // Enumerates value tuples over A(i).
    auto tuples_of = [&](int i) {
        std::vector<std::vector<Symbol>> out{{}};
        for (int j : memory[i]) {
            std::vector<std::vector<Symbol>> next;
            for (const auto& t : out)
                for (Symbol s = 1; s <= alphabet_sizes[j - 1]; ++s) {
                    auto u = t;
                    u.push_back(s);
                    next.push_back(std::move(u));
                }
            out = std::move(next);
        }
        return out;
    };

    for (int i = 0; i < p; ++i) {
        const auto source_tuples = i == 0 ? std::vector<std::vector<Symbol>>{{}} : tuples_of(i);
        for (const auto& t : source_tuples) {
            const StateId from = static_cast<StateId>(offset[i] + (i == 0 ? 0 : rank_of(i, t)));
            for (Symbol sigma = 1; sigma <= alphabet_sizes[i]; ++sigma) {
                StateId to;
                if (i + 1 == p) {
                    to = static_cast<StateId>(offset[p]);
                } else {
                    std::vector<Symbol> target_values;
                    target_values.reserve(memory[i + 1].size());
                    for (int j : memory[i + 1]) {
                        if (j == i + 1) {
                            target_values.push_back(sigma);
                        } else {
                            const auto pos = std::find(memory[i].begin(), memory[i].end(), j);
                            target_values.push_back(t[pos - memory[i].begin()]);
                        }
                    }
                    to = static_cast<StateId>(offset[i + 1] + rank_of(i + 1, target_values));
                }
                Edge e;
                e.source = from;
                e.target = to;
                e.symbol = sigma;
                a.edges.push_back(e);
            }
        }
    }
    a.reindex();
    return a;
}

Apfa ug_to_apfa(const UndirectedGraph& u, const std::vector<int>& alphabet_sizes) {
    Dag g = Dag::empty(u.n);
    for (int i = 1; i <= u.n; ++i)
        for (int j : u.adj[i])
            if (j < i) g.parents[i].push_back(j);
    return dag_to_apfa(g, alphabet_sizes);
}

}  // namespace apfa
