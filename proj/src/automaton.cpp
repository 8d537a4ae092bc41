#include "apfa/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "apfa/dataset.hpp"
#include "apfa/errors.hpp"

namespace apfa {

namespace {
constexpr double kProbSumTol = 1e-12;
}

void Apfa::reindex() {
    const int v_count = num_states();
    // Out-of-range sources sort past every valid one so the CSR stays sound
    // even for graphs that validate() will reject.
    auto source_key = [v_count](const Edge& e) {
        return (e.source < 0 || e.source >= v_count) ? v_count : e.source;
    };
    std::stable_sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
        if (source_key(a) != source_key(b)) return source_key(a) < source_key(b);
        return a.symbol < b.symbol;
    });
    out_offset.assign(v_count + 1, 0);
    for (const Edge& e : edges) {
        if (e.source >= 0 && e.source < v_count) ++out_offset[e.source + 1];
    }
    for (int v = 0; v < v_count; ++v) out_offset[v + 1] += out_offset[v];

    level_begin.clear();
    bool level_major = true;
    for (int v = 0; v + 1 < v_count; ++v) {
        if (state_level[v] > state_level[v + 1]) { level_major = false; break; }
    }
    if (level_major && v_count > 0 && state_level.front() >= 0 &&
        state_level.back() <= num_levels) {
        level_begin.assign(num_levels + 2, 0);
        for (int v = 0; v < v_count; ++v) ++level_begin[state_level[v] + 1];
        for (int l = 0; l <= num_levels; ++l) level_begin[l + 1] += level_begin[l];
    }
}

std::optional<EdgeId> Apfa::out_edge(StateId v, Symbol sigma) const {
    EdgeId lo = out_offset[v], hi = out_offset[v + 1];
    while (lo < hi) {
        EdgeId mid = lo + (hi - lo) / 2;
        if (edges[mid].symbol < sigma) lo = mid + 1; else hi = mid;
    }
    if (lo < out_offset[v + 1] && edges[lo].symbol == sigma) return lo;
    return std::nullopt;
}

StateId Apfa::root() const {
    if (level_major()) return level_begin[1] > level_begin[0] ? level_begin[0] : kNoState;
    for (int v = 0; v < num_states(); ++v)
        if (state_level[v] == 0) return v;
    return kNoState;
}

StateId Apfa::sink() const {
    if (level_major())
        return level_begin[num_levels + 1] > level_begin[num_levels] ? level_begin[num_levels]
                                                                     : kNoState;
    for (int v = 0; v < num_states(); ++v)
        if (state_level[v] == num_levels) return v;
    return kNoState;
}

std::vector<StateId> Apfa::states_at_level(int level) const {
    std::vector<StateId> out;
    if (level_major()) {
        out.reserve(level_begin[level + 1] - level_begin[level]);
        for (StateId v = level_begin[level]; v < level_begin[level + 1]; ++v) out.push_back(v);
        return out;
    }
    for (int v = 0; v < num_states(); ++v)
        if (state_level[v] == level) out.push_back(v);
    return out;
}

bool Apfa::has_probs() const {
    return std::all_of(edges.begin(), edges.end(), [](const Edge& e) { return e.has_prob(); });
}

bool Apfa::has_counts() const {
    return std::all_of(edges.begin(), edges.end(), [](const Edge& e) { return e.has_count(); });
}

Apfa make_apfa(int num_levels, std::vector<int> alphabet_sizes,
               std::vector<int> state_level, std::vector<Edge> edges) {
    Apfa a;
    a.num_levels = num_levels;
    a.alphabet_sizes = std::move(alphabet_sizes);
    a.state_level = std::move(state_level);
    a.edges = std::move(edges);
    a.reindex();
    return a;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(ValidationIssue::Code code) const {
    return std::any_of(issues.begin(), issues.end(),
                       [code](const ValidationIssue& i) { return i.code == code; });
}

std::string ValidationReport::to_string() const {
    static const char* names[] = {"bad_shape",        "not_levelled",  "root_violation",
                                  "sink_violation",   "degree_violation", "duplicate_symbol",
                                  "prob_range",       "prob_sum",      "count_negative"};
    std::ostringstream os;
    for (const ValidationIssue& i : issues) {
        os << names[static_cast<int>(i.code)];
        if (i.state != kNoState) os << " state=" << i.state;
        if (i.edge >= 0) os << " edge=" << i.edge;
        if (!i.detail.empty()) os << " (" << i.detail << ")";
        os << '\n';
    }
    return os.str();
}

ValidationReport validate(const Apfa& a) {
    using Code = ValidationIssue::Code;
    ValidationReport report;
    auto add = [&report](Code code, StateId v, EdgeId e, std::string detail) {
        report.issues.push_back({code, v, e, std::move(detail)});
    };

    const int p = a.num_levels;
    const int v_count = a.num_states();
    if (p < 1) add(Code::bad_shape, kNoState, -1, "num_levels < 1");
    if (static_cast<int>(a.alphabet_sizes.size()) != p)
        add(Code::bad_shape, kNoState, -1, "alphabet_sizes size != p");
    for (std::size_t i = 0; i < a.alphabet_sizes.size(); ++i)
        if (a.alphabet_sizes[i] < 1)
            add(Code::bad_shape, kNoState, -1, "alphabet " + std::to_string(i + 1) + " empty");

    for (int v = 0; v < v_count; ++v)
        if (a.state_level[v] < 0 || a.state_level[v] > p)
            add(Code::bad_shape, v, -1, "state level out of range");

    std::vector<int> in_degree(v_count, 0);
    for (int ei = 0; ei < a.num_edges(); ++ei) {
        const Edge& e = a.edges[ei];
        if (e.source < 0 || e.source >= v_count || e.target < 0 || e.target >= v_count) {
            add(Code::bad_shape, kNoState, ei, "edge endpoint out of range");
            continue;
        }
        ++in_degree[e.target];
        const int ls = a.state_level[e.source];
        if (a.state_level[e.target] != ls + 1)
            add(Code::not_levelled, kNoState, ei,
                "level " + std::to_string(ls) + " -> " + std::to_string(a.state_level[e.target]));
        if (e.symbol < 1 ||
            (ls >= 0 && ls < p && e.symbol > a.alphabet_sizes[ls]))
            add(Code::bad_shape, kNoState, ei, "symbol out of alphabet");
        if (e.has_prob() && (e.prob < 0.0 || e.prob > 1.0))
            add(Code::prob_range, kNoState, ei, "");
        if (!e.has_count() && e.count != kNoCount)
            add(Code::count_negative, kNoState, ei, "");
    }

    int roots = 0, sinks = 0;
    for (int v = 0; v < v_count; ++v) {
        if (a.state_level[v] == 0) {
            ++roots;
            if (in_degree[v] > 0) add(Code::root_violation, v, -1, "root has incoming edges");
        }
        if (a.state_level[v] == p) {
            ++sinks;
            if (a.out_degree(v) > 0) add(Code::sink_violation, v, -1, "sink has outgoing edges");
        }
    }
    if (roots != 1) add(Code::root_violation, kNoState, -1, std::to_string(roots) + " level-0 states");
    if (sinks != 1) add(Code::sink_violation, kNoState, -1, std::to_string(sinks) + " level-p states");

    for (int v = 0; v < v_count; ++v) {
        const int l = a.state_level[v];
        if (l > 0 && l <= p && in_degree[v] == 0)
            add(Code::degree_violation, v, -1, "no incoming edges");
        if (l >= 0 && l < p && a.out_degree(v) == 0)
            add(Code::degree_violation, v, -1, "no outgoing edges");
    }

    for (int v = 0; v < v_count; ++v) {
        auto out = a.out_edges(v);
        bool all_probs = !out.empty();
        double sum = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (k > 0 && out[k].symbol == out[k - 1].symbol)
                add(Code::duplicate_symbol, v, -1, "symbol " + std::to_string(out[k].symbol));
            if (out[k].has_prob()) sum += out[k].prob; else all_probs = false;
        }
        // Zero-sum states are inestimable completion placeholders, not errors.
        if (all_probs && sum != 0.0 && std::abs(sum - 1.0) > kProbSumTol)
            add(Code::prob_sum, v, -1, "sum " + std::to_string(sum));
    }
    return report;
}

void require_valid(const Apfa& a, const char* where) {
    ValidationReport r = validate(a);
    if (!r.ok()) throw ModelError(std::string(where) + ": invalid automaton\n" + r.to_string());
}

// ---------------------------------------------------------------------------
// Completeness

bool is_complete(const Apfa& a) {
    for (int v = 0; v < a.num_states(); ++v) {
        const int l = a.state_level[v];
        if (l < a.num_levels && a.out_degree(v) != a.alphabet_sizes[l]) return false;
    }
    return true;
}

Apfa complete(const Apfa& a, int max_new_states) {
    require_valid(a, "complete");
    Apfa result = a;
    const bool with_counts = a.has_counts();
    const bool with_probs = a.has_probs();
    const StateId sink = a.sink();

    int added = 0;
    std::deque<StateId> queue;
    for (StateId v = 0; v < result.num_states(); ++v)
        if (result.state_level[v] < result.num_levels) queue.push_back(v);

    // Out-degrees move as we append edges, so track symbol presence directly.
    std::vector<std::vector<bool>> seen(result.num_states());
    for (StateId v = 0; v < result.num_states(); ++v) {
        if (result.state_level[v] >= result.num_levels) continue;
        seen[v].assign(result.alphabet_sizes[result.state_level[v]] + 1, false);
        for (const Edge& e : result.out_edges(v)) seen[v][e.symbol] = true;
    }

    while (!queue.empty()) {
        StateId v = queue.front();
        queue.pop_front();
        const int l = result.state_level[v];
        for (Symbol sigma = 1; sigma <= result.alphabet_sizes[l]; ++sigma) {
            if (seen[v][sigma]) continue;
            StateId target;
            if (l + 1 == result.num_levels) {
                target = sink;
            } else {
                if (++added > max_new_states)
                    throw ModelError("complete: size guard exceeded (" +
                                     std::to_string(max_new_states) + " new states)");
                target = result.num_states();
                result.state_level.push_back(l + 1);
                seen.emplace_back(result.alphabet_sizes[l + 1] + 1, false);
                queue.push_back(target);
            }
            Edge e;
            e.source = v;
            e.target = target;
            e.symbol = sigma;
            e.synthetic = true;
            if (with_counts) e.count = 0;
            if (with_probs) e.prob = 0.0;
            result.edges.push_back(e);
        }
    }
    result.reindex();
    return result;
}

Apfa maximal_apfa(const std::vector<int>& alphabet_sizes, int max_states) {
    const int p = static_cast<int>(alphabet_sizes.size());
    if (p < 1) throw ModelError("maximal_apfa: need at least one level");
    for (int k : alphabet_sizes)
        if (k < 1) throw ModelError("maximal_apfa: empty alphabet");

    std::vector<long long> level_count(p + 1, 1);
    long long total = 1;
    for (int i = 1; i < p; ++i) {
        level_count[i] = level_count[i - 1] * alphabet_sizes[i - 1];
        total += level_count[i];
        if (total > max_states)
            throw ModelError("maximal_apfa: size guard exceeded");
    }
    level_count[p] = 1;
    ++total;

    std::vector<long long> offset(p + 2, 0);
    for (int i = 0; i <= p; ++i) offset[i + 1] = offset[i] + level_count[i];

    Apfa a;
    a.num_levels = p;
    a.alphabet_sizes = alphabet_sizes;
    a.state_level.resize(static_cast<std::size_t>(total));
    for (int i = 0; i <= p; ++i)
        for (long long r = offset[i]; r < offset[i + 1]; ++r)
            a.state_level[static_cast<std::size_t>(r)] = i;

    for (int i = 0; i < p; ++i) {
        const int k = alphabet_sizes[i];
        for (long long r = 0; r < level_count[i]; ++r) {
            const StateId from = static_cast<StateId>(offset[i] + r);
            for (Symbol sigma = 1; sigma <= k; ++sigma) {
                Edge e;
                e.source = from;
                e.symbol = sigma;
                e.target = (i + 1 == p)
                               ? static_cast<StateId>(offset[p])
                               : static_cast<StateId>(offset[i + 1] + r * k + (sigma - 1));
                a.edges.push_back(e);
            }
        }
    }
    a.reindex();
    return a;
}

Apfa minimal_apfa(const std::vector<int>& alphabet_sizes) {
    const int p = static_cast<int>(alphabet_sizes.size());
    if (p < 1) throw ModelError("minimal_apfa: need at least one level");
    Apfa a;
    a.num_levels = p;
    a.alphabet_sizes = alphabet_sizes;
    a.state_level.resize(p + 1);
    for (int i = 0; i <= p; ++i) a.state_level[i] = i;
    for (int i = 0; i < p; ++i) {
        if (alphabet_sizes[i] < 1) throw ModelError("minimal_apfa: empty alphabet");
        for (Symbol sigma = 1; sigma <= alphabet_sizes[i]; ++sigma) {
            Edge e;
            e.source = i;
            e.target = i + 1;
            e.symbol = sigma;
            a.edges.push_back(e);
        }
    }
    a.reindex();
    return a;
}

// ---------------------------------------------------------------------------
// Paths, probabilities, simulation

std::optional<std::vector<EdgeId>> path_for(const Apfa& a, const Outcome& x) {
    if (static_cast<int>(x.size()) != a.num_levels) return std::nullopt;
    std::vector<EdgeId> path;
    path.reserve(x.size());
    StateId cur = a.root();
    if (cur == kNoState) return std::nullopt;
    for (Symbol sigma : x) {
        auto e = a.out_edge(cur, sigma);
        if (!e) return std::nullopt;
        path.push_back(*e);
        cur = a.edges[*e].target;
    }
    return path;
}

double probability_of(const Apfa& a, const Outcome& x) {
    if (!a.has_probs()) throw ModelError("probability_of: edge probabilities unset");
    auto path = path_for(a, x);
    if (!path) return 0.0;
    double prob = 1.0;
    for (EdgeId e : *path) prob *= a.edges[e].prob;
    return prob;
}

Dataset simulate(const Apfa& a, Count n, std::uint64_t seed) {
    require_valid(a, "simulate");
    if (!a.has_probs()) throw ModelError("simulate: edge probabilities unset");

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    Dataset d;
    d.alphabet_sizes = a.alphabet_sizes;
    d.rows.reserve(static_cast<std::size_t>(n));
    const StateId root = a.root();
    for (Count k = 0; k < n; ++k) {
        std::vector<std::int32_t> row;
        row.reserve(a.num_levels);
        StateId cur = root;
        for (int i = 0; i < a.num_levels; ++i) {
            auto out = a.out_edges(cur);
            const double u = uniform();
            double cum = 0.0;
            const Edge* chosen = &out.back();
            for (const Edge& e : out) {
                cum += e.prob;
                if (u < cum) { chosen = &e; break; }
            }
            row.push_back(chosen->symbol);
            cur = chosen->target;
        }
        d.rows.push_back(std::move(row));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Renumbering and comparison

std::pair<Apfa, std::vector<StateId>> canonical_form(const Apfa& a) {
    std::vector<StateId> map(a.num_states(), kNoState);
    std::deque<StateId> queue;
    const StateId root = a.root();
    if (root == kNoState) throw ModelError("canonical_form: no root");
    StateId next = 0;
    map[root] = next++;
    queue.push_back(root);
    while (!queue.empty()) {
        StateId v = queue.front();
        queue.pop_front();
        for (const Edge& e : a.out_edges(v)) {
            if (map[e.target] == kNoState) {
                map[e.target] = next++;
                queue.push_back(e.target);
            }
        }
    }
    if (next != a.num_states())
        throw ModelError("canonical_form: unreachable states present");

    Apfa out;
    out.num_levels = a.num_levels;
    out.alphabet_sizes = a.alphabet_sizes;
    out.state_level.resize(a.num_states());
    for (StateId v = 0; v < a.num_states(); ++v) out.state_level[map[v]] = a.state_level[v];
    out.edges.reserve(a.edges.size());
    for (Edge e : a.edges) {
        e.source = map[e.source];
        e.target = map[e.target];
        out.edges.push_back(e);
    }
    out.reindex();
    return {std::move(out), std::move(map)};
}

bool structurally_equal(const Apfa& a, const Apfa& b, const StructuralEq& opts) {
    if (a.num_levels != b.num_levels || a.alphabet_sizes != b.alphabet_sizes) return false;
    if (a.state_level != b.state_level) return false;
    if (a.edges.size() != b.edges.size()) return false;
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        const Edge& x = a.edges[i];
        const Edge& y = b.edges[i];
        if (x.source != y.source || x.target != y.target || x.symbol != y.symbol) return false;
        if (opts.counts && x.count != y.count) return false;
        if (opts.synthetic && x.synthetic != y.synthetic) return false;
        if (opts.probs) {
            if (x.has_prob() != y.has_prob()) return false;
            if (x.has_prob() && std::abs(x.prob - y.prob) > opts.prob_tol) return false;
        }
    }
    return true;
}

bool isomorphic(const Apfa& a, const Apfa& b, const StructuralEq& opts) {
    if (a.num_states() != b.num_states() || a.num_edges() != b.num_edges()) return false;
    return structurally_equal(canonical_form(a).first, canonical_form(b).first, opts);
}

}  // namespace apfa
