#include "apfa/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apfa/errors.hpp"
#include "apfa/merging.hpp"
#include "apfa/parallel.hpp"

namespace apfa {

namespace {

double max_difference_score(const CountedApfa& c, StateId v, StateId w) {
    const Apfa& g = c.graph;
    const std::vector<StateId> seed{v, w};
    const MergeList ml = merge_list(g, seed);
    double worst = 0.0;
    for (const MergeGroup& group : ml.groups) {
        const int k = g.alphabet_sizes[group.level];
        for (std::size_t i = 0; i < group.states.size(); ++i) {
            for (std::size_t j = i + 1; j < group.states.size(); ++j) {
                const StateId x = group.states[i];
                const StateId y = group.states[j];
                const double nx = static_cast<double>(c.node_counts[x]);
                const double ny = static_cast<double>(c.node_counts[y]);
                for (Symbol sigma = 1; sigma <= k; ++sigma) {
                    auto ex = g.out_edge(x, sigma);
                    auto ey = g.out_edge(y, sigma);
                    const double px = ex ? static_cast<double>(g.edges[*ex].count) / nx : 0.0;
                    const double py = ey ? static_cast<double>(g.edges[*ey].count) / ny : 0.0;
                    worst = std::max(worst, std::abs(px - py));
                }
            }
        }
    }
    return worst;
}

struct PairScore {
    double score = std::numeric_limits<double>::infinity();
    double g2 = 0.0;
    int df_adjusted = 0;
};

PairScore scored(const CountedApfa& c, StateId v, StateId w, const SelectionConfig& cfg) {
    PairScore s;
    if (cfg.score == SelectionConfig::ScoreKind::penalized_likelihood) {
        const TestResult t = merge_test_local(c, std::vector<StateId>{v, w});
        s.g2 = t.g2;
        s.df_adjusted = t.df_adjusted;
        s.score = t.g2 - cfg.alpha * static_cast<double>(t.df_adjusted);
    } else {
        s.score = max_difference_score(c, v, w);
    }
    return s;
}

void check_config(const SelectionConfig& cfg) {
    if (cfg.score == SelectionConfig::ScoreKind::penalized_likelihood) {
        if (cfg.alpha < 0) throw ModelError("selection: alpha must be nonnegative");
    } else {
        if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) throw ModelError("selection: mu must lie in (0,1]");
    }
}

double criterion_now(const CountedApfa& c, double alpha) {
    return -2.0 * counted_log_lik(c) + alpha * static_cast<double>(dimension(c.graph));
}

}  // namespace

double score_pair(const CountedApfa& c, StateId v, StateId w, const SelectionConfig& cfg) {
    if (v < 0 || w < 0 || v >= c.graph.num_states() || w >= c.graph.num_states())
        throw ModelError("score_pair: state id out of range");
    if (c.graph.state_level[v] != c.graph.state_level[w])
        throw ModelError("score_pair: states must share one level");
    check_config(cfg);
    return scored(c, v, w, cfg).score;
}

SelectionRun select_from(CountedApfa c, const SelectionConfig& cfg) {
    check_config(cfg);
    const bool penalized = cfg.score == SelectionConfig::ScoreKind::penalized_likelihood;
    std::vector<TraceEntry> trace;

    for (int level = 1; level < c.graph.num_levels; ++level) {
        for (;;) {
            const std::vector<StateId> states = c.graph.states_at_level(level);
            const std::size_t k = states.size();
            if (k < 2) break;

            std::vector<std::pair<StateId, StateId>> pairs;
            pairs.reserve(k * (k - 1) / 2);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    pairs.emplace_back(states[i], states[j]);

            std::vector<PairScore> scores(pairs.size());
            parallel_for(pairs.size(), [&](std::size_t idx) {
                scores[idx] = scored(c, pairs[idx].first, pairs[idx].second, cfg);
            });

            // Lexicographically smallest pair among the minimal scores:
            // enumeration order is already lexicographic, keep the first.
            std::size_t best = 0;
            for (std::size_t idx = 1; idx < pairs.size(); ++idx)
                if (scores[idx].score < scores[best].score) best = idx;

            bool merge_now;
            bool parsimony = false;
            if (penalized) {
                if (scores[best].score < 0.0) {
                    merge_now = true;
                } else {
                    // Zero-df pairs score exactly 0 and shrink the model
                    // without moving the criterion; merge those for parsimony.
                    merge_now = false;
                    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
                        if (scores[idx].df_adjusted == 0 && scores[idx].score <= 0.0) {
                            best = idx;
                            merge_now = true;
                            parsimony = true;
                            break;
                        }
                    }
                }
            } else {
                merge_now = scores[best].score < cfg.mu;
            }
            if (!merge_now) break;

            TraceEntry entry;
            entry.level = level;
            entry.first = pairs[best].first;
            entry.second = pairs[best].second;
            entry.score = scores[best].score;
            entry.g2 = scores[best].g2;
            entry.df_adjusted = scores[best].df_adjusted;
            entry.parsimony = parsimony;
            if (cfg.trace) entry.ic_before = criterion_now(c, cfg.alpha);

            c = merge(c, std::vector<StateId>{entry.first, entry.second});

            if (cfg.trace) {
                entry.ic_after = criterion_now(c, cfg.alpha);
                trace.push_back(entry);
            }
        }
    }
    return {fit_mle(c), std::move(trace)};
}

SelectionRun select(const Dataset& d, const SelectionConfig& cfg) {
    return select_from(sample_apfa(d), cfg);
}

CountedApfa replay(CountedApfa start, const std::vector<TraceEntry>& trace) {
    for (const TraceEntry& e : trace)
        start = merge(start, std::vector<StateId>{e.first, e.second});
    return start;
}

}  // namespace apfa
