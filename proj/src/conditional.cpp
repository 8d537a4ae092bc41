#include "apfa/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "apfa/errors.hpp"
#include "apfa/merging.hpp"
#include "apfa/parallel.hpp"

namespace apfa {

// ---------------------------------------------------------------------------
// Categorical covariate

Eigen::MatrixXd GroupedCounts::group_table(std::span<const StateId> group, int g) const {
    const Apfa& graph = pooled.graph;
    std::vector<StateId> states(group.begin(), group.end());
    std::sort(states.begin(), states.end());
    const int level = graph.state_level[states.front()];
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states.size()),
                                              graph.alphabet_sizes[level]);
    for (std::size_t i = 0; i < states.size(); ++i)
        for (EdgeId ei = graph.out_offset[states[i]]; ei < graph.out_offset[states[i] + 1]; ++ei)
            t(static_cast<Eigen::Index>(i), graph.edges[ei].symbol - 1) =
                static_cast<double>(edge_counts[g][ei]);
    return t;
}

GroupedCounts fit_grouped(const CountedApfa& c, const Dataset& d) {
    if (!d.covariate || d.covariate->kind != CovariateKind::categorical)
        throw DataError("fit_grouped: categorical covariate required");
    if (d.size() < 1) throw DataError("fit_grouped: empty dataset");

    GroupedCounts out;
    out.pooled = c;
    out.group_codes = d.covariate->code_set();
    std::unordered_map<int, int> index;
    for (std::size_t g = 0; g < out.group_codes.size(); ++g)
        index[out.group_codes[g]] = static_cast<int>(g);

    const Apfa& graph = c.graph;
    out.edge_counts.assign(out.groups(), std::vector<Count>(graph.num_edges(), 0));
    out.node_counts.assign(out.groups(), std::vector<Count>(graph.num_states(), 0));

    const StateId root = graph.root();
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        const int g = index.at(d.covariate->codes[k]);
        StateId cur = root;
        ++out.node_counts[g][cur];
        for (int i = 0; i < graph.num_levels; ++i) {
            auto eid = graph.out_edge(cur, d.rows[k][i]);
            if (!eid)
                throw DataError("row " + std::to_string(k + 1) + ": no path through the model");
            ++out.edge_counts[g][*eid];
            cur = graph.edges[*eid].target;
            ++out.node_counts[g][cur];
        }
    }

    for (int g = 0; g < out.groups(); ++g)
        if (out.node_counts[g][root] == 0)
            throw DataError("fit_grouped: covariate group " +
                            std::to_string(out.group_codes[g]) + " has zero rows");
    for (int ei = 0; ei < graph.num_edges(); ++ei) {
        Count sum = 0;
        for (int g = 0; g < out.groups(); ++g) sum += out.edge_counts[g][ei];
        if (sum != graph.edges[ei].count)
            throw DataError("fit_grouped: dataset does not reproduce the model counts");
    }
    return out;
}

std::optional<double> group_edge_prob(const GroupedCounts& g, int group_index, EdgeId e) {
    const Count nv = g.node_counts[group_index][g.pooled.graph.edges[e].source];
    if (nv == 0) return std::nullopt;
    return static_cast<double>(g.edge_counts[group_index][e]) / static_cast<double>(nv);
}

double grouped_log_lik(const GroupedCounts& g) {
    double ll = 0.0;
    const Apfa& graph = g.pooled.graph;
    for (int z = 0; z < g.groups(); ++z)
        for (int ei = 0; ei < graph.num_edges(); ++ei) {
            const Count n = g.edge_counts[z][ei];
            if (n > 0)
                ll += static_cast<double>(n) *
                      std::log(static_cast<double>(n) /
                               static_cast<double>(g.node_counts[z][graph.edges[ei].source]));
        }
    return ll;
}

G2Result conditional_local_lrt(const GroupedCounts& g, std::span<const StateId> group) {
    G2Result r;
    for (int z = 0; z < g.groups(); ++z) {
        const Eigen::MatrixXd t = g.group_table(group, z);
        if (t.sum() <= 0) continue;  // group never reaches these states
        const G2Result local = g2_independence(t);
        r.g2 += local.g2;
        r.df += local.df;
    }
    return r;
}

TestResult conditional_merge_test(const GroupedCounts& g, std::span<const StateId> seed) {
    const MergeList ml = merge_list(g.pooled.graph, seed);
    TestResult r;
    for (const MergeGroup& group : ml.groups) {
        for (int z = 0; z < g.groups(); ++z) {
            const Eigen::MatrixXd t = g.group_table(group.states, z);
            if (t.sum() <= 0) continue;
            const G2Result local = g2_independence(t);
            r.g2 += local.g2;
            r.df_adjusted += local.df;
            r.parts.push_back({group, local.g2, local.df, g.group_codes[z]});
        }
    }
    // Unadjusted: every covariate group carries its own copy of the merged
    // parameters.
    TestResult pooled = merge_test(g.pooled, seed);
    if (pooled.df_unadjusted_saturated ||
        pooled.df_unadjusted > std::numeric_limits<long long>::max() / g.groups()) {
        r.df_unadjusted = std::numeric_limits<long long>::max();
        r.df_unadjusted_saturated = true;
    } else {
        r.df_unadjusted = pooled.df_unadjusted * g.groups();
    }
    if (r.df_adjusted >= 1) r.p_value = chi2_upper_tail(r.g2, r.df_adjusted);
    return r;
}

// ---------------------------------------------------------------------------
// Continuous covariate

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

double logistic_log_lik(std::span<const std::pair<double, int>> obs, double a, double b) {
    double ll = 0.0;
    for (const auto& [z, y] : obs) {
        const double t = a + b * z;
        // log pi or log(1-pi), written to stay finite for large |t|
        ll += y ? -std::log1p(std::exp(-t)) : -std::log1p(std::exp(t));
    }
    return ll;
}

Eigen::Vector2d logistic_score(std::span<const std::pair<double, int>> obs, double a,
                               double b) {
    Eigen::Vector2d score = Eigen::Vector2d::Zero();
    for (const auto& [z, y] : obs) {
        const double resid = static_cast<double>(y) - logistic(a + b * z);
        score(0) += resid;
        score(1) += resid * z;
    }
    return score;
}

LogisticEdgeFit fit_logistic_1d(std::span<const std::pair<double, int>> obs) {
    LogisticEdgeFit fit;
    fit.n_obs = static_cast<Count>(obs.size());
    if (obs.empty()) throw ModelError("logistic fit: no observations");

    Count ones = 0;
    for (const auto& [z, y] : obs) ones += (y != 0);
    if (ones == 0 || ones == static_cast<Count>(obs.size())) {
        // Degenerate response: supremum likelihood 0 at infinite intercept.
        fit.separated = true;
        fit.intercept = ones == 0 ? -std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::infinity();
        fit.slope = 0.0;
        fit.log_lik = 0.0;
        return fit;
    }

    // Complete separation of a univariate covariate is an exact check.
    double max_z1 = -std::numeric_limits<double>::infinity();
    double min_z1 = std::numeric_limits<double>::infinity();
    double max_z0 = max_z1, min_z0 = min_z1;
    for (const auto& [z, y] : obs) {
        if (y) { max_z1 = std::max(max_z1, z); min_z1 = std::min(min_z1, z); }
        else   { max_z0 = std::max(max_z0, z); min_z0 = std::min(min_z0, z); }
    }
    if (max_z1 < min_z0 || max_z0 < min_z1) {
        fit.separated = true;
        fit.intercept = fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.log_lik = 0.0;  // supremum
        return fit;
    }

    // Standardize internally for Newton stability; report on the original scale.
    const std::size_t n = obs.size();
    double mean = 0.0;
    for (const auto& [z, y] : obs) mean += z;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& [z, y] : obs) var += (z - mean) * (z - mean);
    var /= static_cast<double>(n);
    const double scale = var > 0 ? std::sqrt(var) : 1.0;
    const bool constant_z = var <= 0;

    const double ybar = static_cast<double>(ones) / static_cast<double>(n);
    Eigen::Vector2d theta(std::log(ybar / (1.0 - ybar)), 0.0);

    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    constexpr double kTol = 1e-8;
    constexpr int kMaxIter = 50;
    for (fit.iterations = 0; fit.iterations < kMaxIter; ++fit.iterations) {
        Eigen::Vector2d score = Eigen::Vector2d::Zero();
        info.setZero();
        for (const auto& [z, y] : obs) {
            const double zs = constant_z ? 0.0 : (z - mean) / scale;
            const double p = logistic(theta(0) + theta(1) * zs);
            const double resid = static_cast<double>(y) - p;
            const double w = p * (1.0 - p);
            score(0) += resid;
            score(1) += resid * zs;
            info(0, 0) += w;
            info(0, 1) += w * zs;
            info(1, 1) += w * zs * zs;
        }
        info(1, 0) = info(0, 1);
        fit.max_gradient = score.cwiseAbs().maxCoeff();
        if (fit.max_gradient < kTol) { fit.converged = true; break; }
        if (constant_z) {
            // Slope inestimable: Newton on the intercept alone.
            theta(0) += score(0) / info(0, 0);
            continue;
        }
        theta += info.ldlt().solve(score);
        if (theta.cwiseAbs().maxCoeff() > 30.0) {
            // Quasi-separation: estimates diverging.
            fit.separated = true;
            break;
        }
    }

    fit.slope = constant_z ? 0.0 : theta(1) / scale;
    fit.intercept = theta(0) - (constant_z ? 0.0 : theta(1) * mean / scale);
    fit.log_lik = logistic_log_lik(obs, fit.intercept, fit.slope);
    if (fit.converged && !constant_z) {
        Eigen::Matrix2d cov = info.inverse();
        Eigen::Matrix2d jac;
        jac << 1.0, -mean / scale, 0.0, 1.0 / scale;
        cov = jac * cov * jac.transpose();
        fit.se_intercept = std::sqrt(cov(0, 0));
        fit.se_slope = std::sqrt(cov(1, 1));
    }
    return fit;
}

LogisticApfaModel fit_logistic_edges(const CountedApfa& c, const Dataset& d) {
    if (!d.covariate || d.covariate->kind != CovariateKind::continuous)
        throw DataError("fit_logistic_edges: continuous covariate required");
    const Apfa& graph = c.graph;
    for (int k : graph.alphabet_sizes)
        if (k != 2) throw ModelError("fit_logistic_edges: alphabets must be binary");

    LogisticApfaModel m;
    m.base = c;
    m.observations.assign(graph.num_states(), {});
    const StateId root = graph.root();
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        StateId cur = root;
        for (int i = 0; i < graph.num_levels; ++i) {
            const Symbol sigma = d.rows[k][i];
            m.observations[cur].emplace_back(d.covariate->values[k], sigma == 1 ? 1 : 0);
            auto eid = graph.out_edge(cur, sigma);
            if (!eid)
                throw DataError("row " + std::to_string(k + 1) + ": no path through the model");
            cur = graph.edges[*eid].target;
        }
    }

    m.fits.assign(graph.num_states(), {});
    std::vector<StateId> internal;
    for (StateId v = 0; v < graph.num_states(); ++v)
        if (graph.state_level[v] < graph.num_levels) internal.push_back(v);
    for (StateId v : internal)
        if (m.observations[v].empty())
            throw ModelError("fit_logistic_edges: state " + std::to_string(v) +
                             " has no routed observations");
    parallel_for(internal.size(), [&](std::size_t i) {
        const StateId v = internal[i];
        m.fits[v] = fit_logistic_1d(m.observations[v]);
        m.fits[v].state = v;
    });
    for (StateId v : internal) m.total_log_lik += m.fits[v].log_lik;
    return m;
}

TestResult logistic_merge_test(const LogisticApfaModel& m, StateId v, StateId w) {
    const MergeList ml = merge_list(m.base.graph, std::vector<StateId>{v, w});
    TestResult r;
    for (const MergeGroup& group : ml.groups) {
        std::vector<std::pair<double, int>> pooled_obs;
        double separate_ll = 0.0;
        bool flagged = false;
        for (StateId member : group.states) {
            const auto& obs = m.observations[member];
            pooled_obs.insert(pooled_obs.end(), obs.begin(), obs.end());
            separate_ll += m.fits[member].log_lik;
            flagged = flagged || m.fits[member].separated;
        }
        const LogisticEdgeFit pooled = fit_logistic_1d(pooled_obs);
        flagged = flagged || pooled.separated;
        const double g2 = -2.0 * (pooled.log_lik - separate_ll);
        const int df = 2 * (static_cast<int>(group.states.size()) - 1);
        r.g2 += g2;
        r.df_adjusted += df;
        r.separation_flagged = r.separation_flagged || flagged;
        r.parts.push_back({group, g2, df, std::nullopt});
    }
    r.df_unadjusted = r.df_adjusted;
    if (r.df_adjusted >= 1 && !r.separation_flagged)
        r.p_value = chi2_upper_tail(r.g2, r.df_adjusted);
    return r;
}

// ---------------------------------------------------------------------------
// Conditional selection

namespace {

SelectionRun conditional_sweep(const Dataset& d, const SelectionConfig& cfg,
                               bool continuous) {
    if (cfg.score != SelectionConfig::ScoreKind::penalized_likelihood)
        throw ModelError("conditional selection uses the penalized-likelihood score");
    CountedApfa c = sample_apfa(d);
    std::vector<TraceEntry> trace;

    for (int level = 1; level < c.graph.num_levels; ++level) {
        for (;;) {
            const std::vector<StateId> states = c.graph.states_at_level(level);
            const std::size_t k = states.size();
            if (k < 2) break;

            // Rebuilt per step: merging reroutes rows through fused states.
            std::optional<GroupedCounts> grouped;
            std::optional<LogisticApfaModel> logistic;
            if (continuous) logistic = fit_logistic_edges(c, d);
            else grouped = fit_grouped(c, d);

            struct Cand { double score; double g2; int df; bool flagged; };
            std::vector<std::pair<StateId, StateId>> pairs;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    pairs.emplace_back(states[i], states[j]);
            std::vector<Cand> cand(pairs.size());
            parallel_for(pairs.size(), [&](std::size_t idx) {
                TestResult t = continuous
                                   ? logistic_merge_test(*logistic, pairs[idx].first,
                                                         pairs[idx].second)
                                   : conditional_merge_test(
                                         *grouped, std::vector<StateId>{pairs[idx].first,
                                                                        pairs[idx].second});
                cand[idx] = {t.g2 - cfg.alpha * static_cast<double>(t.df_adjusted), t.g2,
                             t.df_adjusted, t.separation_flagged};
            });

            std::size_t best = pairs.size();
            for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
                if (cand[idx].flagged) continue;  // no finite MLE: dissimilar
                if (best == pairs.size() || cand[idx].score < cand[best].score) best = idx;
            }
            bool parsimony = false;
            if (best == pairs.size() || cand[best].score >= 0.0) {
                // Zero-df pairs keep the criterion flat; merge for parsimony.
                std::size_t fallback = pairs.size();
                for (std::size_t idx = 0; idx < pairs.size(); ++idx)
                    if (!cand[idx].flagged && cand[idx].df == 0 && cand[idx].score <= 0.0) {
                        fallback = idx;
                        break;
                    }
                if (fallback == pairs.size()) break;
                best = fallback;
                parsimony = true;
            }

            TraceEntry entry;
            entry.level = level;
            entry.first = pairs[best].first;
            entry.second = pairs[best].second;
            entry.score = cand[best].score;
            entry.g2 = cand[best].g2;
            entry.df_adjusted = cand[best].df;
            entry.parsimony = parsimony;
            if (cfg.trace) {
                const int copies = continuous ? 2 : grouped->groups();
                const double ll = continuous ? logistic->total_log_lik : grouped_log_lik(*grouped);
                entry.ic_before = -2.0 * ll + cfg.alpha * copies * dimension(c.graph);
            }
            c = merge(c, std::vector<StateId>{entry.first, entry.second});
            if (cfg.trace) {
                const double ll = continuous ? fit_logistic_edges(c, d).total_log_lik
                                             : grouped_log_lik(fit_grouped(c, d));
                const int copies = continuous ? 2 : static_cast<int>(grouped->groups());
                entry.ic_after = -2.0 * ll + cfg.alpha * copies * dimension(c.graph);
                trace.push_back(entry);
            }
        }
    }
    return {fit_mle(c), std::move(trace)};
}

}  // namespace

ConditionalSelection conditional_select(const Dataset& d, const SelectionConfig& cfg) {
    if (!d.covariate) throw DataError("conditional_select: covariate required");
    const bool continuous = d.covariate->kind == CovariateKind::continuous;
    SelectionRun run = conditional_sweep(d, cfg, continuous);
    ConditionalSelection out;
    out.pooled = std::move(run.model);
    out.trace = std::move(run.trace);
    if (continuous)
        out.logistic = fit_logistic_edges(out.pooled.counted, d);
    else
        out.grouped = fit_grouped(out.pooled.counted, d);
    return out;
}

TestResult covariate_global_test(const Dataset& d) {
    if (!d.covariate || d.covariate->kind != CovariateKind::categorical)
        throw DataError("covariate_global_test: categorical covariate required");
    const std::vector<int> codes = d.covariate->code_set();
    if (codes.size() < 2) throw DataError("covariate_global_test: covariate has one level");

    std::unordered_map<int, Symbol> to_symbol;
    for (std::size_t g = 0; g < codes.size(); ++g)
        to_symbol[codes[g]] = static_cast<Symbol>(g + 1);

    Dataset augmented;
    augmented.alphabet_sizes.push_back(static_cast<int>(codes.size()));
    augmented.alphabet_sizes.insert(augmented.alphabet_sizes.end(), d.alphabet_sizes.begin(),
                                    d.alphabet_sizes.end());
    augmented.rows.reserve(d.rows.size());
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        std::vector<std::int32_t> row;
        row.reserve(d.width() + 1);
        row.push_back(to_symbol.at(d.covariate->codes[k]));
        row.insert(row.end(), d.rows[k].begin(), d.rows[k].end());
        augmented.rows.push_back(std::move(row));
    }
    const CountedApfa aug = sample_apfa(augmented);
    return merge_test(aug, aug.graph.states_at_level(1));
}

}  // namespace apfa
