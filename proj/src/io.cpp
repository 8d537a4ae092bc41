#include "apfa/io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "apfa/errors.hpp"

namespace apfa {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace {

Json provenance_to_json(const Provenance& p) {
    Json j;
    j["command"] = p.command;
    j["config"] = p.config;
    j["dataset_digest"] = p.dataset_digest;
    return j;
}

}  // namespace

Json apfa_to_json(const Apfa& a, const std::optional<Provenance>& provenance) {
    Json doc;
    doc["schema"] = "apfa-1";
    doc["num_levels"] = a.num_levels;
    doc["alphabets"] = a.alphabet_sizes;
    Json states = Json::array();
    for (StateId v = 0; v < a.num_states(); ++v)
        states.push_back(Json{{"id", v}, {"level", a.state_level[v]}});
    doc["states"] = std::move(states);
    Json edges = Json::array();
    for (const Edge& e : a.edges) {
        Json je;
        je["source"] = e.source;
        je["target"] = e.target;
        je["symbol"] = e.symbol;
        if (e.has_count()) je["count"] = e.count;
        if (e.has_prob()) je["prob"] = e.prob;
        if (e.synthetic) je["synthetic"] = true;
        edges.push_back(std::move(je));
    }
    doc["edges"] = std::move(edges);
    if (provenance) doc["provenance"] = provenance_to_json(*provenance);
    return doc;
}

Json fitted_to_json(const FittedApfa& f, std::int64_t sample_size,
                    const std::optional<Provenance>& provenance) {
    Json doc = apfa_to_json(f.counted.graph);
    Json fit;
    fit["log_lik"] = f.log_lik;
    fit["dim"] = f.dim;
    fit["n"] = sample_size;
    fit["aic"] = -2.0 * f.log_lik + 2.0 * f.dim;
    fit["bic"] = -2.0 * f.log_lik +
                 std::log(static_cast<double>(std::max<std::int64_t>(sample_size, 1))) * f.dim;
    doc["fit"] = std::move(fit);
    if (provenance) doc["provenance"] = provenance_to_json(*provenance);
    return doc;
}

Apfa apfa_from_json(const Json& doc) {
    if (!doc.is_object() || doc.value("schema", std::string()) != "apfa-1")
        throw ModelError("model document: missing or unknown schema");
    Apfa a;
    a.num_levels = doc.at("num_levels").get<int>();
    a.alphabet_sizes = doc.at("alphabets").get<std::vector<int>>();
    const Json& states = doc.at("states");
    a.state_level.assign(states.size(), 0);
    for (const Json& s : states) {
        const int id = s.at("id").get<int>();
        if (id < 0 || id >= static_cast<int>(states.size()))
            throw ModelError("model document: state ids must be dense 0..V-1");
        a.state_level[id] = s.at("level").get<int>();
    }
    for (const Json& je : doc.at("edges")) {
        Edge e;
        e.source = je.at("source").get<StateId>();
        e.target = je.at("target").get<StateId>();
        e.symbol = je.at("symbol").get<Symbol>();
        if (je.contains("count")) e.count = je.at("count").get<Count>();
        if (je.contains("prob")) e.prob = je.at("prob").get<double>();
        e.synthetic = je.value("synthetic", false);
        a.edges.push_back(e);
    }
    a.reindex();
    return a;
}

void attach_grouped(Json& doc, const GroupedCounts& g, const std::string& covariate_name) {
    Json cond;
    cond["covariate"] = covariate_name;
    cond["kind"] = "categorical";
    cond["groups"] = g.group_codes;
    Json per_edge = Json::array();
    for (int ei = 0; ei < g.pooled.graph.num_edges(); ++ei) {
        Json je;
        Json counts = Json::array();
        Json probs = Json::array();
        for (int z = 0; z < g.groups(); ++z) {
            counts.push_back(g.edge_counts[z][ei]);
            auto p = group_edge_prob(g, z, ei);
            if (p) probs.push_back(*p); else probs.push_back(nullptr);
        }
        je["counts"] = std::move(counts);
        je["probs"] = std::move(probs);
        per_edge.push_back(std::move(je));
    }
    cond["edges"] = std::move(per_edge);
    doc["conditional"] = std::move(cond);
}

void attach_logistic(Json& doc, const LogisticApfaModel& m, const std::string& covariate_name) {
    Json cond;
    cond["covariate"] = covariate_name;
    cond["kind"] = "continuous";
    Json per_state = Json::array();
    for (StateId v = 0; v < m.base.graph.num_states(); ++v) {
        if (m.base.graph.state_level[v] >= m.base.graph.num_levels) continue;
        const LogisticEdgeFit& f = m.fits[v];
        Json js;
        js["state"] = v;
        js["n"] = f.n_obs;
        if (std::isfinite(f.intercept)) js["intercept"] = f.intercept;
        if (std::isfinite(f.slope)) js["slope"] = f.slope;
        js["converged"] = f.converged;
        js["separated"] = f.separated;
        js["iterations"] = f.iterations;
        js["log_lik"] = f.log_lik;
        if (f.converged) {
            js["se_intercept"] = f.se_intercept;
            js["se_slope"] = f.se_slope;
        }
        per_state.push_back(std::move(js));
    }
    cond["states"] = std::move(per_state);
    cond["log_lik"] = m.total_log_lik;
    doc["conditional"] = std::move(cond);
}

Json test_result_to_json(const TestResult& t) {
    Json j;
    j["g2"] = t.g2;
    j["df_adjusted"] = t.df_adjusted;
    j["df_unadjusted"] = t.df_unadjusted;
    if (t.df_unadjusted_saturated) j["df_unadjusted_saturated"] = true;
    if (t.p_value) j["p_value"] = *t.p_value;
    if (t.separation_flagged) j["separation_flagged"] = true;
    Json parts = Json::array();
    for (const TestPart& part : t.parts) {
        Json jp;
        jp["level"] = part.group.level;
        jp["states"] = part.group.states;
        if (part.covariate_code) jp["covariate"] = *part.covariate_code;
        jp["g2"] = part.g2;
        jp["df"] = part.df;
        parts.push_back(std::move(jp));
    }
    j["parts"] = std::move(parts);
    return j;
}

std::string test_result_table(const TestResult& t, const CountedApfa& c) {
    std::ostringstream os;
    os << std::left << std::setw(22) << "element" << std::setw(28) << "table"
       << std::right << std::setw(12) << "G2" << std::setw(6) << "df" << '\n';
    for (const TestPart& part : t.parts) {
        std::ostringstream label;
        label << '(';
        for (std::size_t i = 0; i < part.group.states.size(); ++i) {
            if (i) label << ',';
            label << part.group.states[i];
        }
        label << ')';
        if (part.covariate_code) label << " z=" << *part.covariate_code;

        std::ostringstream cells;
        const NodeSymbolTable table = node_symbol_table(c, part.group.states);
        for (Eigen::Index r = 0; r < table.counts.rows(); ++r) {
            if (r) cells << " / ";
            for (Eigen::Index col = 0; col < table.counts.cols(); ++col) {
                if (col) cells << ' ';
                cells << static_cast<long long>(table.counts(r, col));
            }
        }
        os << std::left << std::setw(22) << label.str() << std::setw(28) << cells.str()
           << std::right << std::setw(12) << std::fixed << std::setprecision(3) << part.g2
           << std::setw(6) << part.df << '\n';
    }
    os << std::left << std::setw(22) << "sum" << std::setw(28) << ""
       << std::right << std::setw(12) << std::fixed << std::setprecision(3) << t.g2
       << std::setw(6) << t.df_adjusted << '\n';
    os << "unadjusted df: ";
    if (t.df_unadjusted_saturated) os << "overflow";
    else os << t.df_unadjusted;
    if (t.p_value) os << ", p = " << std::setprecision(6) << *t.p_value;
    os << '\n';
    return os.str();
}

Json trace_to_json(const std::vector<TraceEntry>& trace,
                   const std::optional<Provenance>& provenance) {
    Json j;
    Json steps = Json::array();
    for (const TraceEntry& e : trace) {
        Json js;
        js["level"] = e.level;
        js["pair"] = Json::array({e.first, e.second});
        js["score"] = e.score;
        js["g2"] = e.g2;
        js["df_adjusted"] = e.df_adjusted;
        js["ic_before"] = e.ic_before;
        js["ic_after"] = e.ic_after;
        if (e.parsimony) js["parsimony"] = true;
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    if (provenance) j["provenance"] = provenance_to_json(*provenance);
    return j;
}

Json dag_to_json(const Dag& g) {
    Json j;
    j["schema"] = "dag-1";
    j["variables"] = g.n;
    Json parents = Json::object();
    for (int i = 1; i <= g.n; ++i)
        parents[std::to_string(i)] = g.parents[i];
    j["parents"] = std::move(parents);
    return j;
}

Dag dag_from_json(const Json& doc) {
    if (doc.value("schema", std::string()) != "dag-1")
        throw ModelError("dag document: missing or unknown schema");
    Dag g = Dag::empty(doc.at("variables").get<int>());
    for (const auto& [key, value] : doc.at("parents").items()) {
        const int i = std::stoi(key);
        if (i < 1 || i > g.n) throw ModelError("dag document: variable out of range");
        g.parents[i] = value.get<std::vector<int>>();
        std::sort(g.parents[i].begin(), g.parents[i].end());
    }
    return g;
}

Json ug_to_json(const UndirectedGraph& u) {
    Json j;
    j["schema"] = "ug-1";
    j["variables"] = u.n;
    Json edges = Json::array();
    for (int i = 1; i <= u.n; ++i)
        for (int k : u.adj[i])
            if (k > i) edges.push_back(Json::array({i, k}));
    j["edges"] = std::move(edges);
    return j;
}

std::string export_dot(const Apfa& a, const DotStyle& style) {
    static const char* palette[] = {"red",    "blue",   "forestgreen", "orange",
                                    "purple", "brown",  "cyan4",       "magenta"};
    constexpr int palette_size = 8;

    // States visible = reachable through non-hidden edges.
    std::vector<bool> visible(a.num_states(), false);
    const StateId root = a.root();
    if (root != kNoState) visible[root] = true;
    for (int level = 0; level < a.num_levels; ++level) {
        for (StateId v : a.states_at_level(level)) {
            if (!visible[v]) continue;
            for (const Edge& e : a.out_edges(v))
                if (style.show_synthetic || !e.synthetic) visible[e.target] = true;
        }
    }

    std::ostringstream os;
    os << "digraph apfa {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
    for (int level = 0; level <= a.num_levels; ++level) {
        std::ostringstream rank;
        bool any = false;
        for (StateId v : a.states_at_level(level)) {
            if (!visible[v]) continue;
            rank << ' ' << v << ';';
            any = true;
        }
        if (any) os << "  { rank=same;" << rank.str() << " }\n";
    }
    for (StateId v = 0; v < a.num_states(); ++v) {
        if (!visible[v]) continue;
        for (const Edge& e : a.out_edges(v)) {
            if (e.synthetic && !style.show_synthetic) continue;
            os << "  " << e.source << " -> " << e.target << " [color="
               << palette[(e.symbol - 1) % palette_size];
            std::ostringstream label;
            if (style.show_probs && e.has_prob())
                label << std::fixed << std::setprecision(style.precision) << e.prob;
            if (style.show_counts && e.has_count()) {
                if (label.tellp() > 0) label << ' ';
                label << '(' << e.count << ')';
            }
            if (label.tellp() > 0) os << ", label=\"" << label.str() << '"';
            if (e.synthetic) os << ", style=dashed";
            os << "];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace apfa
