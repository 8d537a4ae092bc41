/* apfa -- command-line front end: sample automata, fitting, merging,
 * testing, selection, simulation, graphical-model reports, DOT export. */

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "apfa/conditional.hpp"
#include "apfa/equivalence.hpp"
#include "apfa/errors.hpp"
#include "apfa/io.hpp"
#include "apfa/parallel.hpp"
#include "apfa/selection.hpp"

namespace {

using namespace apfa;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f << text;
}

Apfa load_model(const std::string& path) {
    try {
        return apfa_from_json(Json::parse(read_file(path)));
    } catch (const Json::exception& e) {
        throw ModelError("'" + path + "': " + e.what());
    }
}

struct DataArgs {
    std::string path;
    bool header = false;
    std::string covariate;
    bool continuous = false;

    ReadOptions options() const {
        ReadOptions o;
        o.header = header;
        o.covariate = covariate;
        o.covariate_continuous = continuous;
        return o;
    }
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
    cmd->add_flag("--header", args.header, "first row holds column names");
    cmd->add_option("--covariate", args.covariate,
                    "covariate column (name with --header, or 1-based index)");
    cmd->add_flag("--continuous", args.continuous, "covariate is continuous");
}

struct LoadedData {
    Dataset dataset;
    std::string digest;
};

LoadedData load_data(const DataArgs& args) {
    const std::string bytes = read_file(args.path);
    LoadedData out{read_dataset(bytes, args.options()), fnv1a_hex(bytes)};
    return out;
}

Provenance make_provenance(const std::string& command, Json config, std::string digest) {
    Provenance p;
    p.command = command;
    p.config = std::move(config);
    p.dataset_digest = std::move(digest);
    return p;
}

double parse_alpha(const std::string& text, std::int64_t n) {
    if (text == "aic") return 2.0;
    if (text == "bic") return std::log(static_cast<double>(std::max<std::int64_t>(n, 2)));
    try {
        std::size_t pos = 0;
        const double a = std::stod(text, &pos);
        if (pos != text.size() || a < 0) throw std::invalid_argument(text);
        return a;
    } catch (...) {
        throw ModelError("--alpha expects 'aic', 'bic' or a nonnegative number, got '" +
                         text + "'");
    }
}

std::vector<StateId> parse_states(const std::string& list) {
    std::vector<StateId> out;
    std::istringstream is(list);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            out.push_back(static_cast<StateId>(std::stol(item)));
        } catch (...) {
            throw ModelError("--states expects a comma-separated id list, got '" + item + "'");
        }
    }
    if (out.size() < 2) throw ModelError("--states needs at least two ids");
    return out;
}

std::string command_line(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) {
        if (i) os << ' ';
        os << argv[i];
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acyclic probabilistic finite automata: learning and analysis"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker threads (default: APFA_LAB_THREADS or all cores)");

    std::string out_path;
    const std::string full_command = command_line(argc, argv);

    // tree ------------------------------------------------------------------
    auto* tree = app.add_subcommand("tree", "build the sample automaton of a dataset");
    DataArgs tree_data;
    tree->add_option("data", tree_data.path, "CSV file")->required();
    add_data_flags(tree, tree_data);
    bool tree_form = false;
    tree->add_flag("--uncontracted", tree_form, "keep distinct leaves (sample tree)");
    tree->add_option("-o,--output", out_path, "output path (default stdout)");

    // fit -------------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit a model topology to a dataset");
    std::string fit_model;
    DataArgs fit_data;
    fit->add_option("model", fit_model, "model JSON")->required();
    fit->add_option("data", fit_data.path, "CSV file")->required();
    add_data_flags(fit, fit_data);
    fit->add_option("-o,--output", out_path, "output path (default stdout)");

    // merge -----------------------------------------------------------------
    auto* merge_cmd = app.add_subcommand("merge", "merge same-level states");
    std::string merge_model, merge_states;
    merge_cmd->add_option("model", merge_model, "model JSON with counts")->required();
    merge_cmd->add_option("--states", merge_states, "comma-separated state ids")->required();
    merge_cmd->add_option("-o,--output", out_path, "output path (default stdout)");

    // test ------------------------------------------------------------------
    auto* test = app.add_subcommand("test", "likelihood-ratio tests");
    std::string test_model, test_states, test_null;
    DataArgs test_data;
    bool test_global = false, test_json = false;
    test->add_option("model", test_model, "model JSON (omit for --global)");
    test->add_option("--data", test_data.path, "CSV file (counts recomputed)");
    add_data_flags(test, test_data);
    test->add_option("--states", test_states, "merge-test seed ids");
    test->add_option("--null", test_null, "nested null model JSON");
    test->add_flag("--global", test_global, "global covariate test (needs --data, --covariate)");
    test->add_flag("--json", test_json, "print JSON instead of the table");
    test->add_option("-o,--output", out_path, "write the JSON result here");

    // select ----------------------------------------------------------------
    auto* select_cmd = app.add_subcommand("select", "greedy model selection");
    DataArgs select_data;
    std::string alpha_text, trace_path, seedless_trace_path;
    double mu = -1.0;
    select_cmd->add_option("data", select_data.path, "CSV file")->required();
    add_data_flags(select_cmd, select_data);
    auto* alpha_opt =
        select_cmd->add_option("--alpha", alpha_text, "penalty: 'aic', 'bic' or a number");
    auto* mu_opt = select_cmd->add_option("--mu", mu, "max-difference threshold in (0,1]");
    select_cmd->add_option("--trace", trace_path, "write the merge trace JSON here");
    select_cmd->add_option("--seedless-trace", seedless_trace_path,
                           "write the trace without provenance (byte-stable)");
    select_cmd->add_option("-o,--output", out_path, "output path (default stdout)");

    // simulate ---------------------------------------------------------------
    auto* simulate_cmd = app.add_subcommand("simulate", "draw samples from a fitted model");
    std::string sim_model;
    long long sim_n = 0;
    std::uint64_t sim_seed = 0;
    bool sim_header = false;
    simulate_cmd->add_option("model", sim_model, "fitted model JSON")->required();
    simulate_cmd->add_option("-n,--rows", sim_n, "number of rows")->required();
    simulate_cmd->add_option("--seed", sim_seed, "RNG seed")->required();
    simulate_cmd->add_flag("--header", sim_header, "emit a header row");
    simulate_cmd->add_option("-o,--output", out_path, "output path (default stdout)");

    // equiv -------------------------------------------------------------------
    auto* equiv = app.add_subcommand("equiv", "graphical-model equivalence report");
    std::string equiv_model;
    equiv->add_option("model", equiv_model, "model JSON")->required();
    equiv->add_option("-o,--output", out_path, "output path (default stdout)");

    // export-dot --------------------------------------------------------------
    auto* dot = app.add_subcommand("export-dot", "render a model as DOT");
    std::string dot_model;
    DotStyle style;
    dot->add_option("model", dot_model, "model JSON")->required();
    dot->add_flag("--counts", style.show_counts, "append edge counts to labels");
    bool hide_probs = false;
    dot->add_flag("--no-probs", hide_probs, "omit probability labels");
    dot->add_flag("--show-synthetic", style.show_synthetic, "draw completion edges");
    dot->add_option("--precision", style.precision, "probability decimals");
    dot->add_option("-o,--output", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (threads <= 0) {
            if (const char* env = std::getenv("APFA_LAB_THREADS")) threads = std::atoi(env);
        }
        set_max_threads(threads);

        if (tree->parsed()) {
            const LoadedData data = load_data(tree_data);
            const CountedApfa c =
                tree_form ? sample_tree(data.dataset) : sample_apfa(data.dataset);
            Json config{{"header", tree_data.header}, {"uncontracted", tree_form}};
            const Json doc = apfa_to_json(
                c.graph, make_provenance(full_command, config, data.digest));
            write_output(doc.dump(2) + "\n", out_path);
        } else if (fit->parsed()) {
            const LoadedData data = load_data(fit_data);
            const Apfa topology = load_model(fit_model);
            const FittedApfa fitted = fit_mle(count_onto(topology, data.dataset));
            Json doc = fitted_to_json(
                fitted, data.dataset.size(),
                make_provenance(full_command, Json{{"header", fit_data.header}}, data.digest));
            if (data.dataset.covariate &&
                data.dataset.covariate->kind == CovariateKind::categorical) {
                attach_grouped(doc, fit_grouped(fitted.counted, data.dataset),
                               data.dataset.covariate->name);
            } else if (data.dataset.covariate) {
                attach_logistic(doc, fit_logistic_edges(fitted.counted, data.dataset),
                                data.dataset.covariate->name);
            }
            write_output(doc.dump(2) + "\n", out_path);
        } else if (merge_cmd->parsed()) {
            const CountedApfa c = make_counted(load_model(merge_model));
            const std::vector<StateId> seed = parse_states(merge_states);
            const MergeList ml = merge_list(c.graph, seed);
            const CountedApfa merged = merge(c, seed);
            for (const MergeGroup& g : ml.groups) {
                std::cerr << "merged level " << g.level << ":";
                for (StateId v : g.states) std::cerr << ' ' << v;
                std::cerr << '\n';
            }
            const Json doc = apfa_to_json(
                merged.graph,
                make_provenance(full_command, Json{{"states", seed}}, ""));
            write_output(doc.dump(2) + "\n", out_path);
        } else if (test->parsed()) {
            TestResult result;
            bool have_result = false;
            std::optional<CountedApfa> table_model;
            if (test_global) {
                if (test_data.path.empty() || test_data.covariate.empty())
                    throw ModelError("--global needs --data and --covariate");
                const LoadedData data = load_data(test_data);
                result = covariate_global_test(data.dataset);
                have_result = true;
            } else if (!test_null.empty()) {
                if (test_model.empty() || test_data.path.empty())
                    throw ModelError("nested test needs a model, --null and --data");
                const LoadedData data = load_data(test_data);
                const CountedApfa big = count_onto(load_model(test_model), data.dataset);
                const CountedApfa small = count_onto(load_model(test_null), data.dataset);
                result = nested_test(big, small);
                have_result = true;
                table_model = big;
            } else {
                if (test_model.empty() || test_states.empty())
                    throw ModelError("merge test needs a model and --states");
                const std::vector<StateId> seed = parse_states(test_states);
                CountedApfa c = test_data.path.empty()
                                    ? make_counted(load_model(test_model))
                                    : CountedApfa{};
                if (!test_data.path.empty()) {
                    const LoadedData data = load_data(test_data);
                    c = count_onto(load_model(test_model), data.dataset);
                    if (data.dataset.covariate) {
                        if (data.dataset.covariate->kind == CovariateKind::categorical) {
                            result = conditional_merge_test(fit_grouped(c, data.dataset), seed);
                        } else {
                            if (seed.size() != 2)
                                throw ModelError("continuous-covariate tests take a pair");
                            result = logistic_merge_test(fit_logistic_edges(c, data.dataset),
                                                         seed[0], seed[1]);
                        }
                        have_result = true;
                    }
                }
                if (!have_result) result = merge_test(c, seed);
                table_model = std::move(c);
            }
            const Json doc = test_result_to_json(result);
            if (!out_path.empty()) write_output(doc.dump(2) + "\n", out_path);
            if (test_json || !table_model) std::cout << doc.dump(2) << '\n';
            else std::cout << test_result_table(result, *table_model);
        } else if (select_cmd->parsed()) {
            const LoadedData data = load_data(select_data);
            SelectionConfig cfg;
            if (mu_opt->count() && alpha_opt->count())
                throw ModelError("--alpha and --mu are mutually exclusive");
            if (mu_opt->count()) {
                cfg.score = SelectionConfig::ScoreKind::max_difference;
                cfg.mu = mu;
                if (!select_data.covariate.empty())
                    throw ModelError("--mu selection does not support covariates");
            } else {
                cfg.alpha = parse_alpha(alpha_opt->count() ? alpha_text : "bic",
                                        data.dataset.size());
            }
            cfg.trace = !trace_path.empty() || !seedless_trace_path.empty();

            Json config{{"score", mu_opt->count() ? "max_difference" : "penalized"},
                        {"alpha", cfg.alpha},
                        {"mu", mu_opt->count() ? Json(cfg.mu) : Json(nullptr)},
                        {"covariate", select_data.covariate}};
            const Provenance prov = make_provenance(full_command, config, data.digest);

            Json doc;
            std::vector<TraceEntry> trace;
            if (!select_data.covariate.empty()) {
                const ConditionalSelection run = conditional_select(data.dataset, cfg);
                doc = fitted_to_json(run.pooled, data.dataset.size(), prov);
                if (run.grouped) attach_grouped(doc, *run.grouped,
                                                data.dataset.covariate->name);
                if (run.logistic) attach_logistic(doc, *run.logistic,
                                                  data.dataset.covariate->name);
                trace = run.trace;
            } else {
                SelectionRun run = select(data.dataset, cfg);
                doc = fitted_to_json(run.model, data.dataset.size(), prov);
                trace = std::move(run.trace);
            }
            if (!trace_path.empty())
                write_output(trace_to_json(trace, prov).dump(2) + "\n", trace_path);
            if (!seedless_trace_path.empty())
                write_output(trace_to_json(trace).dump(2) + "\n", seedless_trace_path);
            write_output(doc.dump(2) + "\n", out_path);
        } else if (simulate_cmd->parsed()) {
            const Apfa model = load_model(sim_model);
            const Dataset d = simulate(model, sim_n, sim_seed);
            write_output(write_csv(d, sim_header), out_path);
        } else if (equiv->parsed()) {
            const Apfa model = load_model(equiv_model);
            Json doc;
            doc["schema"] = "equiv-1";
            const auto q = property_q(model);
            doc["property_q"] = q.has_value();
            if (q) {
                doc["memory_sets"] = *q;
                const Dag g = apfa_to_dag(model);
                doc["dag"] = dag_to_json(g);
                UndirectedGraph u = UndirectedGraph::empty(g.n);
                for (int i = 1; i <= g.n; ++i)
                    for (int j : g.parents[i]) u.add_edge(i, j);
                doc["ug"] = ug_to_json(u);
            }
            Json statements = Json::array();
            for (const IndependenceStatement& s : extract_statements(model))
                statements.push_back(s.to_string());
            doc["statements"] = std::move(statements);
            write_output(doc.dump(2) + "\n", out_path);
        } else if (dot->parsed()) {
            style.show_probs = !hide_probs;
            write_output(export_dot(load_model(dot_model), style), out_path);
        }
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
