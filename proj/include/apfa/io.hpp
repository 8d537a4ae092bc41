/* io.hpp -- model documents (JSON), DOT export, dataset digests. */

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "apfa/conditional.hpp"
#include "apfa/equivalence.hpp"
#include "apfa/estimation.hpp"
#include "apfa/inference.hpp"
#include "apfa/selection.hpp"

namespace apfa {

using Json = nlohmann::ordered_json;

struct Provenance {
    std::string command;
    Json config = Json::object();
    std::string dataset_digest;
};

/// FNV-1a 64-bit hex digest, used to tie artifacts to their input bytes.
std::string fnv1a_hex(std::string_view bytes);

/// Serializes the automaton (symbols, counts, probabilities, synthetic
/// flags) plus optional fitted summaries and provenance. The document
/// round-trips: apfa_from_json(apfa_to_json(a)) is structurally identical.
Json apfa_to_json(const Apfa& a, const std::optional<Provenance>& provenance = std::nullopt);
Json fitted_to_json(const FittedApfa& f, std::int64_t sample_size,
                    const std::optional<Provenance>& provenance = std::nullopt);
Apfa apfa_from_json(const Json& doc);

/// Optional per-edge conditional parameters appended by the CLI.
void attach_grouped(Json& doc, const GroupedCounts& g, const std::string& covariate_name);
void attach_logistic(Json& doc, const LogisticApfaModel& m, const std::string& covariate_name);

Json test_result_to_json(const TestResult& t);
/// Human-readable decomposition table: one row per cascade element with its
/// node-symbol table, G^2 and df, then the sum line.
std::string test_result_table(const TestResult& t, const CountedApfa& c);

Json trace_to_json(const std::vector<TraceEntry>& trace,
                   const std::optional<Provenance>& provenance = std::nullopt);

Json dag_to_json(const Dag& g);
Dag dag_from_json(const Json& doc);
Json ug_to_json(const UndirectedGraph& u);

struct DotStyle {
    bool show_counts = false;
    bool show_probs = true;
    bool show_synthetic = false;
    int precision = 2;
};

/// Left-to-right layout, one rank per level, edge colors keyed by symbol
/// (1 red, 2 blue, then a fixed palette), labels are probabilities to
/// `precision` decimals plus counts when requested. Synthetic edges (and
/// states reachable only through them) are hidden unless requested.
std::string export_dot(const Apfa& a, const DotStyle& style = {});

}  // namespace apfa
