#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "leser/corpus.hpp"
#include "leser/ranked_list.hpp"

namespace leser {

using GoldSet = std::set<std::string>;  // canonical passage keys

/// Binary relevance judgments: query id -> non-empty gold set.
using Qrels = std::map<std::string, GoldSet>;

/// Builds qrels from labeled queries. Throws InvalidArgument for an
/// unlabeled query or a repeated query id.
Qrels make_qrels(const std::vector<Query>& queries);

/// |top-k ∩ gold| / |gold|.
double recall_at_k(const RankedList& run, const GoldSet& gold, std::size_t k);

/// Sum of precision@r over relevant ranks r <= k, divided by min(|gold|, k).
double average_precision_at_k(const RankedList& run, const GoldSet& gold, std::size_t k);

struct QueryMetrics {
    double recall = 0.0;
    double average_precision = 0.0;
};

struct EvalReport {
    std::size_t k = 0;
    std::map<std::string, QueryMetrics> per_query;
    double mean_recall = 0.0;
    double mean_ap = 0.0;
    std::size_t query_count = 0;
    std::vector<std::string> missing;  // judged queries without a run, scored (0, 0)
};

/// Scores one run per judged query. A query without a run counts as zero.
/// Throws InvalidArgument for duplicate runs, runs for unjudged queries, or
/// k == 0.
EvalReport evaluate_run(const std::vector<RankedList>& runs, const Qrels& qrels, std::size_t k);

nlohmann::ordered_json to_json(const EvalReport& report);

/// Six-column run format: `query_id Q0 passage_key rank score tag`.
/// Runs are written in the given order; scores with 17 significant digits.
void write_run_file(const std::vector<RankedList>& runs, const std::filesystem::path& path,
                    const std::string& tag);
std::string format_run(const std::vector<RankedList>& runs, const std::string& tag);

/// Inverse of write_run_file. Query order follows first appearance. With
/// `max_per_query`, a query with more entries is an error.
std::vector<RankedList> read_run_file(const std::filesystem::path& path,
                                      std::optional<std::size_t> max_per_query = std::nullopt);

}  // namespace leser
