#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "leser/corpus.hpp"
#include "leser/dense.hpp"
#include "leser/eval.hpp"
#include "leser/lexical.hpp"
#include "leser/ranked_list.hpp"

namespace leser {

struct FusionConfig {
    double alpha = 0.3;           // weight on the normalized dense score
    std::size_t pool_size = 20;   // dense candidates fetched before reranking
    std::size_t output_k = 10;    // reranked results kept

    /// Throws InvalidArgument unless alpha in [0,1] and 1 <= output_k <= pool_size.
    void validate() const;
};

/// Min-max scaling to [0,1]. A constant list maps to 0.5 everywhere.
/// Throws InvalidArgument for an empty list.
std::vector<double> minmax_normalize(const std::vector<double>& scores);

/// Weighted aggregation of two score lists over the same candidates:
/// alpha * norm(dense) + (1 - alpha) * norm(lexical), top cfg.output_k kept.
/// Throws InvalidArgument when the lists differ in length.
RankedList combine_scores(std::string query_id, const std::vector<std::string>& keys,
                          const std::vector<double>& dense, const std::vector<double>& lexical,
                          const FusionConfig& cfg);

/// Lexical reranking of a dense candidate pool.
///
/// Each candidate gets alpha * norm(dense) + (1 - alpha) * norm(bm25), both
/// normalized over the pool only. BM25 uses the index's corpus-wide
/// statistics. The result keeps the top output_k by combined score (ties by
/// key) and never contains a key outside the pool.
///
/// Throws InvalidArgument when a candidate key is not in the index or the
/// pool is larger than cfg.pool_size.
RankedList leser_rerank(std::string query_id, std::string_view query_text, const RankedList& dense_candidates,
                        const InvertedIndex& index, const FusionConfig& cfg);

enum class RetrievalMode { bm25, dense, leser };

std::string_view to_string(RetrievalMode mode);
/// Throws InvalidArgument for an unknown name.
RetrievalMode parse_mode(std::string_view name);

/// Borrowed handles to whatever a retrieval mode needs. Query vectors are
/// looked up by query id in `query_vectors`.
struct RetrievalResources {
    const InvertedIndex* index = nullptr;
    const EmbeddingStore* passage_vectors = nullptr;
    const EmbeddingStore* query_vectors = nullptr;
    FusionConfig fusion;
};

/// bm25 -> index search; dense -> exact cosine search; leser -> dense pool of
/// fusion.pool_size reranked down to k. Throws InvalidArgument when a needed
/// resource is missing, the stores disagree on dimension, or the query has
/// no vector.
RankedList retrieve(RetrievalMode mode, const Query& query, const RetrievalResources& resources, std::size_t k);

enum class TuneObjective { recall, map };

struct AlphaPoint {
    double alpha = 0.0;
    double mean_recall = 0.0;
    double mean_ap = 0.0;
};

struct TuneReport {
    TuneObjective objective = TuneObjective::map;
    std::size_t k = 10;
    double best_alpha = 0.0;
    std::vector<AlphaPoint> points;  // in grid order
};

/// Grid search over alpha on labeled queries. The best point maximizes the
/// objective; ties go to the smaller alpha. Dense pools are computed once and
/// shared across grid points.
TuneReport tune_alpha(const std::vector<Query>& queries, const RetrievalResources& resources,
                      const std::vector<double>& grid, TuneObjective objective, std::size_t k = 10);

/// {0, step, 2*step, ..., 1}, each rounded to 1e-9 so 0.1-steps print cleanly.
std::vector<double> alpha_grid(double step);

nlohmann::ordered_json to_json(const TuneReport& report);

}  // namespace leser
