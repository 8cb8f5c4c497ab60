#include "leser/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "leser/error.hpp"

namespace leser {

void FusionConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("alpha must lie in [0, 1]");
    }
    if (output_k == 0 || output_k > pool_size) {
        throw InvalidArgument("output_k must satisfy 1 <= output_k <= pool_size");
    }
}

std::vector<double> minmax_normalize(const std::vector<double>& scores) {
    if (scores.empty()) {
        throw InvalidArgument("cannot normalize an empty score list");
    }
    auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> out(scores.size(), 0.5);
    if (hi > lo) {
        const double range = hi - lo;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            out[i] = (scores[i] - lo) / range;
        }
    }
    return out;
}

RankedList combine_scores(std::string query_id, const std::vector<std::string>& keys,
                          const std::vector<double>& dense, const std::vector<double>& lexical,
                          const FusionConfig& cfg) {
    cfg.validate();
    if (keys.size() != dense.size() || keys.size() != lexical.size()) {
        throw InvalidArgument("score lists differ in length");
    }
    RankedList out;
    out.query_id = std::move(query_id);
    if (keys.empty()) {
        return out;
    }
    const auto dense_norm = minmax_normalize(dense);
    const auto lexical_norm = minmax_normalize(lexical);
    out.entries.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const double combined = cfg.alpha * dense_norm[i] + (1.0 - cfg.alpha) * lexical_norm[i];
        out.entries.push_back(ScoredKey{keys[i], combined});
    }
    sort_top_k(out.entries, cfg.output_k);
    return out;
}

RankedList leser_rerank(std::string query_id, std::string_view query_text, const RankedList& dense_candidates,
                        const InvertedIndex& index, const FusionConfig& cfg) {
    cfg.validate();
    if (dense_candidates.size() > cfg.pool_size) {
        throw InvalidArgument("candidate pool of " + std::to_string(dense_candidates.size()) +
                              " exceeds pool_size " + std::to_string(cfg.pool_size));
    }

    const auto tokens = index.tokenize(query_text);
    std::vector<std::string> keys;
    std::vector<double> dense;
    std::vector<double> lexical;
    keys.reserve(dense_candidates.size());
    dense.reserve(dense_candidates.size());
    lexical.reserve(dense_candidates.size());
    for (const auto& c : dense_candidates.entries) {
        auto ord = index.find(c.key);
        if (!ord) {
            throw InvalidArgument("candidate " + c.key + " is not in the lexical index");
        }
        keys.push_back(c.key);
        dense.push_back(c.score);
        lexical.push_back(index.score(tokens, *ord));
    }
    return combine_scores(std::move(query_id), keys, dense, lexical, cfg);
}

std::string_view to_string(RetrievalMode mode) {
    switch (mode) {
        case RetrievalMode::bm25:
            return "bm25";
        case RetrievalMode::dense:
            return "dense";
        case RetrievalMode::leser:
            return "leser";
    }
    return "unknown";
}

RetrievalMode parse_mode(std::string_view name) {
    if (name == "bm25") {
        return RetrievalMode::bm25;
    }
    if (name == "dense") {
        return RetrievalMode::dense;
    }
    if (name == "leser") {
        return RetrievalMode::leser;
    }
    throw InvalidArgument("unknown retrieval mode '" + std::string(name) + "'");
}

namespace {

const EmbeddingStore& need_passages(const RetrievalResources& r) {
    if (r.passage_vectors == nullptr) {
        throw InvalidArgument("passage embeddings are required for this mode");
    }
    return *r.passage_vectors;
}

std::span<const float> query_vector(const RetrievalResources& r, const Query& query) {
    if (r.query_vectors == nullptr) {
        throw InvalidArgument("query embeddings are required for this mode");
    }
    if (r.query_vectors->dim() != need_passages(r).dim()) {
        throw InvalidArgument("query embeddings have dimension " + std::to_string(r.query_vectors->dim()) +
                              ", passage embeddings " + std::to_string(need_passages(r).dim()));
    }
    auto row = r.query_vectors->find(query.query_id);
    if (!row) {
        throw InvalidArgument("no embedding for question " + query.query_id);
    }
    return r.query_vectors->row(*row);
}

const InvertedIndex& need_index(const RetrievalResources& r) {
    if (r.index == nullptr) {
        throw InvalidArgument("a lexical index is required for this mode");
    }
    return *r.index;
}

RankedList dense_pool(const Query& query, const RetrievalResources& r) {
    return need_passages(r).search(query_vector(r, query), r.fusion.pool_size, query.query_id);
}

}  // namespace

RankedList retrieve(RetrievalMode mode, const Query& query, const RetrievalResources& resources, std::size_t k) {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    switch (mode) {
        case RetrievalMode::bm25:
            return need_index(resources).search(query.text, k, query.query_id);
        case RetrievalMode::dense:
            return need_passages(resources).search(query_vector(resources, query), k, query.query_id);
        case RetrievalMode::leser: {
            const auto& index = need_index(resources);
            FusionConfig cfg = resources.fusion;
            cfg.output_k = k;
            cfg.validate();
            return leser_rerank(query.query_id, query.text, dense_pool(query, resources), index, cfg);
        }
    }
    throw InvalidArgument("unknown retrieval mode");
}

std::vector<double> alpha_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw InvalidArgument("grid step must lie in (0, 1]");
    }
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        grid.push_back(std::round(static_cast<double>(i) * step * 1e9) / 1e9);
    }
    if (grid.back() < 1.0) {
        grid.push_back(1.0);
    }
    return grid;
}

TuneReport tune_alpha(const std::vector<Query>& queries, const RetrievalResources& resources,
                      const std::vector<double>& grid, TuneObjective objective, std::size_t k) {
    if (grid.empty()) {
        throw InvalidArgument("alpha grid is empty");
    }
    for (double a : grid) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw InvalidArgument("alpha grid values must lie in [0, 1]");
        }
    }
    const Qrels qrels = make_qrels(queries);
    const auto& index = need_index(resources);

    std::vector<RankedList> pools;
    pools.reserve(queries.size());
    for (const auto& q : queries) {
        pools.push_back(dense_pool(q, resources));
    }

    TuneReport report;
    report.objective = objective;
    report.k = k;
    double best = -1.0;
    for (double alpha : grid) {
        FusionConfig cfg = resources.fusion;
        cfg.alpha = alpha;
        cfg.output_k = k;
        std::vector<RankedList> runs;
        runs.reserve(queries.size());
        for (std::size_t i = 0; i < queries.size(); ++i) {
            runs.push_back(leser_rerank(queries[i].query_id, queries[i].text, pools[i], index, cfg));
        }
        const EvalReport eval = evaluate_run(runs, qrels, k);
        report.points.push_back(AlphaPoint{alpha, eval.mean_recall, eval.mean_ap});
        const double value = objective == TuneObjective::recall ? eval.mean_recall : eval.mean_ap;
        if (value > best || (value == best && alpha < report.best_alpha)) {
            best = value;
            report.best_alpha = alpha;
        }
    }
    return report;
}

nlohmann::ordered_json to_json(const TuneReport& report) {
    nlohmann::ordered_json j;
    j["objective"] = report.objective == TuneObjective::recall ? "recall" : "map";
    j["k"] = report.k;
    j["best_alpha"] = report.best_alpha;
    auto& pts = j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : report.points) {
        pts.push_back({{"alpha", p.alpha}, {"mean_recall", p.mean_recall}, {"mean_ap", p.mean_ap}});
    }
    return j;
}

}  // namespace leser
