#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace leser {

struct ScoredKey {
    std::string key;  // canonical passage key
    double score = 0.0;

    friend bool operator==(const ScoredKey&, const ScoredKey&) = default;
};

/// Strict weak order used for every ranking: score descending, then key
/// ascending.
inline bool ranks_before(const ScoredKey& a, const ScoredKey& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.key < b.key;
}

/// Descending-score candidate list for one query. The unit of exchange
/// between retrieval, fusion and evaluation.
struct RankedList {
    std::string query_id;
    std::vector<ScoredKey> entries;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
    [[nodiscard]] std::vector<std::string> keys() const;

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Sorts `entries` by ranks_before and keeps the first `k`. Uses a partial
/// sort so selecting a small k from a large pool stays cheap.
void sort_top_k(std::vector<ScoredKey>& entries, std::size_t k);

/// Throws InvalidArgument unless scores are non-increasing, ties ordered by
/// key, and keys unique.
void check_ranked(const RankedList& list);

}  // namespace leser
