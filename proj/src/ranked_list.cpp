#include "leser/ranked_list.hpp"

#include <algorithm>
#include <unordered_set>

#include "leser/error.hpp"

namespace leser {

std::vector<std::string> RankedList::keys() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.key);
    }
    return out;
}

void sort_top_k(std::vector<ScoredKey>& entries, std::size_t k) {
    if (k < entries.size()) {
        auto mid = entries.begin() + static_cast<std::ptrdiff_t>(k);
        std::partial_sort(entries.begin(), mid, entries.end(), ranks_before);
        entries.erase(mid, entries.end());
    } else {
        std::sort(entries.begin(), entries.end(), ranks_before);
    }
}

void check_ranked(const RankedList& list) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        if (!seen.insert(e.key).second) {
            throw InvalidArgument("run for " + list.query_id + " repeats key " + e.key);
        }
        if (i > 0 && !ranks_before(list.entries[i - 1], e)) {
            throw InvalidArgument("run for " + list.query_id + " is not sorted at rank " +
                                  std::to_string(i + 1));
        }
    }
}

}  // namespace leser
