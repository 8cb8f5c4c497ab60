#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "leser/ranked_list.hpp"

namespace leser {

/// Fixed-dimension embeddings keyed by id (canonical passage key or
/// question id). Every row is L2-normalized on insertion, so cosine
/// similarity is a plain dot product.
class EmbeddingStore {
  public:
    /// Throws InvalidArgument when dim == 0.
    explicit EmbeddingStore(std::size_t dim);

    /// Normalizes and appends a row. Throws InvalidArgument on a duplicate
    /// id, a dimension mismatch or a zero (or non-finite) vector.
    void add(std::string id, std::span<const float> vec);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] std::span<const float> row(std::size_t i) const;
    [[nodiscard]] std::optional<std::size_t> find(const std::string& id) const;

    /// Exact top-k by cosine similarity; ties broken by ascending id. The
    /// query is normalized here. Throws InvalidArgument for k == 0, a
    /// dimension mismatch or a zero query.
    [[nodiscard]] RankedList search(std::span<const float> query, std::size_t k,
                                    std::string query_id = {}) const;

  private:
    std::size_t dim_;
    std::vector<std::string> ids_;
    std::vector<float> data_;  // row-major, size() * dim_
    std::unordered_map<std::string, std::size_t> index_;
};

/// Reads an EMB1 file (see docs/formats.md). Rows are normalized on import.
/// Throws FormatError naming the record index on any violation.
EmbeddingStore read_embeddings(const std::filesystem::path& path);

/// Writes an EMB1 file. Throws InvalidArgument for an empty store.
void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

}  // namespace leser
