#include "leser/dense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "leser/error.hpp"

namespace leser {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;

/// Returns the L2 norm accumulated in double; 0 for non-finite input.
double l2_norm(std::span<const float> v) {
    double sum = 0.0;
    for (float x : v) {
        if (!std::isfinite(x)) {
            return 0.0;
        }
        sum += static_cast<double>(x) * x;
    }
    return std::sqrt(sum);
}

double dot(std::span<const float> a, std::span<const float> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += static_cast<double>(a[i]) * b[i];
    }
    return sum;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) {
        throw InvalidArgument("embedding dimension must be at least 1");
    }
}

void EmbeddingStore::add(std::string id, std::span<const float> vec) {
    if (vec.size() != dim_) {
        throw InvalidArgument("vector for " + id + " has dimension " + std::to_string(vec.size()) +
                              ", store expects " + std::to_string(dim_));
    }
    const double norm = l2_norm(vec);
    if (norm == 0.0) {
        throw InvalidArgument("zero or non-finite vector for " + id);
    }
    if (index_.contains(id)) {
        throw InvalidArgument("duplicate embedding id " + id);
    }
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    for (float x : vec) {
        data_.push_back(static_cast<float>(x / norm));
    }
}

std::span<const float> EmbeddingStore::row(std::size_t i) const {
    if (i >= ids_.size()) {
        throw InvalidArgument("embedding row " + std::to_string(i) + " out of range");
    }
    return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> EmbeddingStore::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

RankedList EmbeddingStore::search(std::span<const float> query, std::size_t k, std::string query_id) const {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    if (query.size() != dim_) {
        throw InvalidArgument("query has dimension " + std::to_string(query.size()) + ", store expects " +
                              std::to_string(dim_));
    }
    const double norm = l2_norm(query);
    if (norm == 0.0) {
        throw InvalidArgument("zero or non-finite query vector");
    }
    std::vector<float> q(query.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = static_cast<float>(query[i] / norm);
    }

    RankedList out;
    out.query_id = std::move(query_id);
    out.entries.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        double s = std::clamp(dot(q, row(i)), -1.0, 1.0);
        out.entries.push_back(ScoredKey{ids_[i], s});
    }
    sort_top_k(out.entries, k);
    return out;
}

// Layout: "EMB1", u32 version, u32 dim, u64 count, then per record u16 id
// length, id bytes, dim x f32. All little-endian.
EmbeddingStore read_embeddings(const std::filesystem::path& path) {
    using detail::read_le;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    auto fail = [&](const std::string& what) { return FormatError(path.string() + ": " + what); };

    char magic[4];
    std::uint32_t version = 0;
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
        throw fail("bad magic, not an EMB1 file");
    }
    if (!read_le(in, version) || version != kVersion) {
        throw fail("unsupported EMB1 version");
    }
    if (!read_le(in, dim) || dim == 0) {
        throw fail("invalid dimension");
    }
    if (!read_le(in, count)) {
        throw fail("truncated header");
    }

    EmbeddingStore store(dim);
    std::vector<float> vec(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string id;
        if (!detail::read_short_string(in, id)) {
            throw fail("truncated at record " + std::to_string(i) + " of " + std::to_string(count));
        }
        for (auto& x : vec) {
            if (!read_le(in, x)) {
                throw fail("truncated at record " + std::to_string(i) + " of " + std::to_string(count));
            }
        }
        try {
            store.add(std::move(id), vec);
        } catch (const InvalidArgument& e) {
            throw fail("record " + std::to_string(i) + ": " + e.what());
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw fail("trailing bytes after " + std::to_string(count) + " records");
    }
    return store;
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
    using detail::write_le;
    if (store.empty()) {
        throw InvalidArgument("refusing to write an empty embedding store");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(kMagic, sizeof kMagic);
    write_le<std::uint32_t>(out, kVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim()));
    write_le<std::uint64_t>(out, store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        detail::write_short_string(out, store.ids()[i]);
        for (float x : store.row(i)) {
            write_le<float>(out, x);
        }
    }
    if (!out.flush()) {
        throw Error("write failed: " + path.string());
    }
}

}  // namespace leser
