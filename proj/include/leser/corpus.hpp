#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace leser {

/// Address of a regulatory passage: (DocumentID, PassageID).
///
/// The canonical string form is `doc_id#passage_id`. Neither component may
/// contain `#`, which makes the canonical form injective.
class PassageKey {
  public:
    PassageKey() = default;
    PassageKey(std::string doc_id, std::string passage_id);

    /// Parses `doc#passage`; throws FormatError on anything else.
    static PassageKey parse(std::string_view canonical);

    [[nodiscard]] const std::string& doc_id() const noexcept { return doc_id_; }
    [[nodiscard]] const std::string& passage_id() const noexcept { return passage_id_; }
    [[nodiscard]] std::string canonical() const { return doc_id_ + '#' + passage_id_; }

    friend auto operator<=>(const PassageKey&, const PassageKey&) = default;

  private:
    std::string doc_id_;
    std::string passage_id_;
};

struct Passage {
    PassageKey key;
    std::string text;  // verbatim; normalization is the tokenizer's job
};

/// Ordered passage collection with key lookup. Immutable once built.
class Corpus {
  public:
    Corpus() = default;

    /// Throws FormatError on a duplicate key or a blank passage.
    explicit Corpus(std::vector<Passage> passages);

    [[nodiscard]] std::size_t size() const noexcept { return passages_.size(); }
    [[nodiscard]] bool empty() const noexcept { return passages_.empty(); }
    [[nodiscard]] const std::vector<Passage>& passages() const noexcept { return passages_; }
    [[nodiscard]] const Passage& operator[](std::size_t ordinal) const { return passages_.at(ordinal); }

    [[nodiscard]] std::optional<std::size_t> find(const std::string& canonical_key) const;
    [[nodiscard]] std::optional<std::size_t> find(const PassageKey& key) const {
        return find(key.canonical());
    }

  private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, std::size_t> key_index_;
};

struct Query {
    std::string query_id;
    std::string text;
    std::set<PassageKey> gold;             // empty for unlabeled questions
    std::optional<std::string> group;      // opaque "Group" field, unused by retrieval
};

/// Non-fatal findings collected while loading (e.g. unusual gold counts).
using Warnings = std::vector<std::string>;

/// Loads one document file, or every `*.json` file of a directory in
/// lexicographic filename order. Passage order follows file order.
Corpus load_corpus(const std::filesystem::path& path);

/// Loads a split file. With `require_gold`, a record without passage
/// annotations is an error. Gold sizes outside 1..6 are reported through
/// `warnings` when provided.
std::vector<Query> load_queries(const std::filesystem::path& path, bool require_gold,
                                Warnings* warnings = nullptr);

/// Histogram of gold-set sizes. Throws InvalidArgument for an unlabeled query.
std::map<std::size_t, std::size_t> split_histogram(const std::vector<Query>& queries);

/// Gold keys that do not resolve in `corpus`, as "query_id: key" strings.
std::vector<std::string> unresolved_gold(const Corpus& corpus, const std::vector<Query>& queries);

}  // namespace leser
