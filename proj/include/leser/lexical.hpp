#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leser/corpus.hpp"
#include "leser/ranked_list.hpp"

namespace leser {

struct TokenizerConfig {
    bool lowercase = true;
    std::size_t min_token_len = 1;  // in code points

    friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

/// Splits UTF-8 text into maximal runs of alphanumeric code points.
///
/// ASCII letters and digits are alphanumeric; non-ASCII code points count as
/// alphanumeric unless they fall in a punctuation, symbol or space block
/// (Latin-1 punctuation, General Punctuation, currency, arrows, box drawing,
/// CJK punctuation, fullwidth ASCII punctuation). Invalid UTF-8 bytes act as
/// separators. Lowercasing covers ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic capitals. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

struct Posting {
    std::uint32_t ordinal;
    std::uint32_t tf;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Smoothed, always-positive BM25 idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
double bm25_idf(std::size_t passage_count, std::size_t df);

/// Okapi BM25 inverted index over a corpus. Immutable after construction;
/// all query methods are safe for concurrent callers.
class InvertedIndex {
  public:
    /// Throws InvalidArgument for an empty corpus.
    static InvertedIndex build(const Corpus& corpus, const TokenizerConfig& cfg = {},
                               const Bm25Params& params = {});

    /// Reads the binary layout written by save(). See docs/formats.md.
    static InvertedIndex load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    [[nodiscard]] std::size_t passage_count() const noexcept { return keys_.size(); }
    [[nodiscard]] std::size_t term_count() const noexcept { return terms_.size(); }
    [[nodiscard]] double avgdl() const noexcept { return avgdl_; }
    [[nodiscard]] const TokenizerConfig& tokenizer() const noexcept { return cfg_; }
    [[nodiscard]] const Bm25Params& params() const noexcept { return params_; }

    [[nodiscard]] std::uint32_t doc_len(std::size_t ordinal) const { return doc_len_.at(ordinal); }
    [[nodiscard]] const std::string& key(std::size_t ordinal) const { return keys_.at(ordinal); }
    [[nodiscard]] std::optional<std::size_t> find(const std::string& canonical_key) const;

    [[nodiscard]] std::size_t df(std::string_view term) const;
    [[nodiscard]] double idf(std::string_view term) const;
    /// Postings sorted by ordinal; empty for an unknown term.
    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;

    /// Tokenizes with the configuration the index was built with.
    [[nodiscard]] std::vector<std::string> tokenize(std::string_view text) const {
        return leser::tokenize(text, cfg_);
    }

    /// BM25 of one passage; every query token instance contributes.
    /// Throws InvalidArgument for an out-of-range ordinal.
    [[nodiscard]] double score(std::span<const std::string> query_tokens, std::size_t ordinal) const;

    /// Top-k passages sharing at least one term with the query, ranked by
    /// score then key. Throws InvalidArgument when k == 0.
    [[nodiscard]] RankedList search(std::string_view query_text, std::size_t k,
                                    std::string query_id = {}) const;

    friend bool operator==(const InvertedIndex&, const InvertedIndex&);

  private:
    InvertedIndex() = default;
    void finish();
    [[nodiscard]] std::optional<std::uint32_t> term_id(std::string_view term) const;
    [[nodiscard]] double term_score(double idf, std::uint32_t tf, std::uint32_t doc_len) const;

    TokenizerConfig cfg_;
    Bm25Params params_;
    std::vector<std::string> keys_;
    std::vector<std::uint32_t> doc_len_;
    double avgdl_ = 0.0;

    // Terms sorted lexicographically; term id = position.
    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<double> idf_;

    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, std::size_t> key_index_;
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> term_index_;
};

}  // namespace leser
