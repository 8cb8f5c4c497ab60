#include "leser/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "binary_io.hpp"
#include "leser/error.hpp"

namespace leser {

namespace {

constexpr char kIndexMagic[4] = {'L', 'X', 'I', '1'};
constexpr std::uint32_t kIndexVersion = 1;

/// Decodes one code point starting at `i`; returns nullopt (and advances
/// one byte) on malformed input.
std::optional<char32_t> next_code_point(std::string_view s, std::size_t& i) {
    auto byte = [&](std::size_t at) { return static_cast<unsigned char>(s[at]); };
    unsigned char lead = byte(i);
    if (lead < 0x80) {
        ++i;
        return lead;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++i;
        return std::nullopt;
    }
    if (i + len > s.size()) {
        ++i;
        return std::nullopt;
    }
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char c = byte(i + k);
        if ((c & 0xC0) != 0x80) {
            ++i;
            return std::nullopt;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return std::nullopt;
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_alnum(char32_t cp) {
    if (cp < 0x80) {
        return in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
    }
    if (in(cp, 0x80, 0xBF)) {
        // Latin-1 punctuation block; keep the ordinal indicators, micro sign,
        // superscript digits and vulgar fractions.
        return cp == 0xAA || cp == 0xB2 || cp == 0xB3 || cp == 0xB5 || cp == 0xB9 || cp == 0xBA ||
               in(cp, 0xBC, 0xBE);
    }
    if (cp == 0xD7 || cp == 0xF7 || cp == 0xFEFF) {
        return false;
    }
    return !(in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x2190, 0x23FF) ||
             in(cp, 0x2500, 0x27BF) || in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F) ||
             in(cp, 0xFE30, 0xFE4F) || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
             in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65));
}

char32_t to_lower(char32_t cp) {
    if (in(cp, 'A', 'Z')) {
        return cp + 0x20;
    }
    if (cp < 0xC0) {
        return cp;
    }
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) {
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) {
        return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (in(cp, 0x410, 0x42F)) {
        return cp + 0x20;
    }
    if (in(cp, 0x400, 0x40F)) {
        return cp + 0x50;
    }
    return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t current_len = 0;
    auto flush = [&] {
        if (current_len > 0 && current_len >= cfg.min_token_len) {
            tokens.push_back(std::move(current));
        }
        current.clear();
        current_len = 0;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        auto cp = next_code_point(text, i);
        if (!cp || !is_alnum(*cp)) {
            flush();
            continue;
        }
        append_utf8(current, cfg.lowercase ? to_lower(*cp) : *cp);
        ++current_len;
    }
    flush();
    return tokens;
}

double bm25_idf(std::size_t passage_count, std::size_t df) {
    auto n = static_cast<double>(passage_count);
    auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

InvertedIndex InvertedIndex::build(const Corpus& corpus, const TokenizerConfig& cfg,
                                   const Bm25Params& params) {
    if (corpus.empty()) {
        throw InvalidArgument("cannot index an empty corpus");
    }
    if (cfg.min_token_len == 0) {
        throw InvalidArgument("min_token_len must be at least 1");
    }
    InvertedIndex index;
    index.cfg_ = cfg;
    index.params_ = params;

    // std::map keeps terms sorted so term ids are independent of hash order.
    std::map<std::string, std::vector<Posting>, std::less<>> postings;
    std::unordered_map<std::string, std::uint32_t> tf;
    for (std::size_t ord = 0; ord < corpus.size(); ++ord) {
        const Passage& p = corpus[ord];
        index.keys_.push_back(p.key.canonical());
        auto tokens = leser::tokenize(p.text, cfg);
        index.doc_len_.push_back(static_cast<std::uint32_t>(tokens.size()));
        tf.clear();
        for (auto& t : tokens) {
            ++tf[std::move(t)];
        }
        for (auto& [term, count] : tf) {
            postings[term].push_back(Posting{static_cast<std::uint32_t>(ord), count});
        }
    }
    for (auto& [term, list] : postings) {
        index.terms_.push_back(term);
        index.postings_.push_back(std::move(list));
    }
    index.finish();
    return index;
}

void InvertedIndex::finish() {
    if (keys_.empty()) {
        throw InvalidArgument("index has no passages");
    }
    std::uint64_t total = std::accumulate(doc_len_.begin(), doc_len_.end(), std::uint64_t{0});
    avgdl_ = static_cast<double>(total) / static_cast<double>(keys_.size());
    // An all-punctuation corpus has avgdl 0; no term ever matches it, but keep
    // the length normalization finite.
    if (avgdl_ == 0.0) {
        avgdl_ = 1.0;
    }

    key_index_.clear();
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        if (!key_index_.emplace(keys_[i], i).second) {
            throw FormatError("duplicate passage key in index: " + keys_[i]);
        }
    }
    term_index_.clear();
    idf_.clear();
    for (std::uint32_t t = 0; t < terms_.size(); ++t) {
        term_index_.emplace(terms_[t], t);
        idf_.push_back(bm25_idf(keys_.size(), postings_[t].size()));
    }
}

std::optional<std::size_t> InvertedIndex::find(const std::string& canonical_key) const {
    auto it = key_index_.find(canonical_key);
    if (it == key_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::uint32_t> InvertedIndex::term_id(std::string_view term) const {
    auto it = term_index_.find(term);
    if (it == term_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t InvertedIndex::df(std::string_view term) const {
    auto id = term_id(term);
    return id ? postings_[*id].size() : 0;
}

double InvertedIndex::idf(std::string_view term) const {
    auto id = term_id(term);
    return id ? idf_[*id] : bm25_idf(keys_.size(), 0);
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
    auto id = term_id(term);
    if (!id) {
        return {};
    }
    return postings_[*id];
}

double InvertedIndex::term_score(double idf, std::uint32_t tf, std::uint32_t doc_len) const {
    const double k1 = params_.k1;
    const double b = params_.b;
    const double f = tf;
    const double norm = k1 * (1.0 - b + b * static_cast<double>(doc_len) / avgdl_);
    return idf * (f * (k1 + 1.0)) / (f + norm);
}

double InvertedIndex::score(std::span<const std::string> query_tokens, std::size_t ordinal) const {
    if (ordinal >= keys_.size()) {
        throw InvalidArgument("passage ordinal " + std::to_string(ordinal) + " out of range");
    }
    double total = 0.0;
    for (const auto& token : query_tokens) {
        auto id = term_id(token);
        if (!id) {
            continue;
        }
        const auto& list = postings_[*id];
        auto it = std::lower_bound(list.begin(), list.end(), ordinal,
                                   [](const Posting& p, std::size_t o) { return p.ordinal < o; });
        if (it == list.end() || it->ordinal != ordinal) {
            continue;
        }
        total += term_score(idf_[*id], it->tf, doc_len_[ordinal]);
    }
    return total;
}

RankedList InvertedIndex::search(std::string_view query_text, std::size_t k, std::string query_id) const {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    RankedList out;
    out.query_id = std::move(query_id);

    // Term-at-a-time accumulation. Contributions are added in query-token
    // order, the same order score() uses, so both paths agree bit for bit.
    std::vector<double> acc(keys_.size(), 0.0);
    std::vector<char> touched(keys_.size(), 0);
    std::vector<std::uint32_t> hits;
    for (const auto& token : tokenize(query_text)) {
        auto id = term_id(token);
        if (!id) {
            continue;
        }
        const double w = idf_[*id];
        for (const Posting& p : postings_[*id]) {
            acc[p.ordinal] += term_score(w, p.tf, doc_len_[p.ordinal]);
            if (!touched[p.ordinal]) {
                touched[p.ordinal] = 1;
                hits.push_back(p.ordinal);
            }
        }
    }

    out.entries.reserve(hits.size());
    for (auto ord : hits) {
        out.entries.push_back(ScoredKey{keys_[ord], acc[ord]});
    }
    sort_top_k(out.entries, k);
    return out;
}

bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
    return a.cfg_ == b.cfg_ && a.params_ == b.params_ && a.keys_ == b.keys_ &&
           a.doc_len_ == b.doc_len_ && a.avgdl_ == b.avgdl_ && a.terms_ == b.terms_ &&
           a.postings_ == b.postings_;
}

// Layout: "LXI1", u32 version, u64 header length, JSON header, then per
// passage (u16 key length, key bytes, u32 doc_len), then per term in
// lexicographic order (u16 term length, term bytes, u32 posting count,
// count x (u32 ordinal, u32 tf)).
void InvertedIndex::save(const std::filesystem::path& path) const {
    using detail::write_le;
    nlohmann::ordered_json header;
    header["tokenizer"] = {{"lowercase", cfg_.lowercase}, {"min_token_len", cfg_.min_token_len}};
    header["k1"] = params_.k1;
    header["b"] = params_.b;
    header["N"] = keys_.size();
    header["avgdl"] = avgdl_;
    header["terms"] = terms_.size();
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(kIndexMagic, sizeof kIndexMagic);
    write_le<std::uint32_t>(out, kIndexVersion);
    write_le<std::uint64_t>(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        detail::write_short_string(out, keys_[i]);
        write_le<std::uint32_t>(out, doc_len_[i]);
    }
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        detail::write_short_string(out, terms_[t]);
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(postings_[t].size()));
        for (const Posting& p : postings_[t]) {
            write_le<std::uint32_t>(out, p.ordinal);
            write_le<std::uint32_t>(out, p.tf);
        }
    }
    if (!out.flush()) {
        throw Error("write failed: " + path.string());
    }
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    using detail::read_le;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    auto fail = [&](const std::string& what) -> FormatError {
        return FormatError(path.string() + ": " + what);
    };

    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t header_len = 0;
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kIndexMagic)) {
        throw fail("bad magic, not an index file");
    }
    if (!read_le(in, version) || version != kIndexVersion) {
        throw fail("unsupported index version");
    }
    std::string header_text;
    if (!read_le(in, header_len) || header_len > (1u << 20) || !detail::read_bytes(in, header_text, header_len)) {
        throw fail("truncated header");
    }

    InvertedIndex index;
    std::uint64_t n = 0;
    std::uint64_t term_total = 0;
    double stored_avgdl = 0.0;
    try {
        auto header = nlohmann::json::parse(header_text);
        index.cfg_.lowercase = header.at("tokenizer").at("lowercase").get<bool>();
        index.cfg_.min_token_len = header.at("tokenizer").at("min_token_len").get<std::size_t>();
        index.params_.k1 = header.at("k1").get<double>();
        index.params_.b = header.at("b").get<double>();
        n = header.at("N").get<std::uint64_t>();
        stored_avgdl = header.at("avgdl").get<double>();
        term_total = header.at("terms").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw fail(std::string("bad header: ") + e.what());
    }

    for (std::uint64_t i = 0; i < n; ++i) {
        std::string key;
        std::uint32_t len = 0;
        if (!detail::read_short_string(in, key) || !read_le(in, len)) {
            throw fail("truncated passage table at record " + std::to_string(i));
        }
        index.keys_.push_back(std::move(key));
        index.doc_len_.push_back(len);
    }
    for (std::uint64_t t = 0; t < term_total; ++t) {
        std::string term;
        std::uint32_t count = 0;
        if (!detail::read_short_string(in, term) || !read_le(in, count)) {
            throw fail("truncated term table at term " + std::to_string(t));
        }
        if (!index.terms_.empty() && !(index.terms_.back() < term)) {
            throw fail("terms not strictly sorted at term " + std::to_string(t));
        }
        std::vector<Posting> list(count);
        for (std::uint32_t j = 0; j < count; ++j) {
            if (!read_le(in, list[j].ordinal) || !read_le(in, list[j].tf)) {
                throw fail("truncated postings for term " + term);
            }
            if (list[j].ordinal >= n || (j > 0 && list[j].ordinal <= list[j - 1].ordinal)) {
                throw fail("invalid postings for term " + term);
            }
        }
        index.terms_.push_back(std::move(term));
        index.postings_.push_back(std::move(list));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw fail("trailing bytes after postings");
    }
    index.finish();
    if (index.avgdl_ != stored_avgdl) {
        throw fail("avgdl in header does not match passage lengths");
    }
    return index;
}

}  // namespace leser
