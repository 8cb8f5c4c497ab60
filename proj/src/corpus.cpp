#include "leser/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "leser/error.hpp"

namespace leser {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_component(const std::string& value, std::string_view what) {
    if (value.empty()) {
        throw FormatError(std::string(what) + " is empty");
    }
    if (value.find('#') != std::string::npos) {
        throw FormatError(std::string(what) + " contains '#': " + value);
    }
}

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    });
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": invalid JSON: " + e.what());
    }
}

/// DocumentID/PassageID arrive as strings or numbers depending on the file.
std::optional<std::string> id_field(const json& record, const char* name) {
    auto it = record.find(name);
    if (it == record.end() || it->is_null()) {
        return std::nullopt;
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number_integer() || it->is_number_unsigned()) {
        return std::to_string(it->get<long long>());
    }
    if (it->is_number_float()) {
        return it->dump();
    }
    return std::nullopt;
}

std::string record_error(const fs::path& path, std::size_t index, std::string_view what) {
    std::ostringstream os;
    os << path.string() << ": record " << index << ": " << what;
    return os.str();
}

PassageKey key_from_record(const json& record, const fs::path& path, std::size_t index) {
    auto doc = id_field(record, "DocumentID");
    auto passage = id_field(record, "PassageID");
    if (!doc) {
        throw FormatError(record_error(path, index, "missing DocumentID"));
    }
    if (!passage) {
        throw FormatError(record_error(path, index, "missing PassageID"));
    }
    try {
        return PassageKey(*doc, *passage);
    } catch (const FormatError& e) {
        throw FormatError(record_error(path, index, e.what()));
    }
}

void append_document(const fs::path& path, std::vector<Passage>& out) {
    json doc = read_json(path);
    std::vector<const json*> records;
    if (doc.is_array()) {
        for (const auto& r : doc) {
            records.push_back(&r);
        }
    } else if (doc.is_object()) {
        records.push_back(&doc);
    } else {
        throw FormatError(path.string() + ": expected a JSON array or object");
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        const json& r = *records[i];
        if (!r.is_object()) {
            throw FormatError(record_error(path, i, "not an object"));
        }
        PassageKey key = key_from_record(r, path, i);
        const json* text = nullptr;
        if (auto it = r.find("Passage"); it != r.end() && it->is_string()) {
            text = &*it;
        } else if (auto jt = r.find("Text"); jt != r.end() && jt->is_string()) {
            text = &*jt;
        }
        if (text == nullptr) {
            throw FormatError(record_error(path, i, "missing passage text"));
        }
        auto value = text->get<std::string>();
        if (is_blank(value)) {
            throw FormatError(record_error(path, i, "blank passage text"));
        }
        out.push_back(Passage{std::move(key), std::move(value)});
    }
}

}  // namespace

PassageKey::PassageKey(std::string doc_id, std::string passage_id)
    : doc_id_(std::move(doc_id)), passage_id_(std::move(passage_id)) {
    check_component(doc_id_, "DocumentID");
    check_component(passage_id_, "PassageID");
}

PassageKey PassageKey::parse(std::string_view canonical) {
    auto pos = canonical.find('#');
    if (pos == std::string_view::npos || canonical.find('#', pos + 1) != std::string_view::npos) {
        throw FormatError("not a canonical passage key: " + std::string(canonical));
    }
    return PassageKey(std::string(canonical.substr(0, pos)), std::string(canonical.substr(pos + 1)));
}

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
    key_index_.reserve(passages_.size());
    for (std::size_t i = 0; i < passages_.size(); ++i) {
        if (is_blank(passages_[i].text)) {
            throw FormatError("blank passage text for " + passages_[i].key.canonical());
        }
        auto [it, inserted] = key_index_.emplace(passages_[i].key.canonical(), i);
        if (!inserted) {
            throw FormatError("duplicate passage key " + it->first + " at ordinals " +
                              std::to_string(it->second) + " and " + std::to_string(i));
        }
    }
}

std::optional<std::size_t> Corpus::find(const std::string& canonical_key) const {
    auto it = key_index_.find(canonical_key);
    if (it == key_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Corpus load_corpus(const fs::path& path) {
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw Error("no .json document files in " + path.string());
        }
    } else {
        files.push_back(path);
    }

    std::vector<Passage> passages;
    for (const auto& f : files) {
        append_document(f, passages);
    }
    return Corpus(std::move(passages));
}

std::vector<Query> load_queries(const fs::path& path, bool require_gold, Warnings* warnings) {
    json doc = read_json(path);
    if (!doc.is_array()) {
        throw FormatError(path.string() + ": expected a JSON array of questions");
    }

    std::vector<Query> queries;
    queries.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& r = doc[i];
        if (!r.is_object()) {
            throw FormatError(record_error(path, i, "not an object"));
        }
        Query q;
        auto id = id_field(r, "QuestionID");
        if (!id || id->empty()) {
            throw FormatError(record_error(path, i, "missing QuestionID"));
        }
        q.query_id = std::move(*id);
        auto text = r.find("Question");
        if (text == r.end() || !text->is_string()) {
            throw FormatError(record_error(path, i, "missing Question"));
        }
        q.text = text->get<std::string>();
        if (auto g = r.find("Group"); g != r.end() && !g->is_null()) {
            q.group = g->is_string() ? g->get<std::string>() : g->dump();
        }

        if (auto ps = r.find("Passages"); ps != r.end() && !ps->is_null()) {
            if (!ps->is_array()) {
                throw FormatError(record_error(path, i, "Passages is not an array"));
            }
            for (const auto& p : *ps) {
                if (!p.is_object()) {
                    throw FormatError(record_error(path, i, "passage annotation is not an object"));
                }
                q.gold.insert(key_from_record(p, path, i));
            }
        }

        if (require_gold && q.gold.empty()) {
            throw FormatError(record_error(path, i, "question " + q.query_id + " has no gold passages"));
        }
        if (warnings != nullptr && !q.gold.empty() && q.gold.size() > 6) {
            warnings->push_back(record_error(path, i, "question " + q.query_id + " has " +
                                                          std::to_string(q.gold.size()) +
                                                          " gold passages (expected 1..6)"));
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

std::map<std::size_t, std::size_t> split_histogram(const std::vector<Query>& queries) {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& q : queries) {
        if (q.gold.empty()) {
            throw InvalidArgument("question " + q.query_id + " has no gold passages");
        }
        ++hist[q.gold.size()];
    }
    return hist;
}

std::vector<std::string> unresolved_gold(const Corpus& corpus, const std::vector<Query>& queries) {
    std::vector<std::string> missing;
    for (const auto& q : queries) {
        for (const auto& key : q.gold) {
            if (!corpus.find(key)) {
                missing.push_back(q.query_id + ": " + key.canonical());
            }
        }
    }
    return missing;
}

}  // namespace leser
