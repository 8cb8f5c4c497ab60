#include "leser/genclient.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "leser/manifest.hpp"

namespace leser {

namespace {

constexpr std::string_view kPreamble =
    "You are an assistant for regulatory compliance questions.\n"
    "Answer using only the numbered passages below. Cite the passages you rely on by number, "
    "for example [2]. If the passages do not answer the question, say so plainly.\n";
constexpr std::string_view kPassagesHeader = "\nPassages:\n";
constexpr std::string_view kQuestionHeader = "\nQuestion:\n";

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/\s]+)(/\S*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) {
        throw InvalidArgument("endpoint must be an http(s) URL: " + url);
    }
    return Endpoint{m[1].str(), m[2].matched ? m[2].str() : "/v1/chat/completions"};
}

bool retriable(int status) { return status == 408 || status == 429 || status >= 500; }

std::set<std::string> load_existing(const std::filesystem::path& output,
                                    std::unordered_map<std::string, AnswerRecord>& stored) {
    std::set<std::string> done;
    if (!std::filesystem::exists(output)) {
        return done;
    }
    std::ifstream in(output, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + output.string());
    }
    std::string line;
    std::size_t line_no = 0;
    std::uintmax_t good_bytes = 0;
    bool truncated_tail = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (in.eof()) {
            // Last line without a newline: an interrupted write. Drop it.
            truncated_tail = true;
            break;
        }
        good_bytes += line.size() + 1;
        if (line.empty()) {
            continue;
        }
        AnswerRecord r;
        try {
            r = answer_from_json(nlohmann::json::parse(line));
        } catch (const std::exception& e) {
            throw FormatError(output.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        done.insert(r.query_id);
        stored[r.query_id] = std::move(r);
    }
    in.close();
    if (truncated_tail) {
        std::filesystem::resize_file(output, good_bytes);
    }
    return done;
}

}  // namespace

std::string prompt_template_id() {
    std::string text(kPreamble);
    text += kPassagesHeader;
    text += "[n] (key) passage\n";
    text += kQuestionHeader;
    return std::string(kPromptTemplateVersion) + "+" + sha256_hex(text).substr(0, 12);
}

void GenerationConfig::validate() const {
    if (max_contexts == 0) {
        throw InvalidArgument("max_contexts must be at least 1");
    }
    if (!(timeout_seconds > 0.0)) {
        throw InvalidArgument("timeout must be positive");
    }
    if (backoff_initial_seconds < 0.0) {
        throw InvalidArgument("backoff must be non-negative");
    }
    parse_endpoint(endpoint_url);
}

nlohmann::ordered_json to_json(const AnswerRecord& r) {
    nlohmann::ordered_json j;
    j["query_id"] = r.query_id;
    j["question"] = r.question;
    j["context_keys"] = r.context_keys;
    j["answer"] = r.answer;
    j["model_name"] = r.model_name;
    return j;
}

AnswerRecord answer_from_json(const nlohmann::json& j) {
    try {
        AnswerRecord r;
        r.query_id = j.at("query_id").get<std::string>();
        r.question = j.at("question").get<std::string>();
        r.context_keys = j.at("context_keys").get<std::vector<std::string>>();
        r.answer = j.at("answer").get<std::string>();
        r.model_name = j.at("model_name").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad answer record: ") + e.what());
    }
}

std::string build_prompt(std::string_view question, std::span<const Passage> passages,
                         const GenerationConfig& cfg) {
    if (passages.empty()) {
        throw InvalidArgument("a prompt needs at least one passage");
    }
    if (passages.size() > cfg.max_contexts) {
        throw InvalidArgument("too many passages for max_contexts=" + std::to_string(cfg.max_contexts));
    }
    std::string prompt(kPreamble);
    prompt += kPassagesHeader;
    for (std::size_t i = 0; i < passages.size(); ++i) {
        prompt += '[' + std::to_string(i + 1) + "] (" + passages[i].key.canonical() + ") ";
        prompt += passages[i].text;
        prompt += '\n';
    }
    prompt += kQuestionHeader;
    prompt += question;
    prompt += '\n';
    return prompt;
}

std::string generate_answer(const GenerationConfig& cfg, const std::string& prompt) {
    cfg.validate();
    const Endpoint ep = parse_endpoint(cfg.endpoint_url);

    nlohmann::json body;
    body["model"] = cfg.model_name;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = cfg.temperature;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env_var.c_str()); key != nullptr && *key != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(cfg.timeout_seconds));
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            const double delay = cfg.backoff_initial_seconds * std::pow(2.0, static_cast<double>(attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        httplib::Client client(ep.origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        auto res = client.Post(ep.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            if (!retriable(res->status)) {
                break;
            }
            continue;
        }
        try {
            auto reply = nlohmann::json::parse(res->body);
            auto text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
            if (text.empty()) {
                last_error = "empty completion";
                continue;
            }
            return text;
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed completion: ") + e.what();
        }
    }
    throw GenerationError(last_error);
}

GenerationOutcome run_generation(const std::vector<Query>& queries, const std::vector<RankedList>& runs,
                                 const Corpus& corpus, const GenerationConfig& cfg,
                                 const std::filesystem::path& output) {
    cfg.validate();
    std::unordered_map<std::string, const RankedList*> run_for;
    for (const auto& r : runs) {
        run_for.emplace(r.query_id, &r);
    }

    // Resolve every context before the first request.
    std::vector<std::vector<Passage>> contexts;
    contexts.reserve(queries.size());
    for (const auto& q : queries) {
        auto it = run_for.find(q.query_id);
        if (it == run_for.end()) {
            throw InvalidArgument("no run for question " + q.query_id);
        }
        std::vector<Passage> ctx;
        const auto& entries = it->second->entries;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            auto ord = corpus.find(entries[i].key);
            if (!ord) {
                throw InvalidArgument("run for " + q.query_id + " references unknown passage " + entries[i].key);
            }
            if (i < cfg.max_contexts) {
                ctx.push_back(corpus[*ord]);
            }
        }
        contexts.push_back(std::move(ctx));
    }

    std::unordered_map<std::string, AnswerRecord> stored;
    const auto done = load_existing(output, stored);
    std::ofstream out(output, std::ios::binary | std::ios::app);
    if (!out) {
        throw Error("cannot write " + output.string());
    }

    GenerationOutcome outcome;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const Query& q = queries[i];
        if (done.contains(q.query_id)) {
            outcome.records.push_back(stored.at(q.query_id));
            ++outcome.resumed;
            continue;
        }
        AnswerRecord rec;
        rec.query_id = q.query_id;
        rec.question = q.text;
        rec.model_name = cfg.model_name;
        for (const auto& p : contexts[i]) {
            rec.context_keys.push_back(p.key.canonical());
        }
        try {
            rec.answer = generate_answer(cfg, build_prompt(q.text, contexts[i], cfg));
            out << to_json(rec).dump() << '\n';
            out.flush();
            if (!out) {
                throw Error("write failed: " + output.string());
            }
            ++outcome.generated;
        } catch (const GenerationError& e) {
            rec.error = e.what();
            ++outcome.failed;
        } catch (const InvalidArgument& e) {
            rec.error = e.what();
            ++outcome.failed;
        }
        outcome.records.push_back(std::move(rec));
    }
    return outcome;
}

}  // namespace leser
