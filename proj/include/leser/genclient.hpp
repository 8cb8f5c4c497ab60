#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "leser/corpus.hpp"
#include "leser/error.hpp"
#include "leser/ranked_list.hpp"

namespace leser {

/// Bumped whenever the prompt wording or layout changes.
inline constexpr std::string_view kPromptTemplateVersion = "rag-prompt-v1";

/// Version plus a SHA-256 prefix of the template text, for run manifests.
std::string prompt_template_id();

struct GenerationConfig {
    std::string endpoint_url;  // e.g. http://localhost:8000/v1/chat/completions
    std::string model_name;
    std::string api_key_env_var = "OPENAI_API_KEY";  // unset or empty -> no auth header
    std::size_t max_contexts = 10;
    double timeout_seconds = 120.0;
    std::size_t max_retries = 3;
    double temperature = 0.0;
    double backoff_initial_seconds = 1.0;  // doubles after each failed attempt

    void validate() const;
};

/// Failure to obtain a completion after all retries.
class GenerationError : public Error {
  public:
    using Error::Error;
};

struct AnswerRecord {
    std::string query_id;
    std::string question;
    std::vector<std::string> context_keys;  // canonical keys, prompt order
    std::string answer;
    std::string model_name;
    std::optional<std::string> error;  // set when generation failed; never serialized

    [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }
};

/// JSONL line payload with exactly the five record fields.
nlohmann::ordered_json to_json(const AnswerRecord& record);
/// Throws FormatError when a field is missing or mistyped.
AnswerRecord answer_from_json(const nlohmann::json& j);

/// Deterministic prompt: instruction preamble, passages numbered [1..n] with
/// their canonical keys, then the question as the final section.
/// Throws InvalidArgument for zero passages or more than cfg.max_contexts.
std::string build_prompt(std::string_view question, std::span<const Passage> passages,
                         const GenerationConfig& cfg);

/// One chat-completion request (single user message) with retry and
/// exponential backoff on transport errors, timeouts, 408, 429 and 5xx.
/// Other 4xx responses fail immediately. Throws GenerationError.
std::string generate_answer(const GenerationConfig& cfg, const std::string& prompt);

struct GenerationOutcome {
    std::vector<AnswerRecord> records;  // one per query, input order
    std::size_t generated = 0;
    std::size_t resumed = 0;
    std::size_t failed = 0;
};

/// Answers each query sequentially from the top cfg.max_contexts passages of
/// its run. Successful records are appended to `output` (JSONL) and flushed
/// one by one; query ids already present in `output` are skipped and their
/// stored records returned. Failures are recorded and do not stop the run.
///
/// Before any request is made, throws InvalidArgument when a query has no
/// run or a run references a key absent from the corpus.
GenerationOutcome run_generation(const std::vector<Query>& queries, const std::vector<RankedList>& runs,
                                 const Corpus& corpus, const GenerationConfig& cfg,
                                 const std::filesystem::path& output);

}  // namespace leser
