// Command-line entry point: index, import-embeddings, retrieve, tune,
// evaluate, generate. Errors go to stderr as one line, "leser: error: ...".

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leser/corpus.hpp"
#include "leser/dense.hpp"
#include "leser/error.hpp"
#include "leser/eval.hpp"
#include "leser/fusion.hpp"
#include "leser/genclient.hpp"
#include "leser/lexical.hpp"
#include "leser/manifest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct LexicalFlags {
    std::string index_path;
    std::string corpus_path;
    bool no_lowercase = false;
    std::size_t min_token_len = 1;
    double k1 = 1.2;
    double b = 0.75;

    void add_to(CLI::App* app, bool allow_index) {
        if (allow_index) {
            app->add_option("--index", index_path, "Persisted lexical index")->check(CLI::ExistingFile);
        }
        app->add_option("--corpus", corpus_path, "Document file or directory")->check(CLI::ExistingPath);
        app->add_flag("--no-lowercase", no_lowercase, "Keep token case");
        app->add_option("--min-token-len", min_token_len, "Drop shorter tokens")->check(CLI::PositiveNumber);
        app->add_option("--k1", k1, "BM25 k1")->check(CLI::NonNegativeNumber);
        app->add_option("--b", b, "BM25 b")->check(CLI::Range(0.0, 1.0));
    }

    [[nodiscard]] leser::TokenizerConfig tokenizer() const { return {!no_lowercase, min_token_len}; }

    /// Loads --index when given, otherwise builds from --corpus.
    leser::InvertedIndex load(leser::RunManifest& manifest) const {
        if (!index_path.empty()) {
            manifest.add_input(index_path);
            return leser::InvertedIndex::load(index_path);
        }
        if (corpus_path.empty()) {
            throw leser::InvalidArgument("either --index or --corpus is required");
        }
        manifest.add_input(corpus_path);
        return leser::InvertedIndex::build(leser::load_corpus(corpus_path), tokenizer(), {k1, b});
    }
};

struct DenseFlags {
    std::string passage_emb;
    std::string query_emb;

    void add_to(CLI::App* app) {
        app->add_option("--passage-emb", passage_emb, "EMB1 file of passage embeddings")->check(CLI::ExistingFile);
        app->add_option("--query-emb", query_emb, "EMB1 file of question embeddings")->check(CLI::ExistingFile);
    }
};

struct FusionFlags {
    double alpha = 0.3;
    std::string alpha_from;
    std::size_t pool_size = 20;

    void add_to(CLI::App* app, bool with_alpha) {
        if (with_alpha) {
            app->add_option("--alpha", alpha, "Weight on the normalized dense score")->check(CLI::Range(0.0, 1.0));
            app->add_option("--alpha-from", alpha_from, "Take best_alpha from a tuning report")
                ->check(CLI::ExistingFile);
        }
        app->add_option("--pool-size", pool_size, "Dense candidates reranked by LeSeR")->check(CLI::PositiveNumber);
    }

    void resolve_alpha(leser::RunManifest& manifest) {
        if (alpha_from.empty()) {
            return;
        }
        std::ifstream in(alpha_from);
        alpha = nlohmann::json::parse(in).at("best_alpha").get<double>();
        manifest.add_input(alpha_from);
    }
};

struct Resources {
    std::optional<leser::InvertedIndex> index;
    std::optional<leser::EmbeddingStore> passages;
    std::optional<leser::EmbeddingStore> queries;

    leser::RetrievalResources view(const leser::FusionConfig& fusion) const {
        leser::RetrievalResources r;
        r.index = index ? &*index : nullptr;
        r.passage_vectors = passages ? &*passages : nullptr;
        r.query_vectors = queries ? &*queries : nullptr;
        r.fusion = fusion;
        return r;
    }
};

void load_dense(Resources& res, const DenseFlags& flags, leser::RunManifest& manifest) {
    if (flags.passage_emb.empty() || flags.query_emb.empty()) {
        throw leser::InvalidArgument("--passage-emb and --query-emb are required for this mode");
    }
    res.passages = leser::read_embeddings(flags.passage_emb);
    res.queries = leser::read_embeddings(flags.query_emb);
    if (res.passages->dim() != res.queries->dim()) {
        throw leser::InvalidArgument("embedding dimensions differ: passages " + std::to_string(res.passages->dim()) +
                                     ", questions " + std::to_string(res.queries->dim()));
    }
    manifest.add_input(flags.passage_emb);
    manifest.add_input(flags.query_emb);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())) || !out.flush()) {
        throw leser::Error("cannot write " + path.string());
    }
}

json lexical_config(const LexicalFlags& f, const leser::InvertedIndex& index) {
    return json{{"lowercase", index.tokenizer().lowercase},
                {"min_token_len", index.tokenizer().min_token_len},
                {"k1", index.params().k1},
                {"b", index.params().b},
                {"source", f.index_path.empty() ? "corpus" : "index"}};
}

void print_warnings(const leser::Warnings& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "leser: warning: " << w << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid dense + BM25 passage retrieval, evaluation and answer generation"};
    app.set_config("--config", "", "INI defaults file, one [subcommand] section each; flags win");
    app.set_version_flag("--version", std::string(leser::kToolVersion));
    app.require_subcommand(1);

    // index
    auto* index_cmd = app.add_subcommand("index", "Build and persist the BM25 index");
    LexicalFlags index_lex;
    std::string index_out;
    index_lex.add_to(index_cmd, false);
    index_cmd->get_option("--corpus")->required();
    index_cmd->add_option("--out", index_out, "Index file to write")->required();

    // import-embeddings
    auto* import_cmd = app.add_subcommand("import-embeddings", "Validate an EMB1 file, optionally re-export normalized");
    std::string import_in;
    std::string import_out;
    std::string import_corpus;
    std::string import_queries;
    import_cmd->add_option("--in", import_in, "EMB1 file")->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--out", import_out, "Write the normalized store here");
    import_cmd->add_option("--corpus", import_corpus, "Check every passage has a vector")->check(CLI::ExistingPath);
    import_cmd->add_option("--queries", import_queries, "Check every question has a vector")->check(CLI::ExistingFile);

    // retrieve
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Produce a run file in bm25, dense or leser mode");
    std::string mode_name = "leser";
    std::string retrieve_queries;
    std::string run_out;
    std::string run_tag;
    std::size_t retrieve_k = 10;
    LexicalFlags retrieve_lex;
    DenseFlags retrieve_dense;
    FusionFlags retrieve_fusion;
    retrieve_cmd->add_option("--mode", mode_name, "bm25 | dense | leser")
        ->check(CLI::IsMember({"bm25", "dense", "leser"}));
    retrieve_cmd->add_option("--queries", retrieve_queries, "Question split file")->required()->check(CLI::ExistingFile);
    retrieve_cmd->add_option("--k", retrieve_k, "Results per question")->check(CLI::PositiveNumber);
    retrieve_cmd->add_option("--out", run_out, "Run file to write")->required();
    retrieve_cmd->add_option("--tag", run_tag, "Run tag column (default: mode)");
    retrieve_lex.add_to(retrieve_cmd, true);
    retrieve_dense.add_to(retrieve_cmd);
    retrieve_fusion.add_to(retrieve_cmd, true);

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "Grid-search alpha on a labeled split");
    std::string tune_queries;
    std::string tune_out;
    std::string objective_name = "map";
    double grid_step = 0.1;
    std::vector<double> grid_values;
    std::size_t tune_k = 10;
    LexicalFlags tune_lex;
    DenseFlags tune_dense;
    FusionFlags tune_fusion;
    tune_cmd->add_option("--queries", tune_queries, "Labeled split, normally dev")->required()->check(CLI::ExistingFile);
    tune_cmd->add_option("--objective", objective_name, "map | recall")->check(CLI::IsMember({"map", "recall"}));
    tune_cmd->add_option("--grid-step", grid_step, "Alpha grid spacing over [0,1]");
    tune_cmd->add_option("--grid", grid_values, "Explicit alpha values (overrides --grid-step)")->delimiter(',');
    tune_cmd->add_option("--k", tune_k, "Metric cutoff")->check(CLI::PositiveNumber);
    tune_cmd->add_option("--out", tune_out, "Also write the report here");
    tune_lex.add_to(tune_cmd, true);
    tune_dense.add_to(tune_cmd);
    tune_fusion.add_to(tune_cmd, false);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Recall@k and mAP@k of a run file");
    std::string eval_run;
    std::string eval_queries;
    std::size_t eval_k = 10;
    bool eval_summary = false;
    eval_cmd->add_option("--run", eval_run, "Run file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--queries", eval_queries, "Labeled split file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--k", eval_k, "Metric cutoff")->check(CLI::PositiveNumber);
    eval_cmd->add_flag("--summary", eval_summary, "Omit per-question metrics");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Answer questions from their retrieved passages");
    std::string gen_run;
    std::string gen_queries;
    std::string gen_corpus;
    std::string gen_out;
    leser::GenerationConfig gen_cfg;
    gen_cmd->add_option("--run", gen_run, "Run file")->required()->check(CLI::ExistingFile);
    gen_cmd->add_option("--queries", gen_queries, "Question split file")->required()->check(CLI::ExistingFile);
    gen_cmd->add_option("--corpus", gen_corpus, "Document file or directory")->required()->check(CLI::ExistingPath);
    gen_cmd->add_option("--out", gen_out, "Answer JSONL (appended; existing answers are kept)")->required();
    gen_cmd->add_option("--endpoint", gen_cfg.endpoint_url, "Chat-completions URL")->required();
    gen_cmd->add_option("--model", gen_cfg.model_name, "Model name sent with each request")->required();
    gen_cmd->add_option("--api-key-env", gen_cfg.api_key_env_var, "Environment variable holding the bearer token");
    gen_cmd->add_option("--max-contexts", gen_cfg.max_contexts, "Passages per prompt")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--timeout", gen_cfg.timeout_seconds, "Seconds per request");
    gen_cmd->add_option("--retries", gen_cfg.max_retries, "Retries after the first attempt");
    gen_cmd->add_option("--temperature", gen_cfg.temperature, "Sampling temperature");
    gen_cmd->add_option("--backoff", gen_cfg.backoff_initial_seconds, "First retry delay in seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*index_cmd) {
            leser::RunManifest manifest;
            auto index = index_lex.load(manifest);
            index.save(index_out);
            std::cout << json{{"index", index_out},
                              {"passages", index.passage_count()},
                              {"terms", index.term_count()},
                              {"avgdl", index.avgdl()}}
                             .dump()
                      << '\n';
        } else if (*import_cmd) {
            auto store = leser::read_embeddings(import_in);
            std::size_t missing = 0;
            if (!import_corpus.empty()) {
                const auto corpus = leser::load_corpus(import_corpus);
                for (const auto& p : corpus.passages()) {
                    missing += store.find(p.key.canonical()) ? 0 : 1;
                }
            }
            if (!import_queries.empty()) {
                const auto queries = leser::load_queries(import_queries, false);
                for (const auto& q : queries) {
                    missing += store.find(q.query_id) ? 0 : 1;
                }
            }
            if (!import_out.empty()) {
                leser::write_embeddings(store, import_out);
            }
            std::cout << json{{"file", import_in}, {"dim", store.dim()}, {"count", store.size()}, {"missing", missing}}
                             .dump()
                      << '\n';
            if (missing > 0) {
                std::cerr << "leser: error: " << missing << " ids have no embedding\n";
                return 1;
            }
        } else if (*retrieve_cmd) {
            const auto mode = leser::parse_mode(mode_name);
            leser::RunManifest manifest;
            manifest.command = "retrieve";
            manifest.mode = mode_name;
            manifest.timestamp = leser::utc_timestamp();
            retrieve_fusion.resolve_alpha(manifest);

            leser::Warnings warnings;
            const auto queries = leser::load_queries(retrieve_queries, false, &warnings);
            print_warnings(warnings);
            manifest.add_input(retrieve_queries);

            Resources res;
            if (mode != leser::RetrievalMode::dense) {
                res.index = retrieve_lex.load(manifest);
            }
            if (mode != leser::RetrievalMode::bm25) {
                load_dense(res, retrieve_dense, manifest);
            }
            leser::FusionConfig fusion{retrieve_fusion.alpha, retrieve_fusion.pool_size, retrieve_k};
            if (mode == leser::RetrievalMode::leser) {
                fusion.validate();
            }
            const auto view = res.view(fusion);

            std::vector<leser::RankedList> runs;
            runs.reserve(queries.size());
            for (const auto& q : queries) {
                runs.push_back(leser::retrieve(mode, q, view, retrieve_k));
            }
            leser::write_run_file(runs, run_out, run_tag.empty() ? mode_name : run_tag);

            manifest.config = json{{"k", retrieve_k}};
            if (res.index) {
                manifest.config["lexical"] = lexical_config(retrieve_lex, *res.index);
            }
            if (mode == leser::RetrievalMode::leser) {
                manifest.config["alpha"] = fusion.alpha;
                manifest.config["pool_size"] = fusion.pool_size;
                manifest.config["output_k"] = fusion.output_k;
            }
            manifest.output_digest = leser::sha256_file(run_out);
            write_text(run_out + ".manifest.json", leser::to_json(manifest).dump(2) + "\n");
        } else if (*tune_cmd) {
            leser::RunManifest manifest;
            const auto queries = leser::load_queries(tune_queries, true);
            Resources res;
            res.index = tune_lex.load(manifest);
            load_dense(res, tune_dense, manifest);
            leser::FusionConfig fusion;
            fusion.pool_size = tune_fusion.pool_size;
            fusion.output_k = tune_k;
            fusion.validate();
            const auto grid = grid_values.empty() ? leser::alpha_grid(grid_step) : grid_values;
            const auto objective = objective_name == "recall" ? leser::TuneObjective::recall : leser::TuneObjective::map;
            const auto report = leser::tune_alpha(queries, res.view(fusion), grid, objective, tune_k);
            auto j = leser::to_json(report);
            j["pool_size"] = fusion.pool_size;
            const std::string text = j.dump(2) + "\n";
            if (!tune_out.empty()) {
                write_text(tune_out, text);
            }
            std::cout << text;
        } else if (*eval_cmd) {
            const auto queries = leser::load_queries(eval_queries, true);
            const auto runs = leser::read_run_file(eval_run);
            auto report = leser::evaluate_run(runs, leser::make_qrels(queries), eval_k);
            auto j = leser::to_json(report);
            if (eval_summary) {
                j.erase("per_query");
            }
            std::cout << j.dump(2) << '\n';
        } else if (*gen_cmd) {
            const auto queries = leser::load_queries(gen_queries, false);
            const auto runs = leser::read_run_file(gen_run);
            const auto corpus = leser::load_corpus(gen_corpus);
            const auto outcome = leser::run_generation(queries, runs, corpus, gen_cfg, gen_out);
            for (const auto& r : outcome.records) {
                if (!r.ok()) {
                    std::cerr << "leser: warning: question " << r.query_id << " failed: " << *r.error << '\n';
                }
            }
            std::cout << json{{"generated", outcome.generated},
                              {"resumed", outcome.resumed},
                              {"failed", outcome.failed},
                              {"template", leser::prompt_template_id()}}
                             .dump()
                      << '\n';
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& c : msg) {
            if (c == '\n') {
                c = ' ';
            }
        }
        std::cerr << "leser: error: " << msg << '\n';
        return 1;
    }
    return 0;
}
