#include "leser/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "leser/error.hpp"

namespace leser {

namespace {

void check_args(const GoldSet& gold, std::size_t k) {
    if (gold.empty()) {
        throw InvalidArgument("gold set is empty");
    }
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
}

}  // namespace

Qrels make_qrels(const std::vector<Query>& queries) {
    Qrels qrels;
    for (const auto& q : queries) {
        if (q.gold.empty()) {
            throw InvalidArgument("question " + q.query_id + " has no gold passages");
        }
        GoldSet gold;
        for (const auto& key : q.gold) {
            gold.insert(key.canonical());
        }
        if (!qrels.emplace(q.query_id, std::move(gold)).second) {
            throw InvalidArgument("repeated question id " + q.query_id);
        }
    }
    return qrels;
}

double recall_at_k(const RankedList& run, const GoldSet& gold, std::size_t k) {
    check_args(gold, k);
    std::size_t hits = 0;
    const std::size_t depth = std::min(k, run.entries.size());
    for (std::size_t r = 0; r < depth; ++r) {
        hits += gold.contains(run.entries[r].key) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double average_precision_at_k(const RankedList& run, const GoldSet& gold, std::size_t k) {
    check_args(gold, k);
    double sum = 0.0;
    std::size_t hits = 0;
    const std::size_t depth = std::min(k, run.entries.size());
    for (std::size_t r = 0; r < depth; ++r) {
        if (gold.contains(run.entries[r].key)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(std::min(gold.size(), k));
}

EvalReport evaluate_run(const std::vector<RankedList>& runs, const Qrels& qrels, std::size_t k) {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    std::unordered_map<std::string, const RankedList*> by_query;
    for (const auto& run : runs) {
        if (!qrels.contains(run.query_id)) {
            throw InvalidArgument("run for unjudged query " + run.query_id);
        }
        if (!by_query.emplace(run.query_id, &run).second) {
            throw InvalidArgument("duplicate run for query " + run.query_id);
        }
    }

    EvalReport report;
    report.k = k;
    double recall_sum = 0.0;
    double ap_sum = 0.0;
    // std::map iteration keeps the summation order fixed by query id.
    for (const auto& [qid, gold] : qrels) {
        QueryMetrics m;
        if (auto it = by_query.find(qid); it != by_query.end()) {
            m.recall = recall_at_k(*it->second, gold, k);
            m.average_precision = average_precision_at_k(*it->second, gold, k);
        } else {
            report.missing.push_back(qid);
        }
        recall_sum += m.recall;
        ap_sum += m.average_precision;
        report.per_query.emplace(qid, m);
    }
    report.query_count = qrels.size();
    if (report.query_count > 0) {
        report.mean_recall = recall_sum / static_cast<double>(report.query_count);
        report.mean_ap = ap_sum / static_cast<double>(report.query_count);
    }
    return report;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["k"] = report.k;
    j["query_count"] = report.query_count;
    j["mean_recall"] = report.mean_recall;
    j["mean_ap"] = report.mean_ap;
    j["missing"] = report.missing;
    auto& per = j["per_query"] = nlohmann::ordered_json::object();
    for (const auto& [qid, m] : report.per_query) {
        per[qid] = {{"recall", m.recall}, {"average_precision", m.average_precision}};
    }
    return j;
}

std::string format_run(const std::vector<RankedList>& runs, const std::string& tag) {
    if (tag.empty() || tag.find_first_of(" \t\r\n") != std::string::npos) {
        throw InvalidArgument("run tag must be a single non-empty word");
    }
    std::string out;
    char score[32];
    for (const auto& run : runs) {
        check_ranked(run);
        for (std::size_t r = 0; r < run.entries.size(); ++r) {
            const auto& e = run.entries[r];
            std::snprintf(score, sizeof score, "%.17g", e.score);
            out += run.query_id;
            out += " Q0 ";
            out += e.key;
            out += ' ';
            out += std::to_string(r + 1);
            out += ' ';
            out += score;
            out += ' ';
            out += tag;
            out += '\n';
        }
    }
    return out;
}

void write_run_file(const std::vector<RankedList>& runs, const std::filesystem::path& path,
                    const std::string& tag) {
    const std::string text = format_run(runs, tag);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())) || !out.flush()) {
        throw Error("cannot write " + path.string());
    }
}

std::vector<RankedList> read_run_file(const std::filesystem::path& path,
                                      std::optional<std::size_t> max_per_query) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<RankedList> runs;
    std::unordered_map<std::string, std::size_t> slot;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        return FormatError(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid, q0, key, rank_text, score_text, tag, extra;
        if (!(fields >> qid >> q0 >> key >> rank_text >> score_text >> tag) || (fields >> extra)) {
            throw fail("expected six whitespace-separated columns");
        }
        std::size_t rank = 0;
        auto [rp, rec] = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rank);
        if (rec != std::errc() || rp != rank_text.data() + rank_text.size() || rank == 0) {
            throw fail("bad rank '" + rank_text + "'");
        }
        double score = 0.0;
        auto [sp, sec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
        if (sec != std::errc() || sp != score_text.data() + score_text.size()) {
            throw fail("bad score '" + score_text + "'");
        }

        auto [it, fresh] = slot.emplace(qid, runs.size());
        if (fresh) {
            runs.push_back(RankedList{qid, {}});
        }
        RankedList& run = runs[it->second];
        if (rank != run.entries.size() + 1) {
            throw fail("rank " + rank_text + " out of sequence for query " + qid);
        }
        if (max_per_query && run.entries.size() >= *max_per_query) {
            throw fail("query " + qid + " has more than " + std::to_string(*max_per_query) + " entries");
        }
        if (!run.entries.empty() && run.entries.back().score < score) {
            throw fail("scores increase for query " + qid);
        }
        run.entries.push_back(ScoredKey{key, score});
    }
    for (const auto& run : runs) {
        std::unordered_set<std::string> seen;
        for (const auto& e : run.entries) {
            if (!seen.insert(e.key).second) {
                throw FormatError(path.string() + ": query " + run.query_id + " repeats key " + e.key);
            }
        }
    }
    return runs;
}

}  // namespace leser
