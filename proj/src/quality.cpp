#include "sciprep/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include <json.hpp>

#include "sciprep/parallel.hpp"
#include "sciprep/parsers.hpp"
#include "sciprep/prompts.hpp"

namespace sciprep {

using nlohmann::json;

namespace {

std::map<std::string, double> load_external_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("score file: cannot open " + path);
    std::map<std::string, double> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError("score file: line " + std::to_string(line_no) +
                            ": malformed JSON: " + e.what());
        }
        if (!j.contains("id") || !j.contains("score"))
            throw DataError("score file: line " + std::to_string(line_no) +
                            ": requires \"id\" and \"score\" fields");
        double score = j["score"].get<double>();
        if (!std::isfinite(score) || score < 0.0 || score > 5.0)
            throw DataError("score file: line " + std::to_string(line_no) + ": score " +
                            std::to_string(score) + " outside [0, 5]");
        scores[j["id"].get<std::string>()] = score;
    }
    return scores;
}

} // namespace

ScoringReport score_documents(std::vector<DocumentRecord>& docs, const ScoreSource& source,
                              Gateway* gateway, int workers) {
    ScoringReport report;

    if (source.kind == ScoreSource::Kind::external_file) {
        const auto scores = load_external_scores(source.external_path);
        std::vector<std::string> missing;
        for (const auto& doc : docs)
            if (!scores.contains(doc.id)) missing.push_back(doc.id);
        if (!missing.empty()) {
            std::string ids;
            for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
            throw DataError("coverage error: score file " + source.external_path +
                            " is missing ids: " + ids);
        }
        for (auto& doc : docs) {
            doc.quality_score = scores.at(doc.id);
            doc.stage_flags.set(StageFlag::scored);
            ++report.scored;
        }
        return report;
    }

    if (gateway == nullptr)
        throw ConfigError("scoring: llm_labeler source requires a configured gateway");

    struct Outcome {
        std::optional<double> score;
        std::string reason;
    };
    auto outcomes = parallel_map<Outcome>(docs.size(), workers, [&](std::size_t i) -> Outcome {
        CompletionRequest request;
        request.prompt =
            render_prompt(TemplateId::cpt_label, {{"Extract", docs[i].text_in_effect()}});
        try {
            CompletionResponse response = gateway->complete(request);
            return {static_cast<double>(parse_educational_score(response.text)), {}};
        } catch (const DataError& e) {
            return {std::nullopt, e.what()};
        }
    });

    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (outcomes[i].score) {
            docs[i].quality_score = outcomes[i].score;
            docs[i].stage_flags.set(StageFlag::scored);
            ++report.scored;
        } else {
            report.unscored.emplace_back(docs[i].id, outcomes[i].reason);
        }
    }
    return report;
}

FilterResult percentile_filter(std::vector<DocumentRecord> docs, double drop_fraction) {
    if (drop_fraction < 0.0 || drop_fraction >= 1.0)
        throw ConfigError("percentile filter: drop_fraction must be in [0, 1), got " +
                          std::to_string(drop_fraction));
    for (const auto& doc : docs)
        if (!doc.quality_score)
            throw DataError("percentile filter: document " + doc.id + " is unscored");

    const std::size_t n_drop =
        static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(docs.size())));

    std::sort(docs.begin(), docs.end(), [](const DocumentRecord& a, const DocumentRecord& b) {
        if (*a.quality_score != *b.quality_score) return *a.quality_score < *b.quality_score;
        return a.id < b.id;
    });

    FilterResult result;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        docs[i].stage_flags.clear(StageFlag::kept);
        docs[i].stage_flags.clear(StageFlag::dropped);
        docs[i].stage_flags.set(i < n_drop ? StageFlag::dropped : StageFlag::kept);
        (i < n_drop ? result.dropped : result.kept).push_back(std::move(docs[i]));
    }
    return result;
}

std::vector<std::size_t> score_histogram(const std::vector<DocumentRecord>& docs) {
    std::vector<std::size_t> bins(10, 0);
    for (const auto& doc : docs) {
        if (!doc.quality_score) continue;
        auto bin = static_cast<std::size_t>(*doc.quality_score / 0.5);
        bins[std::min<std::size_t>(bin, 9)] += 1;
    }
    return bins;
}

} // namespace sciprep
