#include "sciprep/rating.hpp"

#include <json.hpp>

#include "sciprep/parallel.hpp"
#include "sciprep/parsers.hpp"
#include "sciprep/prompts.hpp"

namespace sciprep {

bool rate_instruction(InstructionRecord& record, Gateway& gateway, const RatingPolicy& policy,
                      std::string* reason) {
    CompletionRequest request;
    request.prompt = render_prompt(TemplateId::sft_rating, {{"Context", record.context},
                                                            {"Question", record.question},
                                                            {"Answer", record.answer}});
    request.max_output_units = policy.max_output_units;

    std::string last_reason = "no attempts made";
    for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
        request.seed = static_cast<std::uint64_t>(attempt);
        const CompletionResponse response = gateway.complete(request);
        try {
            record.aspect_scores = parse_rating(response.text);
            return true;
        } catch (const DataError& e) {
            last_reason = e.what();
        }
    }
    if (reason) *reason = last_reason;
    return false;
}

RatingReport rate_instructions(std::vector<InstructionRecord>& records, Gateway& gateway,
                               const RatingPolicy& policy, int workers) {
    auto reasons = parallel_map<std::string>(records.size(), workers, [&](std::size_t i) {
        std::string reason;
        return rate_instruction(records[i], gateway, policy, &reason) ? std::string() : reason;
    });

    RatingReport report;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (reasons[i].empty())
            ++report.rated;
        else
            report.unrated.emplace_back(records[i].id, reasons[i]);
    }
    return report;
}

GateResult threshold_filter(std::vector<InstructionRecord> records, double min_average) {
    for (const auto& record : records)
        if (!record.aspect_scores)
            throw DataError("threshold filter: instruction " + record.id + " is unrated");

    GateResult result;
    for (auto& record : records) {
        const bool keep = record.aspect_scores->average() >= min_average;
        (keep ? result.kept : result.dropped).push_back(std::move(record));
    }
    return result;
}

AspectHistogram aspect_histogram(const std::vector<InstructionRecord>& records) {
    AspectHistogram histogram;
    for (const char* aspect :
         {"adaptability", "clarity", "complexity", "correctness", "usefulness"})
        histogram[aspect] = {};
    for (const auto& record : records) {
        if (!record.aspect_scores) continue;
        const AspectScores& s = *record.aspect_scores;
        histogram["adaptability"][s.adaptability] += 1;
        histogram["clarity"][s.clarity] += 1;
        histogram["complexity"][s.complexity] += 1;
        histogram["correctness"][s.correctness] += 1;
        histogram["usefulness"][s.usefulness] += 1;
    }
    return histogram;
}

std::string serialize_histogram(const AspectHistogram& histogram) {
    nlohmann::json j;
    for (const auto& [aspect, counts] : histogram) j[aspect] = counts;
    return j.dump(2) + "\n";
}

} // namespace sciprep
