#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sciprep/gateway.hpp"
#include "sciprep/keywords.hpp"
#include "sciprep/records.hpp"

namespace sciprep {

/// One registered question type: a description, the generation prompt body
/// (with a {{keywords}} placeholder), and the question convention — either a
/// fixed question string or the name of a field to read from the generation
/// JSON.
struct TaskTemplate {
    TaskType task_type = TaskType::table_extraction;
    std::string description;
    std::string prompt_body;
    std::string question;       // fixed question string
    std::string question_field; // when set, overrides `question`
};

class TaskRegistry {
public:
    static TaskRegistry builtin();
    static TaskRegistry from_file(const std::string& path);

    bool has(TaskType t) const;
    const TaskTemplate& get(TaskType t) const;
    void add(TaskTemplate tmpl);

    std::string serialize() const;

private:
    std::vector<TaskTemplate> templates_;
};

struct SynthesisPolicy {
    std::size_t keywords_per_prompt = 20;
    double sampling_temperature = 3.0;
    double min_coverage = 0.8; // sampled keywords found in the context
    int max_attempts = 3;
    int max_output_units = 2048;
    double gen_temperature = 1.0;
};

struct SynthesisAttempt {
    std::optional<InstructionRecord> record;
    int attempts = 0;
    std::string failure_reason; // set when record is empty
};

/// Generates one candidate instruction: sample keywords, render the task
/// prompt, call the gateway, parse, and enforce keyword coverage. Candidates
/// below min_coverage (or unparseable) are regenerated with fresh keyword
/// draws up to max_attempts.
SynthesisAttempt synthesize_one(const std::string& domain, const TaskTemplate& task,
                                const KeywordTable& table, Gateway& gateway,
                                const SynthesisPolicy& policy, const std::string& record_id,
                                std::uint64_t seed);

struct SynthesisPlanRow {
    std::string domain;
    TaskType task_type = TaskType::table_extraction;
    std::size_t count = 0;
};

struct GenerationFailure {
    std::string id;
    int attempts = 0;
    std::string reason;
};

struct GroupSummary {
    std::string domain;
    TaskType task_type = TaskType::table_extraction;
    std::size_t requested = 0;
    std::size_t produced = 0;
    std::vector<GenerationFailure> failures;
};

struct SynthesisResult {
    std::vector<InstructionRecord> records;
    std::vector<GroupSummary> summary;
};

using GroupFilter = std::function<bool(const SynthesisPlanRow&)>;
using GroupSink = std::function<void(const SynthesisPlanRow&,
                                     const std::vector<InstructionRecord>&,
                                     const GroupSummary&)>;

/// Runs the whole plan. Every referenced task type and domain table is
/// validated before any generation starts. Record seeds derive from
/// (domain, task, index), so output is byte-stable across runs for a given
/// base seed. skip_group/on_group support checkpointed resumption.
SynthesisResult synthesize_batch(const std::vector<SynthesisPlanRow>& plan,
                                 const std::map<std::string, KeywordTable>& tables,
                                 const TaskRegistry& registry, Gateway& gateway,
                                 const SynthesisPolicy& policy, std::uint64_t base_seed,
                                 const GroupFilter& skip_group = {},
                                 const GroupSink& on_group = {});

std::string serialize_summary(const std::vector<GroupSummary>& summary);

} // namespace sciprep
