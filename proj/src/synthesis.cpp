#include "sciprep/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "sciprep/parsers.hpp"
#include "sciprep/prompts.hpp"

namespace sciprep {

using nlohmann::json;

namespace {

// Shared tail of every generation prompt body: output contract and format
// block, matching the table-extraction original.
std::string generation_tail(const std::string& text_hint, const std::string& answer_hint) {
    return "Your answer should contain as much details as possible. You should only generate "
           "one JSON.\n"
           "The value for the two attributes should be two string. Use {{ and }} to warp your "
           "output.\n"
           "Remember to put a comma at the end of the first string. Never use a json block to "
           "wrap your output.\n"
           "Here is the format for your output:\n"
           "\n"
           "{\n"
           "\n"
           "    \"text\": \"" + text_hint + "\",\n"
           "\n"
           "    \"answer\": \"" + answer_hint + "\"\n"
           "\n"
           "}\n"
           "\n"
           "Now start your answer:";
}

std::string generation_head(const std::string& capability) {
    return "I need synthetic training data for training a machine learning model that " +
           capability + ".\n"
           "The data should be formatted in JSON, with each entry containing \"text\" and "
           "\"answer\" attributes.\n"
           "You should generate a paragraph that includes the keywords:\n"
           "\n"
           "{{keywords}}.\n"
           "\n";
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string join(const std::vector<std::string>& words, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += sep;
        out += words[i];
    }
    return out;
}

double keyword_coverage(const std::vector<std::string>& keywords, const std::string& context) {
    if (keywords.empty()) return 1.0;
    const std::string haystack = lowercase(context);
    std::size_t found = 0;
    for (const auto& kw : keywords)
        if (haystack.find(lowercase(kw)) != std::string::npos) ++found;
    return static_cast<double>(found) / static_cast<double>(keywords.size());
}

} // namespace

// ---------------------------------------------------------------------------
// TaskRegistry
// ---------------------------------------------------------------------------

TaskRegistry TaskRegistry::builtin() {
    TaskRegistry registry;

    registry.add({TaskType::table_extraction,
                  "Table Extraction tasks evaluate a model's proficiency in extracting, "
                  "summarizing, and structuring data from an article into a table format.",
                  builtin_template(TemplateId::generation).body,
                  "Extract the table in the paragraph.",
                  ""});

    registry.add({TaskType::entity_extraction,
                  "Entity Extraction tasks are designed to evaluate a model's ability to "
                  "extract specific information, such as entities or relationships, from the "
                  "text.",
                  generation_head("extracts entities and relationships from scientific text "
                                  "correctly") +
                      "The \"text\" part must mention several named entities (such as "
                      "materials, chemicals, diseases, genes, or instruments) and state how "
                      "they relate to each other.\n"
                      "Your answer should list every entity with its type and each "
                      "relationship asserted in the paragraph.\n"
                      "\n" +
                      generation_tail("Your paragraph here, remember to mention the entities "
                                      "explicitly",
                                      "Your extracted entities and relationships here"),
                  "Extract the entities and their relationships from the paragraph.",
                  ""});

    registry.add({TaskType::molecule_translation,
                  "Molecule Translation tasks evaluate a model's ability to translate "
                  "molecules between different SMILES formats.",
                  generation_head("translates molecules between different SMILES formats "
                                  "correctly") +
                      "The \"text\" part must present one molecule written in a specific "
                      "SMILES format and name the format it should be translated into.\n"
                      "Your answer should be the same molecule written in the requested "
                      "format.\n"
                      "\n" +
                      generation_tail("Your paragraph here, remember to include the source "
                                      "SMILES string",
                                      "The translated SMILES string here"),
                  "Translate the molecule in the paragraph into the requested SMILES format.",
                  ""});

    registry.add({TaskType::molecule_extraction,
                  "Molecule Extraction tasks ask a model to extract an appropriate molecule "
                  "from a scientific paragraph that contains multiple molecules.",
                  generation_head("extracts an appropriate molecule from a scientific "
                                  "paragraph that contains multiple molecules") +
                      "The \"text\" part must mention several molecules with distinct roles "
                      "and state one requirement that exactly one of them satisfies.\n"
                      "Your answer should be the single molecule that satisfies the "
                      "requirement.\n"
                      "\n" +
                      generation_tail("Your paragraph here, remember to mention several "
                                      "molecules",
                                      "The one appropriate molecule here"),
                  "Extract the appropriate molecule from the paragraph.",
                  ""});

    registry.add({TaskType::multiple_choice_tf,
                  "Multiple Choice and True-or-False questions assess a model's ability to "
                  "select the correct answer from a set of options, testing its knowledge and "
                  "reasoning on both simple and complex scenarios.",
                  generation_head("answers multiple choice and true-or-false questions about "
                                  "scientific text") +
                      "The \"text\" part must contain the facts needed to decide the answer "
                      "and end with either a multiple choice question listing its options or "
                      "a true-or-false statement.\n"
                      "Your answer should be the correct option alone.\n"
                      "\n" +
                      generation_tail("Your paragraph here, ending with the question and its "
                                      "options",
                                      "The correct option here"),
                  "Answer the question in the paragraph with the correct option.",
                  ""});

    return registry;
}

TaskRegistry TaskRegistry::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("task registry: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("task registry: " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_array()) throw ConfigError("task registry: " + path + " must be a JSON array");

    TaskRegistry registry;
    for (const auto& entry : j) {
        TaskTemplate t;
        t.task_type = task_type_from_string(entry.at("task_type").get<std::string>());
        t.description = entry.at("description").get<std::string>();
        t.prompt_body = entry.at("prompt_body").get<std::string>();
        t.question = entry.value("question", "");
        t.question_field = entry.value("question_field", "");
        if (t.question.empty() && t.question_field.empty())
            throw ConfigError("task registry: entry " + to_string(t.task_type) +
                              " needs a question or a question_field");
        registry.add(std::move(t));
    }
    return registry;
}

void TaskRegistry::add(TaskTemplate tmpl) {
    for (auto& existing : templates_) {
        if (existing.task_type == tmpl.task_type) {
            existing = std::move(tmpl);
            return;
        }
    }
    templates_.push_back(std::move(tmpl));
}

bool TaskRegistry::has(TaskType t) const {
    return std::any_of(templates_.begin(), templates_.end(),
                       [&](const TaskTemplate& x) { return x.task_type == t; });
}

const TaskTemplate& TaskRegistry::get(TaskType t) const {
    for (const auto& tmpl : templates_)
        if (tmpl.task_type == t) return tmpl;
    throw DataError("plan error: task type \"" + to_string(t) + "\" is not registered");
}

std::string TaskRegistry::serialize() const {
    json j = json::array();
    for (const auto& t : templates_) {
        j.push_back({{"task_type", to_string(t.task_type)},
                     {"description", t.description},
                     {"prompt_body", t.prompt_body},
                     {"question", t.question},
                     {"question_field", t.question_field}});
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

SynthesisAttempt synthesize_one(const std::string& domain, const TaskTemplate& task,
                                const KeywordTable& table, Gateway& gateway,
                                const SynthesisPolicy& policy, const std::string& record_id,
                                std::uint64_t seed) {
    SynthesisAttempt result;
    std::string last_reason = "no attempts made";

    for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
        result.attempts = attempt + 1;
        const std::uint64_t attempt_seed = seed ^ (0x9e3779b97f4a7c15ull * (attempt + 1));

        std::vector<std::string> keywords = sample_keywords(
            table, policy.keywords_per_prompt, policy.sampling_temperature, attempt_seed);

        CompletionRequest request;
        request.prompt = render_template(task.prompt_body, {{"keywords", join(keywords, ", ")}});
        request.max_output_units = policy.max_output_units;
        request.temperature = policy.gen_temperature;
        request.seed = attempt_seed;

        const CompletionResponse response = gateway.complete(request);

        GenerationParse parsed;
        try {
            parsed = parse_generation(response.text);
        } catch (const DataError& e) {
            last_reason = e.what();
            continue;
        }

        const double coverage = keyword_coverage(keywords, parsed.context);
        if (coverage < policy.min_coverage) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "keyword coverage %.2f below %.2f", coverage,
                          policy.min_coverage);
            last_reason = buf;
            continue;
        }

        InstructionRecord record;
        record.id = record_id;
        record.domain = domain;
        record.task_type = task.task_type;
        record.context = std::move(parsed.context);
        record.answer = std::move(parsed.answer);
        record.sampled_keywords = std::move(keywords);
        if (!task.question_field.empty()) {
            auto q = parse_generation_field(response.text, task.question_field);
            if (!q || q->empty()) {
                last_reason = "generation JSON lacks question field \"" + task.question_field +
                              "\"";
                continue;
            }
            record.question = std::move(*q);
        } else {
            record.question = task.question;
        }
        result.record = std::move(record);
        return result;
    }

    result.failure_reason = last_reason;
    return result;
}

SynthesisResult synthesize_batch(const std::vector<SynthesisPlanRow>& plan,
                                 const std::map<std::string, KeywordTable>& tables,
                                 const TaskRegistry& registry, Gateway& gateway,
                                 const SynthesisPolicy& policy, std::uint64_t base_seed,
                                 const GroupFilter& skip_group, const GroupSink& on_group) {
    // Validate the whole plan before generating anything.
    for (const auto& row : plan) {
        if (!registry.has(row.task_type))
            throw DataError("plan error: task type \"" + to_string(row.task_type) +
                            "\" is not registered");
        auto it = tables.find(row.domain);
        if (it == tables.end())
            throw DataError("plan error: no keyword table for domain \"" + row.domain + "\"");
        if (it->second.size() < policy.keywords_per_prompt)
            throw DataError("plan error: keyword table for domain \"" + row.domain + "\" has " +
                            std::to_string(it->second.size()) + " words, need " +
                            std::to_string(policy.keywords_per_prompt));
    }

    SynthesisResult result;
    for (const auto& row : plan) {
        if (skip_group && skip_group(row)) continue;

        const TaskTemplate& task = registry.get(row.task_type);
        const KeywordTable& table = tables.at(row.domain);

        GroupSummary summary;
        summary.domain = row.domain;
        summary.task_type = row.task_type;
        summary.requested = row.count;

        std::vector<InstructionRecord> group_records;
        for (std::size_t r = 0; r < row.count; ++r) {
            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "%06zu", r);
            const std::string id =
                "ins-" + row.domain + "-" + to_string(row.task_type) + "-" + suffix;
            const std::uint64_t seed =
                base_seed ^ fnv1a64(row.domain + "|" + to_string(row.task_type) + "|" + suffix);

            SynthesisAttempt attempt =
                synthesize_one(row.domain, task, table, gateway, policy, id, seed);
            if (attempt.record) {
                group_records.push_back(std::move(*attempt.record));
                ++summary.produced;
            } else {
                summary.failures.push_back({id, attempt.attempts, attempt.failure_reason});
            }
        }

        if (on_group) on_group(row, group_records, summary);
        for (auto& record : group_records) result.records.push_back(std::move(record));
        result.summary.push_back(std::move(summary));
    }
    return result;
}

std::string serialize_summary(const std::vector<GroupSummary>& summary) {
    json j = json::array();
    for (const auto& g : summary) {
        json failures = json::array();
        for (const auto& f : g.failures)
            failures.push_back({{"id", f.id}, {"attempts", f.attempts}, {"reason", f.reason}});
        j.push_back({{"domain", g.domain},
                     {"task_type", to_string(g.task_type)},
                     {"requested", g.requested},
                     {"produced", g.produced},
                     {"failures", failures}});
    }
    return j.dump(2) + "\n";
}

} // namespace sciprep
