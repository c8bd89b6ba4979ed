#include "sciprep/records.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <json.hpp>

namespace sciprep {

using nlohmann::json;

namespace {

json parse_json_line(const std::string& line, const char* what) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string(what) + ": malformed JSON at byte " +
                        std::to_string(e.byte) + ": " + e.what());
    }
}

const json& require_field(const json& j, const char* field, const char* what) {
    auto it = j.find(field);
    if (it == j.end())
        throw DataError(std::string(what) + ": schema error: missing field \"" + field + "\"");
    return *it;
}

std::string require_string(const json& j, const char* field, const char* what) {
    const json& v = require_field(j, field, what);
    if (!v.is_string())
        throw DataError(std::string(what) + ": schema error: field \"" + field +
                        "\" must be a string");
    return v.get<std::string>();
}

} // namespace

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

std::string to_string(Source s) {
    switch (s) {
    case Source::textbook: return "textbook";
    case Source::journal: return "journal";
    case Source::general: return "general";
    case Source::other: return "other";
    }
    throw DataError("invalid source enum value");
}

Source source_from_string(const std::string& s) {
    if (s == "textbook") return Source::textbook;
    if (s == "journal") return Source::journal;
    if (s == "general") return Source::general;
    if (s == "other") return Source::other;
    throw DataError("schema error: unknown source \"" + s + "\"");
}

std::string to_string(TaskType t) {
    switch (t) {
    case TaskType::table_extraction: return "table_extraction";
    case TaskType::entity_extraction: return "entity_extraction";
    case TaskType::molecule_translation: return "molecule_translation";
    case TaskType::molecule_extraction: return "molecule_extraction";
    case TaskType::multiple_choice_tf: return "multiple_choice_tf";
    }
    throw DataError("invalid task type enum value");
}

TaskType task_type_from_string(const std::string& s) {
    for (TaskType t : kAllTaskTypes)
        if (to_string(t) == s) return t;
    throw DataError("schema error: unknown task_type \"" + s + "\"");
}

// ---------------------------------------------------------------------------
// StageFlags
// ---------------------------------------------------------------------------

namespace {
constexpr std::pair<StageFlag, const char*> kFlagNames[] = {
    {StageFlag::ingested, "ingested"}, {StageFlag::corrected, "corrected"},
    {StageFlag::scored, "scored"},     {StageFlag::kept, "kept"},
    {StageFlag::dropped, "dropped"},
};
} // namespace

std::vector<std::string> StageFlags::names() const {
    std::vector<std::string> out;
    for (const auto& [flag, name] : kFlagNames)
        if (has(flag)) out.emplace_back(name);
    return out;
}

StageFlags StageFlags::from_names(const std::vector<std::string>& names) {
    StageFlags flags;
    for (const auto& n : names) {
        bool known = false;
        for (const auto& [flag, name] : kFlagNames) {
            if (n == name) {
                flags.set(flag);
                known = true;
                break;
            }
        }
        if (!known) throw DataError("schema error: unknown stage flag \"" + n + "\"");
    }
    return flags;
}

// ---------------------------------------------------------------------------
// AspectScores
// ---------------------------------------------------------------------------

void AspectScores::validate_and_normalize() {
    const std::pair<const char*, int> aspects[] = {
        {"clarity", clarity},       {"complexity", complexity},
        {"correctness", correctness}, {"usefulness", usefulness},
        {"adaptability", adaptability},
    };
    for (const auto& [name, value] : aspects) {
        if (value < 0 || value > 5)
            throw DataError(std::string("range error: aspect \"") + name + "\" is " +
                            std::to_string(value) + ", outside [0, 5]");
    }
    total = aspect_sum();
}

// ---------------------------------------------------------------------------
// Document schema
// ---------------------------------------------------------------------------

DocumentRecord parse_document(const std::string& line) {
    const json j = parse_json_line(line, "document");
    if (!j.is_object()) throw DataError("document: schema error: line is not a JSON object");

    DocumentRecord r;
    r.id = require_string(j, "id", "document");
    if (r.id.empty()) throw DataError("document: schema error: field \"id\" is empty");
    r.source = source_from_string(require_string(j, "source", "document"));
    r.domain = require_string(j, "domain", "document");
    r.raw_text = require_string(j, "raw_text", "document");

    const json& tc = require_field(j, "token_count", "document");
    if (!tc.is_number_integer() || tc.get<std::int64_t>() < 0)
        throw DataError("document: schema error: field \"token_count\" must be a "
                        "non-negative integer");
    r.token_count = tc.get<std::uint64_t>();

    if (auto it = j.find("corrected_text"); it != j.end()) {
        if (!it->is_string())
            throw DataError("document: schema error: field \"corrected_text\" must be a string");
        r.corrected_text = it->get<std::string>();
    }
    if (auto it = j.find("quality_score"); it != j.end()) {
        if (!it->is_number())
            throw DataError("document: schema error: field \"quality_score\" must be a number");
        double score = it->get<double>();
        if (!std::isfinite(score))
            throw DataError("document: schema error: field \"quality_score\" must be finite");
        r.quality_score = score;
    }
    if (auto it = j.find("stage_flags"); it != j.end()) {
        if (!it->is_array())
            throw DataError("document: schema error: field \"stage_flags\" must be an array");
        r.stage_flags = StageFlags::from_names(it->get<std::vector<std::string>>());
    }
    return r;
}

std::string serialize(const DocumentRecord& r) {
    json j;
    j["id"] = r.id;
    j["source"] = to_string(r.source);
    j["domain"] = r.domain;
    j["raw_text"] = r.raw_text;
    j["token_count"] = r.token_count;
    if (r.corrected_text) j["corrected_text"] = *r.corrected_text;
    if (r.quality_score) j["quality_score"] = *r.quality_score;
    if (!r.stage_flags.empty()) j["stage_flags"] = r.stage_flags.names();
    return j.dump();
}

// ---------------------------------------------------------------------------
// Instruction schema
// ---------------------------------------------------------------------------

InstructionRecord parse_instruction(const std::string& line) {
    const json j = parse_json_line(line, "instruction");
    if (!j.is_object()) throw DataError("instruction: schema error: line is not a JSON object");

    InstructionRecord r;
    r.id = require_string(j, "id", "instruction");
    if (r.id.empty()) throw DataError("instruction: schema error: field \"id\" is empty");
    r.domain = require_string(j, "domain", "instruction");
    r.task_type = task_type_from_string(require_string(j, "task_type", "instruction"));
    r.context = require_string(j, "context", "instruction");
    r.question = require_string(j, "question", "instruction");
    r.answer = require_string(j, "answer", "instruction");
    if (r.question.empty())
        throw DataError("instruction: schema error: field \"question\" is empty");
    if (r.answer.empty())
        throw DataError("instruction: schema error: field \"answer\" is empty");

    if (auto it = j.find("sampled_keywords"); it != j.end()) {
        if (!it->is_array())
            throw DataError("instruction: schema error: field \"sampled_keywords\" must be "
                            "an array of strings");
        r.sampled_keywords = it->get<std::vector<std::string>>();
        auto sorted = r.sampled_keywords;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DataError("instruction: schema error: duplicate entries in "
                            "\"sampled_keywords\"");
    }
    if (auto it = j.find("aspect_scores"); it != j.end()) {
        const json& a = *it;
        AspectScores s;
        auto get_int = [&](const char* field) {
            const json& v = require_field(a, field, "instruction.aspect_scores");
            if (!v.is_number_integer())
                throw DataError(std::string("instruction: schema error: aspect \"") + field +
                                "\" must be an integer");
            return v.get<int>();
        };
        s.clarity = get_int("clarity");
        s.complexity = get_int("complexity");
        s.correctness = get_int("correctness");
        s.usefulness = get_int("usefulness");
        s.adaptability = get_int("adaptability");
        s.total = get_int("total");
        s.explanation = require_string(a, "explanation", "instruction.aspect_scores");
        s.validate_and_normalize();
        r.aspect_scores = s;
    }
    if (auto it = j.find("cluster_id"); it != j.end()) {
        if (!it->is_number_integer())
            throw DataError("instruction: schema error: field \"cluster_id\" must be an integer");
        r.cluster_id = it->get<std::int64_t>();
    }
    return r;
}

std::string serialize(const InstructionRecord& r) {
    json j;
    j["id"] = r.id;
    j["domain"] = r.domain;
    j["task_type"] = to_string(r.task_type);
    j["context"] = r.context;
    j["question"] = r.question;
    j["answer"] = r.answer;
    if (!r.sampled_keywords.empty()) j["sampled_keywords"] = r.sampled_keywords;
    if (r.aspect_scores) {
        const AspectScores& s = *r.aspect_scores;
        j["aspect_scores"] = {
            {"adaptability", s.adaptability}, {"clarity", s.clarity},
            {"complexity", s.complexity},     {"correctness", s.correctness},
            {"explanation", s.explanation},   {"total", s.total},
            {"usefulness", s.usefulness},
        };
    }
    if (r.cluster_id) j["cluster_id"] = *r.cluster_id;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::string serialize(const DatasetManifest& m) {
    json j;
    j["tokenizer"] = m.tokenizer;
    j["epochs"] = json::object();
    for (const auto& [source, epochs] : m.epochs) j["epochs"][source] = epochs;
    j["rows"] = json::array();
    for (const auto& row : m.rows) {
        j["rows"].push_back({{"count", row.count},
                             {"domain", row.domain},
                             {"source", row.source},
                             {"token_total", row.token_total}});
    }
    return j.dump(2) + "\n";
}

DatasetManifest parse_manifest(const std::string& text) {
    const json j = parse_json_line(text, "manifest");
    DatasetManifest m;
    m.tokenizer = require_string(j, "tokenizer", "manifest");
    for (const auto& [source, epochs] : require_field(j, "epochs", "manifest").items())
        m.epochs.emplace_back(source, epochs.get<int>());
    for (const auto& row : require_field(j, "rows", "manifest")) {
        ManifestRow r;
        r.source = require_string(row, "source", "manifest.row");
        r.domain = require_string(row, "domain", "manifest.row");
        r.count = require_field(row, "count", "manifest.row").get<std::uint64_t>();
        r.token_total = require_field(row, "token_total", "manifest.row").get<std::uint64_t>();
        m.rows.push_back(std::move(r));
    }
    return m;
}

DatasetManifest build_manifest(const std::vector<ManifestEntry>& entries,
                               const std::vector<std::pair<std::string, int>>& epochs,
                               const std::string& tokenizer_name) {
    std::map<std::pair<std::string, std::string>, ManifestRow> groups;
    for (const auto& e : entries) {
        if (!e.token_count)
            throw DataError("accounting error: record from source \"" + e.source +
                            "\" has no token_count");
        auto& row = groups[{e.source, e.domain}];
        row.source = e.source;
        row.domain = e.domain;
        if (e.kept) {
            row.count += 1;
            row.token_total += *e.token_count;
        }
    }

    DatasetManifest m;
    m.tokenizer = tokenizer_name;
    for (auto& [key, row] : groups) m.rows.push_back(std::move(row));
    m.epochs = epochs;
    std::sort(m.epochs.begin(), m.epochs.end());
    return m;
}

} // namespace sciprep
