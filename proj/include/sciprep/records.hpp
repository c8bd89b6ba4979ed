#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sciprep/error.hpp"

namespace sciprep {

// ---------------------------------------------------------------------------
// Document side
// ---------------------------------------------------------------------------

enum class Source { textbook, journal, general, other };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

enum class StageFlag : unsigned {
    ingested = 1u << 0,
    corrected = 1u << 1,
    scored = 1u << 2,
    kept = 1u << 3,
    dropped = 1u << 4,
};

/// Small set of pipeline stage markers. At most one of {kept, dropped} may be
/// set at a time.
class StageFlags {
public:
    StageFlags() = default;

    bool has(StageFlag f) const { return (bits_ & static_cast<unsigned>(f)) != 0; }

    void set(StageFlag f) {
        if (f == StageFlag::kept && has(StageFlag::dropped))
            throw DataError("stage flags: record already dropped, cannot also be kept");
        if (f == StageFlag::dropped && has(StageFlag::kept))
            throw DataError("stage flags: record already kept, cannot also be dropped");
        bits_ |= static_cast<unsigned>(f);
    }

    void clear(StageFlag f) { bits_ &= ~static_cast<unsigned>(f); }

    bool empty() const { return bits_ == 0; }
    bool operator==(const StageFlags&) const = default;

    /// Flag names in a fixed order (pipeline order), for serialization.
    std::vector<std::string> names() const;
    static StageFlags from_names(const std::vector<std::string>& names);

private:
    unsigned bits_ = 0;
};

/// One corpus document as it moves through ingest -> correct -> score ->
/// filter. token_count always refers to the text in effect (corrected_text
/// when present, raw_text otherwise).
struct DocumentRecord {
    std::string id;
    Source source = Source::other;
    std::string domain;
    std::string raw_text;
    std::optional<std::string> corrected_text;
    std::uint64_t token_count = 0;
    std::optional<double> quality_score;
    StageFlags stage_flags;

    const std::string& text_in_effect() const {
        return corrected_text ? *corrected_text : raw_text;
    }

    bool operator==(const DocumentRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Instruction side
// ---------------------------------------------------------------------------

enum class TaskType {
    table_extraction,
    entity_extraction,
    molecule_translation,
    molecule_extraction,
    multiple_choice_tf,
};

inline constexpr TaskType kAllTaskTypes[] = {
    TaskType::table_extraction,   TaskType::entity_extraction,
    TaskType::molecule_translation, TaskType::molecule_extraction,
    TaskType::multiple_choice_tf,
};

std::string to_string(TaskType t);
TaskType task_type_from_string(const std::string& s);

/// Five-aspect quality rating. Each aspect is in [0, 5]; total is kept
/// consistent with the aspect sum (the aspects are the primary signal).
struct AspectScores {
    int clarity = 0;
    int complexity = 0;
    int correctness = 0;
    int usefulness = 0;
    int adaptability = 0;
    int total = 0;
    std::string explanation;

    int aspect_sum() const {
        return clarity + complexity + correctness + usefulness + adaptability;
    }
    double average() const { return static_cast<double>(total) / 5.0; }

    /// Range-checks the aspects and recomputes total from them if inconsistent.
    void validate_and_normalize();

    bool operator==(const AspectScores&) const = default;
};

/// One synthetic instruction: a literature segment (context), a question about
/// it, and the answer.
struct InstructionRecord {
    std::string id;
    std::string domain;
    TaskType task_type = TaskType::table_extraction;
    std::string context;
    std::string question;
    std::string answer;
    std::vector<std::string> sampled_keywords;
    std::optional<AspectScores> aspect_scores;
    std::optional<std::int64_t> cluster_id;

    bool operator==(const InstructionRecord&) const = default;
};

// ---------------------------------------------------------------------------
// JSONL record schemas
// ---------------------------------------------------------------------------

enum class RecordKind { document, instruction };

/// Parses one JSONL line into a validated record. Serialization uses canonical
/// alphabetical key order, so serialize(parse(line)) is byte-stable.
DocumentRecord parse_document(const std::string& line);
InstructionRecord parse_instruction(const std::string& line);

std::string serialize(const DocumentRecord& record);
std::string serialize(const InstructionRecord& record);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Per-source dataset accounting plus the mixing metadata (epochs per source)
/// that downstream training configs consume. Totals cover kept records only.
struct ManifestRow {
    std::string source;
    std::string domain;
    std::uint64_t count = 0;
    std::uint64_t token_total = 0;

    bool operator==(const ManifestRow&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestRow> rows; // sorted by (source, domain)
    std::vector<std::pair<std::string, int>> epochs; // sorted by source name
    std::string tokenizer;

    bool operator==(const DatasetManifest&) const = default;
};

std::string serialize(const DatasetManifest& manifest);
DatasetManifest parse_manifest(const std::string& text);

/// Flattened record view used for accounting; both record kinds reduce to it.
struct ManifestEntry {
    std::string source;
    std::string domain;
    bool kept = false;
    std::optional<std::uint64_t> token_count;
};

/// Sums kept entries per (source, domain). Entries without a token count are
/// an accounting error. Row order is deterministic regardless of input order.
DatasetManifest build_manifest(const std::vector<ManifestEntry>& entries,
                               const std::vector<std::pair<std::string, int>>& epochs,
                               const std::string& tokenizer_name);

} // namespace sciprep
