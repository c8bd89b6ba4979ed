#pragma once

#include <string>
#include <vector>

#include "sciprep/gateway.hpp"
#include "sciprep/records.hpp"

namespace sciprep {

struct ScoreSource {
    enum class Kind { llm_labeler, external_file };
    Kind kind = Kind::llm_labeler;
    std::string external_path; // external_file mode: JSONL of {id, score}
};

struct ScoringReport {
    std::size_t scored = 0;
    std::vector<std::pair<std::string, std::string>> unscored; // (doc id, reason)
};

/// Attaches quality_score in [0, 5] to every document, via the educational
/// value labeling prompt or an external score file. An external file missing
/// any input id is a coverage error; labeler parse failures leave the doc
/// unscored and reported rather than dropped. Labeling runs in parallel per
/// document; the report order follows the input order.
ScoringReport score_documents(std::vector<DocumentRecord>& docs, const ScoreSource& source,
                              Gateway* gateway, int workers = 1);

struct FilterResult {
    std::vector<DocumentRecord> kept;
    std::vector<DocumentRecord> dropped;
};

/// Drops the floor(drop_fraction * n) lowest-scoring documents; ties at the
/// cut break by ascending id, so the result is independent of input order.
FilterResult percentile_filter(std::vector<DocumentRecord> docs, double drop_fraction);

/// Counts per 0.5-wide score bin over [0, 5]; bin 9 includes the upper edge.
std::vector<std::size_t> score_histogram(const std::vector<DocumentRecord>& docs);

} // namespace sciprep
