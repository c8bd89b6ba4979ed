#pragma once

#include <optional>
#include <string>

#include "sciprep/records.hpp"

namespace sciprep {

struct CorrectionParse {
    std::string text;
    bool preamble_found = false;
};

/// Strips the correction preamble when present; a missing preamble falls back
/// to the full trimmed response with preamble_found = false. An empty result
/// after stripping is an error.
CorrectionParse parse_correction(const std::string& response);

/// Extracts the integer after the last "Educational score:" marker; must be
/// in [0, 5].
int parse_educational_score(const std::string& response);

struct GenerationParse {
    std::string context;
    std::string answer;
};

/// Extracts the outermost JSON object's "text" and "answer" string fields,
/// stripping surrounding code fences first if present.
GenerationParse parse_generation(const std::string& response);

/// Reads one extra string field from the generation JSON, for task templates
/// whose question lives in the generated object.
std::optional<std::string> parse_generation_field(const std::string& response,
                                                  const std::string& field);

/// Splits the response at the "====================" separator: explanation
/// before, aspect JSON after. Total inconsistent with the aspect sum is
/// recomputed from the aspects.
AspectScores parse_rating(const std::string& response);

/// Inverse of parse_rating for mock fixtures: emits a response in the rating
/// template's shape.
std::string format_rating(const AspectScores& scores);

} // namespace sciprep
