#pragma once

#include <map>
#include <string>

namespace sciprep {

enum class TemplateId { correction, cpt_label, generation, sft_rating };

std::string to_string(TemplateId id);

struct PromptTemplate {
    TemplateId id;
    std::string body;
};

/// The built-in prompt bodies. The generation body is the table-extraction
/// default; task registries may carry their own per-task bodies, rendered
/// through the same engine.
const PromptTemplate& builtin_template(TemplateId id);

/// Substitutes {name} / {{name}} placeholders with bindings, verbatim.
/// Literal braces that do not form an identifier placeholder pass through
/// untouched. Missing or empty bindings are template errors naming the
/// placeholder.
std::string render_template(const std::string& body,
                            const std::map<std::string, std::string>& bindings);

std::string render_prompt(TemplateId id,
                          const std::map<std::string, std::string>& bindings);

// Markers shared between prompt bodies, response parsers, and the mock
// backend.
inline constexpr const char* kCorrectionPreamble =
    "Here is the corrected version of the text:";
inline constexpr const char* kEducationalScoreMarker = "Educational score:";
inline constexpr const char* kRatingSeparator = "====================";

} // namespace sciprep
