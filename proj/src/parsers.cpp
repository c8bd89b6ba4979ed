#include "sciprep/parsers.hpp"

#include <cctype>
#include <string_view>

#include <json.hpp>

#include "sciprep/prompts.hpp"

namespace sciprep {

using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Drops a leading ``` / ```json line and a trailing ``` line.
std::string strip_code_fence(const std::string& text) {
    std::string t = trim(text);
    if (t.rfind("```", 0) != 0) return t;
    std::size_t first_newline = t.find('\n');
    if (first_newline == std::string::npos) return t;
    std::size_t end = t.rfind("```");
    if (end <= first_newline) return t;
    return trim(std::string_view(t).substr(first_newline + 1, end - first_newline - 1));
}

json parse_outermost_object(const std::string& text, const char* what) {
    std::size_t open = text.find('{');
    std::size_t close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw DataError(std::string(what) + ": parse error: no JSON object found");
    try {
        return json::parse(text.substr(open, close - open + 1));
    } catch (const json::parse_error& e) {
        throw DataError(std::string(what) + ": parse error: malformed JSON: " + e.what());
    }
}

} // namespace

CorrectionParse parse_correction(const std::string& response) {
    CorrectionParse out;
    std::size_t pos = response.find(kCorrectionPreamble);
    if (pos != std::string::npos) {
        out.preamble_found = true;
        out.text = trim(std::string_view(response).substr(pos + std::string(kCorrectionPreamble).size()));
    } else {
        out.text = trim(response);
    }
    if (out.text.empty())
        throw DataError("correction: empty correction after stripping the preamble");
    return out;
}

int parse_educational_score(const std::string& response) {
    std::size_t pos = response.rfind(kEducationalScoreMarker);
    if (pos == std::string::npos)
        throw DataError("educational score: parse error: marker \"Educational score:\" not found");
    std::size_t i = pos + std::string(kEducationalScoreMarker).size();
    while (i < response.size() && is_space(response[i])) ++i;
    std::size_t start = i;
    while (i < response.size() && std::isdigit(static_cast<unsigned char>(response[i]))) ++i;
    if (i == start)
        throw DataError("educational score: parse error: no integer after marker");
    int score = std::stoi(response.substr(start, i - start));
    if (score < 0 || score > 5)
        throw DataError("educational score: range error: score " + std::to_string(score) +
                        " outside [0, 5]");
    return score;
}

GenerationParse parse_generation(const std::string& response) {
    const json j = parse_outermost_object(strip_code_fence(response), "generation");

    auto get = [&](const char* field) {
        auto it = j.find(field);
        if (it == j.end())
            throw DataError(std::string("generation: schema error: missing field \"") + field +
                            "\"");
        if (!it->is_string())
            throw DataError(std::string("generation: type error: field \"") + field +
                            "\" must be a string");
        return it->get<std::string>();
    };
    return GenerationParse{get("text"), get("answer")};
}

std::optional<std::string> parse_generation_field(const std::string& response,
                                                  const std::string& field) {
    const json j = parse_outermost_object(strip_code_fence(response), "generation");
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

AspectScores parse_rating(const std::string& response) {
    std::size_t sep = response.find(kRatingSeparator);
    if (sep == std::string::npos)
        throw DataError("rating: parse error: separator \"====================\" not found");

    AspectScores scores;
    std::string explanation = trim(std::string_view(response).substr(0, sep));
    constexpr std::string_view label = "Explanation:";
    if (explanation.rfind(label, 0) == 0)
        explanation = trim(std::string_view(explanation).substr(label.size()));
    scores.explanation = std::move(explanation);

    std::size_t after = sep;
    while (after < response.size() && response[after] == '=') ++after;
    const json j = parse_outermost_object(response.substr(after), "rating");

    auto get_int = [&](const char* field) {
        auto it = j.find(field);
        if (it == j.end())
            throw DataError(std::string("rating: parse error: missing field \"") + field + "\"");
        if (!it->is_number_integer())
            throw DataError(std::string("rating: parse error: field \"") + field +
                            "\" must be an integer");
        return it->get<int>();
    };
    scores.clarity = get_int("Clarity");
    scores.complexity = get_int("Complexity");
    scores.correctness = get_int("Correctness");
    scores.usefulness = get_int("Usefulness");
    scores.adaptability = get_int("Adaptability");
    scores.total = get_int("Total");
    scores.validate_and_normalize();
    return scores;
}

std::string format_rating(const AspectScores& scores) {
    std::string out = "Explanation: " + scores.explanation + "\n\n";
    out += kRatingSeparator;
    out += "\n\n{\n";
    out += "    \"Clarity\": " + std::to_string(scores.clarity) + ",\n";
    out += "    \"Complexity\": " + std::to_string(scores.complexity) + ",\n";
    out += "    \"Correctness\": " + std::to_string(scores.correctness) + ",\n";
    out += "    \"Usefulness\": " + std::to_string(scores.usefulness) + ",\n";
    out += "    \"Adaptability\": " + std::to_string(scores.adaptability) + ",\n";
    out += "    \"Total\": " + std::to_string(scores.total) + "\n";
    out += "}\n";
    return out;
}

} // namespace sciprep
