#include "sciprep/prompts.hpp"

#include <cctype>
#include <optional>

#include "sciprep/error.hpp"

namespace sciprep {

namespace {

const char* kCorrectionBody =
    "I have extracted the following raw text from a PDF, but the extraction process has "
    "introduced many formatting issues such as unnecessary line breaks, extra spaces, and "
    "other artifacts that disrupt the text flow. Could you please help me correct these "
    "formatting issues and provide a clean, readable version of the text? Respond with the "
    "Corrected Version only.\n"
    "\n"
    "Raw Text:\n"
    "\n"
    "{RawText}\n"
    "\n"
    "Start your response with \"Here is the corrected version of the text:\".";

const char* kCptLabelBody =
    "Below is an extract from a textbook. Evaluate whether the text has a high educational "
    "value and could be useful in an educational setting for teaching from primary school to "
    "grade school levels using the additive 5-point scoring system described below. Points are "
    "accumulated based on the satisfaction of each criterion:\n"
    "\n"
    "- Add 1 point if the extract provides some basic information relevant to educational "
    "topics, even if it includes some irrelevant or non-academic content like advertisements "
    "and promotional material.\n"
    "\n"
    "- Add another point if the extract addresses certain elements pertinent to education but "
    "does not align closely with educational standards. It might mix educational content with "
    "non-educational material, offering a superficial overview of potentially useful topics, "
    "or presenting information in a disorganized manner and incoherent writing style.\n"
    "\n"
    "- Award a third point if the extract is appropriate for educational use and introduces "
    "key concepts relevant to school curricula. It is coherent though it may not be "
    "comprehensive or could include some extraneous information. It may resemble an "
    "introductory section of a textbook or a basic tutorial that is suitable for learning but "
    "has notable limitations like treating concepts that are too complex for grade school "
    "students.\n"
    "\n"
    "- Grant a fourth point if the extract is highly relevant and beneficial for educational "
    "purposes for a level not higher than grade school, exhibiting a clear and consistent "
    "writing style. It could be similar to a chapter from a textbook or a tutorial, offering "
    "substantial educational content, including exercises and solutions, with minimal "
    "irrelevant information, and the concepts aren't too advanced for grade school students. "
    "The content is coherent, focused, and valuable for structured learning.\n"
    "\n"
    "- Bestow a fifth point if the extract is outstanding in its educational value, and "
    "perfectly suited for teaching either at primary school or grade school. It follows "
    "detailed reasoning, the writing style is easy to follow, and offers profound and thorough "
    "insights into the subject matter, devoid of any non-educational or complex content.\n"
    "\n"
    "The extract:\n"
    "\n"
    "{Extract}\n"
    "\n"
    "After examining the extract:\n"
    "\n"
    "- Briefly justify your total score, up to 100 words.\n"
    "\n"
    "- Conclude with the score using the format: \"Educational score: <total points>\"";

const char* kGenerationBody =
    "I need synthetic training data for training a machine learning model that extracts "
    "tables from text correctly.\n"
    "The data should be formatted in JSON, with each entry containing \"text\" and \"answer\" "
    "attributes.\n"
    "You should generate a paragraph that includes the keywords:\n"
    "\n"
    "{{keywords}}.\n"
    "\n"
    "The \"text\" part must contain enough information for the table to be extracted!\n"
    "In \"text\" part, You must you include a table description in latex format.\n"
    "\n"
    "Special notice for the table content:\n"
    "\n"
    "You should generate a table that has complicated numbers and characters, include "
    "non-standard characters, and have a variety of values.\n"
    "Make sure the value you generated do not follow simple patterns, for example, never "
    "include deplicate values or values with constant interval in columns.\n"
    "\n"
    "Your answer should contain as much details as possible. You should only generate one "
    "JSON.\n"
    "The value for the two attributes should be two string. Use {{ and }} to warp your "
    "output.\n"
    "Pay attention to the escape characters in the latex format.\n"
    "Remember to put a comma at the end of the first string. Never use a json block to wrap "
    "your output.\n"
    "Here is the format for your output:\n"
    "\n"
    "{\n"
    "\n"
    "    \"text\": \"Your paragraph here, remember to include a table in latex format\",\n"
    "\n"
    "    \"answer\": \"Your answer table here\"\n"
    "\n"
    "}\n"
    "\n"
    "Now start your answer:";

const char* kSftRatingBody =
    "You are a helpful and precise assistant for checking the quality of instruction-tuning "
    "data for large language models. Your task is to evaluate the given instruction using the "
    "criterions described below.\n"
    "\n"
    "- Clarity: The sample should be clear, specific, and unambiguous, providing a "
    "well-defined task for the model to perform.\n"
    "\n"
    "- Complexity: The sample should be advanced complexity that necessitate a high level of "
    "comprehension and cognitive processing, challenging the language model significantly.\n"
    "\n"
    "- Correctness: The sample is impeccably written, with flawless grammar, syntax, and "
    "structure, demonstrating exceptional clarity and professionalism.\n"
    "\n"
    "- Usefulness: The sample should be highly useful, and contribute to expanding the "
    "model's knowledge base.\n"
    "\n"
    "- Adaptability: The sample could be adapted to different contexts or use cases, showing "
    "some flexibility.\n"
    "\n"
    "After examining the instruction-response pair:\n"
    "\n"
    "- Briefly justify your scores with a paragraph in the field \"Explanation\", up to 500 "
    "words.\n"
    "\n"
    "- For each point of criterion above, assign a score from 1 to 5.\n"
    "\n"
    "- You should only provide the rest of your answer in a structured format as shown below, "
    "and make sure your response can be directly parsed by computer programs.\n"
    "\n"
    "Below is a template for your response:\n"
    "\n"
    "Explanation: <string, your explanations to the scores>\n"
    "\n"
    "====================\n"
    "\n"
    "{\n"
    "\n"
    "    \"Clarity\": <int, complexity_score>,\n"
    "\n"
    "    \"Complexity\": <int, complexity_score>,\n"
    "\n"
    "    \"Correctness\": <int, quality_score>,\n"
    "\n"
    "    \"Usefulness\": <int, usefulness_score>,\n"
    "\n"
    "    \"Adaptability\": <int, adaptability_score>,\n"
    "\n"
    "    \"Total\": <int, total_score>\n"
    "\n"
    "}\n"
    "\n"
    "Context:\n"
    "\n"
    "{Context}\n"
    "\n"
    "Instruction:\n"
    "\n"
    "{Question}\n"
    "\n"
    "Response:\n"
    "\n"
    "{Answer}";

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Recognizes {name} and {{name}} starting at `pos`. Returns the placeholder
// name and length consumed, or nullopt when the braces are literal text.
struct PlaceholderMatch {
    std::string name;
    std::size_t length;
};

std::optional<PlaceholderMatch> match_placeholder(const std::string& body, std::size_t pos) {
    std::size_t open = 1;
    if (pos + 1 < body.size() && body[pos + 1] == '{') open = 2;
    std::size_t start = pos + open;
    if (start >= body.size() || !is_ident_start(body[start])) return std::nullopt;
    std::size_t end = start;
    while (end < body.size() && is_ident_char(body[end])) ++end;
    std::size_t close = 0;
    while (close < open && end + close < body.size() && body[end + close] == '}') ++close;
    if (close != open) return std::nullopt;
    return PlaceholderMatch{body.substr(start, end - start), (end + open) - pos};
}

} // namespace

std::string to_string(TemplateId id) {
    switch (id) {
    case TemplateId::correction: return "correction";
    case TemplateId::cpt_label: return "cpt_label";
    case TemplateId::generation: return "generation";
    case TemplateId::sft_rating: return "sft_rating";
    }
    throw DataError("invalid template id");
}

const PromptTemplate& builtin_template(TemplateId id) {
    static const PromptTemplate correction{TemplateId::correction, kCorrectionBody};
    static const PromptTemplate cpt_label{TemplateId::cpt_label, kCptLabelBody};
    static const PromptTemplate generation{TemplateId::generation, kGenerationBody};
    static const PromptTemplate sft_rating{TemplateId::sft_rating, kSftRatingBody};
    switch (id) {
    case TemplateId::correction: return correction;
    case TemplateId::cpt_label: return cpt_label;
    case TemplateId::generation: return generation;
    case TemplateId::sft_rating: return sft_rating;
    }
    throw DataError("invalid template id");
}

std::string render_template(const std::string& body,
                            const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] != '{') {
            out.push_back(body[i]);
            ++i;
            continue;
        }
        auto match = match_placeholder(body, i);
        if (!match) {
            out.push_back(body[i]);
            ++i;
            continue;
        }
        auto it = bindings.find(match->name);
        if (it == bindings.end())
            throw DataError("template error: no binding for placeholder \"" + match->name + "\"");
        if (it->second.empty())
            throw DataError("template error: empty binding for placeholder \"" + match->name +
                            "\"");
        out += it->second;
        i += match->length;
    }
    return out;
}

std::string render_prompt(TemplateId id, const std::map<std::string, std::string>& bindings) {
    return render_template(builtin_template(id).body, bindings);
}

} // namespace sciprep
