#include "sciprep/correction.hpp"

#include <string_view>

#include "sciprep/parsers.hpp"
#include "sciprep/prompts.hpp"

namespace sciprep {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

struct Atom {
    std::string text;
    std::string joiner; // source bytes between this atom and the next
};

// Splits a paragraph that exceeds the budget at whitespace runs; a single
// over-budget word is hard-split at the largest fitting prefix.
void split_segment(std::string_view segment, std::string_view trailing_joiner,
                   std::uint64_t budget, const Tokenizer& tok, std::vector<Atom>& out) {
    std::size_t a = 0; // start of the current piece
    std::size_t i = 0;
    std::size_t last_word_end = std::string_view::npos;

    auto flush_to = [&](std::size_t end, std::size_t next_start) {
        out.push_back({std::string(segment.substr(a, end - a)),
                       std::string(segment.substr(end, next_start - end))});
        a = next_start;
        last_word_end = std::string_view::npos;
    };

    while (i < segment.size()) {
        while (i < segment.size() && is_ws(segment[i])) ++i;
        if (i >= segment.size()) break;
        std::size_t word_start = i;
        while (i < segment.size() && !is_ws(segment[i])) ++i;
        std::size_t word_end = i;

        if (tok.count(segment.substr(a, word_end - a)) <= budget) {
            last_word_end = word_end;
            continue;
        }
        if (last_word_end != std::string_view::npos) {
            flush_to(last_word_end, word_start);
            i = word_start; // re-evaluate the word against the new piece
            continue;
        }
        // Single word longer than the budget: binary search the largest
        // prefix that fits, guaranteeing at least one byte of progress.
        std::size_t lo = 1, hi = word_end - a;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (tok.count(segment.substr(a, mid)) <= budget)
                lo = mid;
            else
                hi = mid - 1;
        }
        flush_to(a + lo, a + lo);
        i = a;
    }
    out.push_back({std::string(segment.substr(a)), std::string(trailing_joiner)});
}

} // namespace

std::vector<Chunk> chunk_document(const DocumentRecord& doc, std::uint64_t max_chunk_tokens,
                                  const Tokenizer& tokenizer) {
    if (max_chunk_tokens < 64)
        throw ConfigError("chunking: max_chunk_tokens must be >= 64, got " +
                          std::to_string(max_chunk_tokens));
    const std::string& text = doc.raw_text;
    if (text.empty()) return {};

    // Paragraph atoms: segments between literal "\n\n" occurrences. Atoms
    // rejoin exactly, so any packing of consecutive atoms is lossless.
    std::vector<Atom> atoms;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t sep = text.find("\n\n", pos);
        std::string_view segment = sep == std::string::npos
                                       ? std::string_view(text).substr(pos)
                                       : std::string_view(text).substr(pos, sep - pos);
        std::string_view joiner = sep == std::string::npos ? std::string_view() : "\n\n";
        if (tokenizer.count(segment) <= max_chunk_tokens)
            atoms.push_back({std::string(segment), std::string(joiner)});
        else
            split_segment(segment, joiner, max_chunk_tokens, tokenizer, atoms);
        if (sep == std::string::npos) break;
        pos = sep + 2;
    }

    std::vector<Chunk> chunks;
    std::string cur_text, cur_joiner;
    bool open = false;
    auto flush = [&] {
        chunks.push_back({doc.id, chunks.size(), cur_text, tokenizer.count(cur_text),
                          cur_joiner});
        open = false;
    };
    for (auto& atom : atoms) {
        if (!open) {
            cur_text = std::move(atom.text);
            cur_joiner = std::move(atom.joiner);
            open = true;
            continue;
        }
        std::string candidate = cur_text + cur_joiner + atom.text;
        if (tokenizer.count(candidate) <= max_chunk_tokens) {
            cur_text = std::move(candidate);
            cur_joiner = std::move(atom.joiner);
        } else {
            flush();
            cur_text = std::move(atom.text);
            cur_joiner = std::move(atom.joiner);
            open = true;
        }
    }
    if (open) flush();
    return chunks;
}

std::string reassemble(const std::vector<Chunk>& chunks, const std::vector<std::string>& texts) {
    if (chunks.size() != texts.size())
        throw DataError("reassemble: chunk/text count mismatch");
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        out += texts[i];
        out += chunks[i].joiner;
    }
    return out;
}

CorrectionOutcome correct_document(const DocumentRecord& doc, Gateway& gateway,
                                   const CorrectionPolicy& policy, const Tokenizer& tokenizer) {
    const auto chunks = chunk_document(doc, policy.max_chunk_tokens, tokenizer);

    CorrectionOutcome outcome;
    outcome.chunks_total = chunks.size();

    std::vector<std::string> corrected;
    corrected.reserve(chunks.size());
    for (const Chunk& chunk : chunks) {
        if (chunk.text.empty()) {
            corrected.push_back(chunk.text);
            continue;
        }
        CompletionRequest request;
        request.prompt = render_prompt(TemplateId::correction, {{"RawText", chunk.text}});

        CompletionResponse response;
        try {
            response = gateway.complete(request);
        } catch (const BackendError& e) {
            throw BackendError("correction stage: doc " + doc.id + " chunk " +
                               std::to_string(chunk.index) + ": " + e.what());
        }

        bool accepted = false;
        std::string text;
        try {
            CorrectionParse parsed = parse_correction(response.text);
            if (!parsed.preamble_found) ++outcome.preamble_missing;
            double ratio = static_cast<double>(parsed.text.size()) /
                           static_cast<double>(chunk.text.size());
            if (ratio >= policy.min_ratio && ratio <= policy.max_ratio) {
                accepted = true;
                text = std::move(parsed.text);
            }
        } catch (const DataError&) {
            // empty correction: fall through to raw fallback
        }
        if (!accepted) {
            ++outcome.chunks_fallback;
            text = chunk.text;
        }
        corrected.push_back(std::move(text));
    }

    outcome.doc = doc;
    outcome.doc.corrected_text = chunks.empty() ? doc.raw_text : reassemble(chunks, corrected);
    outcome.doc.token_count = tokenizer.count(outcome.doc.text_in_effect());
    outcome.doc.stage_flags.set(StageFlag::corrected);
    return outcome;
}

} // namespace sciprep
