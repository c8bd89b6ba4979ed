#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sciprep/gateway.hpp"
#include "sciprep/records.hpp"
#include "sciprep/tokenizer.hpp"

namespace sciprep {

/// One correction unit. `joiner` is the exact source text between this chunk
/// and the next ("\n\n" at paragraph boundaries, the original whitespace at
/// forced intra-paragraph splits), so concatenating text+joiner in index order
/// reproduces the source byte for byte.
struct Chunk {
    std::string doc_id;
    std::size_t index = 0;
    std::string text;
    std::uint64_t token_count = 0;
    std::string joiner;
};

/// Splits at blank-line paragraph boundaries, packing paragraphs greedily up
/// to max_chunk_tokens; a single paragraph over budget is split at the last
/// whitespace before the budget. Requires max_chunk_tokens >= 64.
std::vector<Chunk> chunk_document(const DocumentRecord& doc, std::uint64_t max_chunk_tokens,
                                  const Tokenizer& tokenizer);

/// Reassembles chunk text (or any same-length replacement sequence) with the
/// recorded joiners.
std::string reassemble(const std::vector<Chunk>& chunks,
                       const std::vector<std::string>& texts);

struct CorrectionPolicy {
    std::uint64_t max_chunk_tokens = 2048;
    double min_ratio = 0.5; // accepted corrected/raw character-length ratio
    double max_ratio = 1.5;
};

struct CorrectionOutcome {
    DocumentRecord doc;
    std::size_t chunks_total = 0;
    std::size_t chunks_fallback = 0; // ratio guard rejected, raw kept
    std::size_t preamble_missing = 0;
};

/// Corrects every chunk through the gateway; rejected or unparseable chunks
/// fall back to their raw text. The returned record carries corrected_text,
/// a recomputed token count, and the corrected stage flag. Transport errors
/// surface with doc id and chunk index for resumability.
CorrectionOutcome correct_document(const DocumentRecord& doc, Gateway& gateway,
                                   const CorrectionPolicy& policy, const Tokenizer& tokenizer);

} // namespace sciprep
