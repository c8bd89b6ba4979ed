#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sciprep/gateway.hpp"
#include "sciprep/records.hpp"

namespace sciprep {

struct RatingPolicy {
    int max_attempts = 2; // re-asks with a fresh request seed on parse failure
    int max_output_units = 1024;
};

struct RatingReport {
    std::size_t rated = 0;
    std::vector<std::pair<std::string, std::string>> unrated; // (id, reason)
};

/// Rates one instruction through the five-aspect evaluation prompt. Returns
/// false (with `reason`) when every attempt failed to parse; the record stays
/// unrated.
bool rate_instruction(InstructionRecord& record, Gateway& gateway, const RatingPolicy& policy,
                      std::string* reason = nullptr);

/// Rates every record, in parallel per record; unrated records are reported,
/// never dropped silently.
RatingReport rate_instructions(std::vector<InstructionRecord>& records, Gateway& gateway,
                               const RatingPolicy& policy = {}, int workers = 1);

struct GateResult {
    std::vector<InstructionRecord> kept;
    std::vector<InstructionRecord> dropped;
};

/// Keeps records whose average aspect score (total / 5) is >= min_average;
/// strictly lower averages drop. Unrated input is a precondition error.
GateResult threshold_filter(std::vector<InstructionRecord> records, double min_average = 4.0);

/// Per-aspect counts of each score value 0..5, reproducible from the rated
/// records alone.
using AspectHistogram = std::map<std::string, std::array<std::size_t, 6>>;

AspectHistogram aspect_histogram(const std::vector<InstructionRecord>& records);
std::string serialize_histogram(const AspectHistogram& histogram);

} // namespace sciprep
