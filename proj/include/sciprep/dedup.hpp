#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sciprep/records.hpp"

namespace sciprep {

/// Edit distance divided by the longer length, in [0, 1]; two empty strings
/// are distance 0.
double normalized_levenshtein(std::string_view a, std::string_view b);

/// Edit distance if it is <= cutoff, otherwise cutoff + 1. Banded DP with
/// early abort; agrees exactly with the full computation within the cutoff.
int levenshtein_bounded(std::string_view a, std::string_view b, int cutoff);

/// Product of (1 - normalized distance) over the question pair and the answer
/// pair; 1 iff both components match exactly.
double pair_similarity(const InstructionRecord& r1, const InstructionRecord& r2);

struct DedupPolicy {
    enum class Mode { fixed_threshold, target_fraction };
    Mode mode = Mode::fixed_threshold;
    double threshold = 0.85;      // fixed_threshold mode
    double target_fraction = 0.08; // target_fraction mode, hit within +/- 0.01
    std::string group_by = "task_type"; // task_type | domain | none
};

struct GroupReport {
    std::string group;
    std::size_t records = 0;
    std::size_t pairs_total = 0;
    std::size_t pairs_prefilter_skipped = 0;
    std::size_t pairs_evaluated = 0;
    std::size_t clusters = 0; // clusters with >= 2 members
    std::size_t removed = 0;
    double effective_threshold = 0.0;
    double removal_fraction = 0.0;
    bool target_attained = true; // target_fraction mode only
};

struct DedupResult {
    std::vector<InstructionRecord> kept; // input order, cluster_id attached
    std::vector<std::vector<std::string>> clusters; // ids of multi-member clusters
    std::vector<GroupReport> report;
};

/// Near-duplicate removal: within each group, unions every pair whose
/// similarity reaches the effective threshold (pairs provably below it are
/// skipped by a sound length-gap prefilter) and keeps each cluster's
/// lowest-id member. target_fraction mode binary-searches the per-group
/// threshold for a removed fraction within +/- 0.01 of the target.
DedupResult dedup(const std::vector<InstructionRecord>& records, const DedupPolicy& policy,
                  int workers = 1);

std::string serialize_report(const std::vector<GroupReport>& report);

} // namespace sciprep
