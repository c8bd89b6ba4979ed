#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sciprep/correction.hpp"
#include "sciprep/dedup.hpp"
#include "sciprep/gateway.hpp"
#include "sciprep/quality.hpp"
#include "sciprep/synthesis.hpp"

namespace sciprep {

/// Whole-pipeline configuration, one section per stage. Every pipeline
/// parameter (keyword count, sampling temperature, drop fraction, similarity
/// threshold, gate average) is a named key here, so experiments are
/// declarative. Relative paths resolve against the config file's directory.
struct Config {
    std::string run_dir = "run";

    struct BackendSection {
        std::string kind = "mock"; // mock | http
        std::uint64_t mock_seed = 0;
        std::string fixture_file;
        std::string url;
        std::string model;
        std::string credential_env = "SCIPREP_API_KEY";
        int max_in_flight = 4;
        int max_retries = 3;
        int backoff_ms = 250;
    } backend;

    struct IngestSection {
        std::string input; // raw document JSONL
    } ingest;

    CorrectionPolicy correct;

    struct ScoreSection {
        std::string source = "llm_labeler"; // llm_labeler | external_file
        std::string external_file;
    } score;

    struct FilterSection {
        double drop_fraction = 0.25;
    } filter;

    struct KeywordsSection {
        std::map<std::string, std::vector<std::string>> domains; // domain -> text files
        std::vector<std::string> stopwords; // empty -> default set
        std::size_t k = 20;
        double temperature = 3.0;
    } keywords;

    struct SynthSection {
        std::vector<SynthesisPlanRow> plan;
        double min_coverage = 0.8;
        int max_attempts = 3;
        std::string task_registry; // empty -> built-in registry
    } synth;

    DedupPolicy dedup;

    struct GateSection {
        double min_average = 4.0;
    } gate;

    struct ExportSection {
        std::vector<std::pair<std::string, int>> epochs; // source -> epochs
        std::string sft_source = "synthetic";
    } export_;

    struct RuntimeSection {
        int workers = 1;
        std::uint64_t seed = 1;
    } runtime;

    static Config load(const std::string& path);

    /// Stable dump of one section, used to fingerprint stage checkpoints.
    std::string section_fingerprint(const std::string& section) const;
};

} // namespace sciprep
