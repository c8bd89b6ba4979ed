#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "sciprep/config.hpp"
#include "sciprep/tokenizer.hpp"

namespace sciprep {

enum class Stage {
    ingest,
    correct,
    score,
    filter,
    keywords,
    synth,
    dedup,
    rate,
    gate,
    export_,
    stats,
    all,
};

Stage stage_from_string(const std::string& name);
std::string to_string(Stage stage);

/// Runs pipeline stages against a run directory: each stage reads its
/// predecessor's artifacts, writes its own, and records a checkpoint keyed by
/// a content hash of its inputs and settings. Completed stages are skipped
/// unless forced. A lock file gives one process ownership of the run
/// directory.
class Pipeline {
public:
    struct Options {
        bool force = false;
        std::optional<int> workers;
        std::optional<std::uint64_t> seed;
    };

    Pipeline(Config config, Options options);
    ~Pipeline();

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    void run(Stage stage);

    // Artifact paths inside the run directory.
    std::string path(const std::string& artifact) const;

private:
    struct StageIO;

    void run_stage(const StageIO& io, const std::function<void()>& body);
    bool up_to_date(const StageIO& io) const;
    std::uint64_t stage_hash(const StageIO& io) const;
    void mark_done(const StageIO& io) const;

    Gateway& gateway();
    int workers() const;
    std::uint64_t seed() const;

    void stage_ingest();
    void stage_correct();
    void stage_score();
    void stage_filter();
    void stage_keywords();
    void stage_synth();
    void stage_dedup();
    void stage_rate();
    void stage_gate();
    void stage_export();
    void stage_stats();

    Config config_;
    Options options_;
    std::shared_ptr<const Tokenizer> tokenizer_;
    std::unique_ptr<Gateway> gateway_;
    int lock_fd_ = -1;
    std::string lock_path_;
};

} // namespace sciprep
