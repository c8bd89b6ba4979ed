#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sciprep/pipeline.hpp"

namespace {

int exit_code_for(const sciprep::Error& e) {
    switch (e.category()) {
    case sciprep::ErrorCategory::config: return 1;
    case sciprep::ErrorCategory::data: return 2;
    case sciprep::ErrorCategory::backend: return 3;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sciprep: corpus curation and instruction synthesis pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    bool force = false;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "pipeline config file (JSON)")->required();
    app.add_flag("--force", force, "rerun stages even when up to date");
    app.add_option("--workers", workers, "worker threads within a stage");
    app.add_option("--seed", seed, "override the run seed");

    const char* stages[] = {"ingest", "correct", "score",  "filter", "keywords", "synth",
                            "dedup",  "rate",    "gate",   "export", "stats",    "all"};
    const char* descriptions[] = {
        "normalize raw documents into the canonical schema",
        "fix extraction artifacts chunk by chunk",
        "attach educational-value scores",
        "drop the lowest-scoring fraction",
        "build per-domain keyword tables",
        "generate candidate instructions",
        "remove near-duplicate instructions",
        "rate instructions on five aspects",
        "keep instructions at or above the average-score gate",
        "write the CPT/SFT exports and the manifest",
        "print per-stage counts and histograms",
        "run every stage in order",
    };
    for (std::size_t i = 0; i < std::size(stages); ++i)
        app.add_subcommand(stages[i], descriptions[i]);

    CLI11_PARSE(app, argc, argv);

    try {
        sciprep::Config config = sciprep::Config::load(config_path);
        sciprep::Pipeline::Options options;
        options.force = force;
        options.workers = workers;
        options.seed = seed;
        sciprep::Pipeline pipeline(std::move(config), options);
        pipeline.run(sciprep::stage_from_string(app.get_subcommands().front()->get_name()));
        return 0;
    } catch (const sciprep::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
