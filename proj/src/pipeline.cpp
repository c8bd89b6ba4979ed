#include "sciprep/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "sciprep/correction.hpp"
#include "sciprep/dedup.hpp"
#include "sciprep/jsonl.hpp"
#include "sciprep/parallel.hpp"
#include "sciprep/quality.hpp"
#include "sciprep/rating.hpp"
#include "sciprep/records.hpp"
#include "sciprep/synthesis.hpp"

namespace sciprep {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a64_update(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t hash_file(std::uint64_t h, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return h;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a64_update(h, std::string_view(buf, static_cast<std::size_t>(in.gcount())));
    return h;
}

std::vector<DocumentRecord> load_documents(const std::string& path) {
    std::vector<DocumentRecord> docs;
    for (const auto& line : read_lines(path)) docs.push_back(parse_document(line));
    return docs;
}

std::vector<InstructionRecord> load_instructions(const std::string& path) {
    std::vector<InstructionRecord> records;
    for (const auto& line : read_lines(path)) records.push_back(parse_instruction(line));
    return records;
}

void check_unique_ids(const std::vector<DocumentRecord>& docs, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& doc : docs)
        if (!seen.insert(doc.id).second)
            throw DataError(what + ": duplicate document id \"" + doc.id + "\"");
}

void print_histogram(const std::vector<std::size_t>& bins, std::ostream& out) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double lo = 0.5 * static_cast<double>(i);
        out << "  [" << lo << ", " << lo + 0.5 << (i + 1 == bins.size() ? "]" : ")") << "  "
            << bins[i] << "\n";
    }
}

} // namespace

Stage stage_from_string(const std::string& name) {
    if (name == "ingest") return Stage::ingest;
    if (name == "correct") return Stage::correct;
    if (name == "score") return Stage::score;
    if (name == "filter") return Stage::filter;
    if (name == "keywords") return Stage::keywords;
    if (name == "synth") return Stage::synth;
    if (name == "dedup") return Stage::dedup;
    if (name == "rate") return Stage::rate;
    if (name == "gate") return Stage::gate;
    if (name == "export") return Stage::export_;
    if (name == "stats") return Stage::stats;
    if (name == "all") return Stage::all;
    throw ConfigError("unknown stage \"" + name + "\"");
}

std::string to_string(Stage stage) {
    switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::correct: return "correct";
    case Stage::score: return "score";
    case Stage::filter: return "filter";
    case Stage::keywords: return "keywords";
    case Stage::synth: return "synth";
    case Stage::dedup: return "dedup";
    case Stage::rate: return "rate";
    case Stage::gate: return "gate";
    case Stage::export_: return "export";
    case Stage::stats: return "stats";
    case Stage::all: return "all";
    }
    throw ConfigError("invalid stage");
}

struct Pipeline::StageIO {
    std::string name;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, producing stage)
    std::vector<std::string> outputs;
    std::string fingerprint;
};

Pipeline::Pipeline(Config config, Options options)
    : config_(std::move(config)), options_(options), tokenizer_(default_tokenizer()) {
    fs::create_directories(config_.run_dir);
    fs::create_directories(path("checkpoints"));

    lock_path_ = path("run.lock");
    lock_fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (lock_fd_ < 0)
        throw ConfigError("run directory " + config_.run_dir +
                          " is locked by another process (run.lock exists)");
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(lock_fd_, pid.data(), pid.size());
}

Pipeline::~Pipeline() {
    if (lock_fd_ >= 0) {
        ::close(lock_fd_);
        ::unlink(lock_path_.c_str());
    }
}

std::string Pipeline::path(const std::string& artifact) const {
    return (fs::path(config_.run_dir) / artifact).string();
}

int Pipeline::workers() const { return options_.workers.value_or(config_.runtime.workers); }

std::uint64_t Pipeline::seed() const { return options_.seed.value_or(config_.runtime.seed); }

Gateway& Pipeline::gateway() {
    if (!gateway_) {
        std::shared_ptr<Backend> backend;
        if (config_.backend.kind == "mock") {
            auto mock = std::make_shared<MockBackend>(config_.backend.mock_seed);
            if (!config_.backend.fixture_file.empty())
                mock->load_fixture_file(config_.backend.fixture_file);
            backend = mock;
        } else {
            HttpBackendConfig http;
            http.url = config_.backend.url;
            http.model = config_.backend.model;
            http.credential_env = config_.backend.credential_env;
            backend = std::make_shared<HttpBackend>(http);
        }
        GatewayPolicy policy;
        policy.max_retries = config_.backend.max_retries;
        policy.backoff_initial_ms = config_.backend.backoff_ms;
        policy.max_in_flight = config_.backend.max_in_flight;
        gateway_ = std::make_unique<Gateway>(std::move(backend), policy);
    }
    return *gateway_;
}

std::uint64_t Pipeline::stage_hash(const StageIO& io) const {
    std::uint64_t h = fnv1a64_update(1469598103934665603ull, io.name);
    h = fnv1a64_update(h, io.fingerprint);
    for (const auto& [input, producer] : io.inputs) {
        h = fnv1a64_update(h, input);
        h = hash_file(h, input);
    }
    return h;
}

bool Pipeline::up_to_date(const StageIO& io) const {
    const std::string checkpoint = path("checkpoints/" + io.name + ".json");
    std::ifstream in(checkpoint);
    if (!in) return false;
    json j;
    try {
        in >> j;
    } catch (const json::parse_error&) {
        return false;
    }
    if (j.value("hash", std::string()) != std::to_string(stage_hash(io))) return false;
    for (const auto& output : io.outputs)
        if (!fs::exists(output)) return false;
    return true;
}

void Pipeline::mark_done(const StageIO& io) const {
    json j;
    j["hash"] = std::to_string(stage_hash(io));
    j["outputs"] = io.outputs;
    write_text(path("checkpoints/" + io.name + ".json"), j.dump(2) + "\n");
}

void Pipeline::run_stage(const StageIO& io, const std::function<void()>& body) {
    for (const auto& [input, producer] : io.inputs) {
        if (!fs::exists(input)) {
            std::string hint = producer.empty() ? "" : " (run the " + producer + " stage first)";
            throw DataError("missing input file: " + input + hint);
        }
    }
    if (!options_.force && up_to_date(io)) {
        std::cerr << "[" << io.name << "] up to date\n";
        return;
    }
    if (options_.force)
        for (const auto& output : io.outputs) fs::remove(output);
    body();
    mark_done(io);
}

void Pipeline::run(Stage stage) {
    switch (stage) {
    case Stage::ingest: stage_ingest(); return;
    case Stage::correct: stage_correct(); return;
    case Stage::score: stage_score(); return;
    case Stage::filter: stage_filter(); return;
    case Stage::keywords: stage_keywords(); return;
    case Stage::synth: stage_synth(); return;
    case Stage::dedup: stage_dedup(); return;
    case Stage::rate: stage_rate(); return;
    case Stage::gate: stage_gate(); return;
    case Stage::export_: stage_export(); return;
    case Stage::stats: stage_stats(); return;
    case Stage::all:
        stage_ingest();
        stage_correct();
        stage_score();
        stage_filter();
        stage_keywords();
        stage_synth();
        stage_dedup();
        stage_rate();
        stage_gate();
        stage_export();
        return;
    }
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

void Pipeline::stage_ingest() {
    if (config_.ingest.input.empty())
        throw ConfigError("ingest: no input file configured (ingest.input)");
    StageIO io{"ingest", {{config_.ingest.input, ""}}, {path("documents.jsonl")},
               config_.section_fingerprint("ingest")};
    run_stage(io, [&] {
        std::vector<std::string> out;
        std::map<std::string, std::size_t> counters;
        std::set<std::string> ids;
        for (const auto& line : read_lines(config_.ingest.input)) {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw DataError("ingest: malformed JSON at byte " + std::to_string(e.byte) +
                                ": " + e.what());
            }
            DocumentRecord doc;
            doc.source = source_from_string(j.value("source", std::string("other")));
            doc.domain = j.value("domain", std::string());
            if (!j.contains("raw_text") || !j["raw_text"].is_string())
                throw DataError("ingest: schema error: missing field \"raw_text\"");
            doc.raw_text = j["raw_text"].get<std::string>();
            if (j.contains("id")) {
                doc.id = j["id"].get<std::string>();
            } else {
                char suffix[32];
                std::snprintf(suffix, sizeof(suffix), "%06zu",
                              ++counters[to_string(doc.source)]);
                doc.id = to_string(doc.source) + "-" + suffix;
            }
            if (!ids.insert(doc.id).second)
                throw DataError("ingest: duplicate document id \"" + doc.id + "\"");
            doc.token_count = tokenizer_->count(doc.raw_text);
            doc.stage_flags.set(StageFlag::ingested);
            out.push_back(serialize(doc));
        }
        if (out.empty()) throw DataError("ingest: " + config_.ingest.input + " has no records");
        write_lines(path("documents.jsonl"), out);
        std::cerr << "[ingest] " << out.size() << " documents\n";
    });
}

void Pipeline::stage_correct() {
    StageIO io{"correct", {{path("documents.jsonl"), "ingest"}}, {path("corrected.jsonl")},
               config_.section_fingerprint("correct")};
    run_stage(io, [&] {
        const auto docs = load_documents(path("documents.jsonl"));
        check_unique_ids(docs, "correct");

        const std::string out_path = path("corrected.jsonl");
        const std::string progress_path = path("checkpoints/correct.progress");
        std::size_t done = 0;
        if (!options_.force && fs::exists(progress_path)) {
            std::ifstream in(progress_path);
            in >> done;
            if (done != count_lines(out_path) || done > docs.size()) done = 0;
        }
        if (done == 0) fs::remove(out_path);
        if (done > 0) std::cerr << "[correct] resuming after " << done << " documents\n";

        std::size_t fallbacks = 0, preamble_missing = 0;
        const std::size_t block =
            std::max<std::size_t>(16, static_cast<std::size_t>(workers()) * 4);
        while (done < docs.size()) {
            const std::size_t end = std::min(docs.size(), done + block);
            auto outcomes = parallel_map<CorrectionOutcome>(
                end - done, workers(), [&](std::size_t i) {
                    return correct_document(docs[done + i], gateway(), config_.correct,
                                            *tokenizer_);
                });
            std::vector<std::string> lines;
            for (auto& outcome : outcomes) {
                fallbacks += outcome.chunks_fallback;
                preamble_missing += outcome.preamble_missing;
                lines.push_back(serialize(outcome.doc));
            }
            append_lines(out_path, lines);
            done = end;
            write_text(progress_path, std::to_string(done));
        }
        fs::remove(progress_path);
        std::cerr << "[correct] " << docs.size() << " documents, " << fallbacks
                  << " chunk fallbacks, " << preamble_missing << " preamble warnings\n";
    });
}

void Pipeline::stage_score() {
    StageIO io{"score", {{path("corrected.jsonl"), "correct"}}, {path("scored.jsonl")},
               config_.section_fingerprint("score")};
    if (config_.score.source == "external_file")
        io.inputs.emplace_back(config_.score.external_file, "");
    run_stage(io, [&] {
        auto docs = load_documents(path("corrected.jsonl"));

        ScoreSource source;
        if (config_.score.source == "external_file") {
            source.kind = ScoreSource::Kind::external_file;
            source.external_path = config_.score.external_file;
        } else {
            source.kind = ScoreSource::Kind::llm_labeler;
        }
        Gateway* gw = source.kind == ScoreSource::Kind::llm_labeler ? &gateway() : nullptr;
        const ScoringReport report = score_documents(docs, source, gw, workers());

        std::vector<std::string> lines;
        for (const auto& doc : docs) lines.push_back(serialize(doc));
        write_lines(path("scored.jsonl"), lines);

        for (const auto& [id, reason] : report.unscored)
            std::cerr << "[score] unscored " << id << ": " << reason << "\n";
        std::cerr << "[score] " << report.scored << " scored, " << report.unscored.size()
                  << " unscored\n";
    });
}

void Pipeline::stage_filter() {
    StageIO io{"filter",
               {{path("scored.jsonl"), "score"}},
               {path("cpt_kept.jsonl"), path("cpt_dropped.jsonl"),
                path("score_histogram.json")},
               config_.section_fingerprint("filter")};
    run_stage(io, [&] {
        auto docs = load_documents(path("scored.jsonl"));
        const auto bins = score_histogram(docs);
        FilterResult result = percentile_filter(std::move(docs), config_.filter.drop_fraction);

        std::vector<std::string> kept, dropped;
        for (const auto& doc : result.kept) kept.push_back(serialize(doc));
        for (const auto& doc : result.dropped) dropped.push_back(serialize(doc));
        write_lines(path("cpt_kept.jsonl"), kept);
        write_lines(path("cpt_dropped.jsonl"), dropped);

        json hist;
        hist["bin_width"] = 0.5;
        hist["counts"] = bins;
        write_text(path("score_histogram.json"), hist.dump(2) + "\n");

        std::cout << "score histogram (bin width 0.5):\n";
        print_histogram(bins, std::cout);
        std::cerr << "[filter] kept " << result.kept.size() << ", dropped "
                  << result.dropped.size() << " (drop fraction "
                  << config_.filter.drop_fraction << ")\n";
    });
}

void Pipeline::stage_keywords() {
    if (config_.keywords.domains.empty())
        throw ConfigError("keywords: no domains configured (keywords.domains)");
    StageIO io{"keywords", {}, {}, config_.section_fingerprint("keywords")};
    for (const auto& [domain, files] : config_.keywords.domains) {
        for (const auto& file : files) io.inputs.emplace_back(file, "");
        io.outputs.push_back(path("tables/" + domain + ".tsv"));
    }
    run_stage(io, [&] {
        fs::create_directories(path("tables"));
        std::set<std::string> stopwords(config_.keywords.stopwords.begin(),
                                        config_.keywords.stopwords.end());
        if (stopwords.empty()) stopwords = default_stopwords();

        for (const auto& [domain, files] : config_.keywords.domains) {
            std::vector<std::string> texts;
            for (const auto& file : files) {
                std::ifstream in(file);
                if (!in) throw DataError("missing input file: " + file);
                texts.emplace_back(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
            }
            const KeywordTable table = build_keyword_table(domain, texts, stopwords);
            save_keyword_table(table, path("tables/" + domain + ".tsv"), stopwords);
            std::cerr << "[keywords] " << domain << ": " << table.size() << " words\n";
        }
    });
}

void Pipeline::stage_synth() {
    std::set<std::string> domains;
    for (const auto& row : config_.synth.plan) domains.insert(row.domain);
    if (domains.empty()) throw ConfigError("synth: empty plan (synth.plan)");

    StageIO io{"synth", {}, {path("instructions.jsonl"), path("synth_summary.json")},
               config_.section_fingerprint("synth")};
    for (const auto& domain : domains)
        io.inputs.emplace_back(path("tables/" + domain + ".tsv"), "keywords");
    if (!config_.synth.task_registry.empty())
        io.inputs.emplace_back(config_.synth.task_registry, "");

    run_stage(io, [&] {
        std::map<std::string, KeywordTable> tables;
        for (const auto& domain : domains)
            tables[domain] = load_keyword_table(path("tables/" + domain + ".tsv"));

        const TaskRegistry registry = config_.synth.task_registry.empty()
                                          ? TaskRegistry::builtin()
                                          : TaskRegistry::from_file(config_.synth.task_registry);

        SynthesisPolicy policy;
        policy.keywords_per_prompt = config_.keywords.k;
        policy.sampling_temperature = config_.keywords.temperature;
        policy.min_coverage = config_.synth.min_coverage;
        policy.max_attempts = config_.synth.max_attempts;

        const std::string out_path = path("instructions.jsonl");
        const std::string progress_path = path("checkpoints/synth.progress");

        // Per-group resume: the progress file carries summaries of completed
        // groups whose records are already in the output file.
        std::vector<GroupSummary> completed;
        std::size_t completed_records = 0;
        if (!options_.force && fs::exists(progress_path)) {
            std::ifstream in(progress_path);
            json j;
            in >> j;
            for (const auto& g : j) {
                GroupSummary s;
                s.domain = g.at("domain").get<std::string>();
                s.task_type = task_type_from_string(g.at("task_type").get<std::string>());
                s.requested = g.at("requested").get<std::size_t>();
                s.produced = g.at("produced").get<std::size_t>();
                for (const auto& f : g.at("failures"))
                    s.failures.push_back({f.at("id").get<std::string>(),
                                          f.at("attempts").get<int>(),
                                          f.at("reason").get<std::string>()});
                completed_records += s.produced;
                completed.push_back(std::move(s));
            }
            if (completed_records != count_lines(out_path)) {
                completed.clear();
                completed_records = 0;
            }
        }
        if (completed.empty()) fs::remove(out_path);
        if (!completed.empty())
            std::cerr << "[synth] resuming after " << completed.size() << " groups\n";

        auto is_completed = [&](const SynthesisPlanRow& row) {
            return std::any_of(completed.begin(), completed.end(), [&](const GroupSummary& s) {
                return s.domain == row.domain && s.task_type == row.task_type;
            });
        };

        std::vector<GroupSummary> all_summaries = completed;
        auto on_group = [&](const SynthesisPlanRow&,
                            const std::vector<InstructionRecord>& records,
                            const GroupSummary& summary) {
            std::vector<std::string> lines;
            for (const auto& record : records) lines.push_back(serialize(record));
            append_lines(out_path, lines);
            all_summaries.push_back(summary);
            write_text(progress_path, serialize_summary(all_summaries));
        };

        synthesize_batch(config_.synth.plan, tables, registry, gateway(), policy, seed(),
                         is_completed, on_group);

        write_text(path("synth_summary.json"), serialize_summary(all_summaries));
        fs::remove(progress_path);

        std::size_t produced = 0, failed = 0;
        for (const auto& s : all_summaries) {
            produced += s.produced;
            failed += s.failures.size();
        }
        std::cerr << "[synth] " << produced << " instructions, " << failed << " failures\n";
    });
}

void Pipeline::stage_dedup() {
    StageIO io{"dedup", {{path("instructions.jsonl"), "synth"}},
               {path("deduped.jsonl"), path("dedup_report.json")},
               config_.section_fingerprint("dedup")};
    run_stage(io, [&] {
        const auto records = load_instructions(path("instructions.jsonl"));
        DedupResult result = dedup(records, config_.dedup, workers());

        std::vector<std::string> lines;
        for (const auto& record : result.kept) lines.push_back(serialize(record));
        write_lines(path("deduped.jsonl"), lines);
        write_text(path("dedup_report.json"), serialize_report(result.report));

        for (const auto& g : result.report)
            std::cerr << "[dedup] " << g.group << ": removed " << g.removed << "/" << g.records
                      << " (threshold " << g.effective_threshold << ", skipped "
                      << g.pairs_prefilter_skipped << " of " << g.pairs_total << " pairs)\n";
    });
}

void Pipeline::stage_rate() {
    StageIO io{"rate", {{path("deduped.jsonl"), "dedup"}}, {path("rated.jsonl")},
               config_.section_fingerprint("rate")};
    run_stage(io, [&] {
        auto records = load_instructions(path("deduped.jsonl"));
        const RatingReport report = rate_instructions(records, gateway(), {}, workers());

        std::vector<std::string> lines;
        for (const auto& record : records) lines.push_back(serialize(record));
        write_lines(path("rated.jsonl"), lines);

        for (const auto& [id, reason] : report.unrated)
            std::cerr << "[rate] unrated " << id << ": " << reason << "\n";
        std::cerr << "[rate] " << report.rated << " rated, " << report.unrated.size()
                  << " unrated\n";
    });
}

void Pipeline::stage_gate() {
    StageIO io{"gate",
               {{path("rated.jsonl"), "rate"}},
               {path("sft_kept.jsonl"), path("sft_dropped.jsonl"),
                path("rating_histogram.json")},
               config_.section_fingerprint("gate")};
    run_stage(io, [&] {
        auto records = load_instructions(path("rated.jsonl"));
        write_text(path("rating_histogram.json"),
                   serialize_histogram(aspect_histogram(records)));

        GateResult result = threshold_filter(std::move(records), config_.gate.min_average);
        std::vector<std::string> kept, dropped;
        for (const auto& record : result.kept) kept.push_back(serialize(record));
        for (const auto& record : result.dropped) dropped.push_back(serialize(record));
        write_lines(path("sft_kept.jsonl"), kept);
        write_lines(path("sft_dropped.jsonl"), dropped);

        std::cerr << "[gate] kept " << result.kept.size() << ", dropped "
                  << result.dropped.size() << " (min average " << config_.gate.min_average
                  << ")\n";
    });
}

void Pipeline::stage_export() {
    StageIO io{"export",
               {{path("cpt_kept.jsonl"), "filter"}, {path("sft_kept.jsonl"), "gate"}},
               {path("export/cpt.jsonl"), path("export/sft.jsonl"),
                path("export/manifest.json")},
               config_.section_fingerprint("export")};
    run_stage(io, [&] {
        fs::create_directories(path("export"));

        const auto docs = load_documents(path("cpt_kept.jsonl"));
        if (docs.empty())
            throw DataError("export error: no kept documents for the CPT file");
        const auto instructions = load_instructions(path("sft_kept.jsonl"));
        if (instructions.empty())
            throw DataError("export error: no kept instructions for the SFT file");

        std::vector<ManifestEntry> entries;
        std::vector<std::string> cpt_lines;
        for (const auto& doc : docs) {
            json j;
            j["domain"] = doc.domain;
            j["id"] = doc.id;
            j["source"] = to_string(doc.source);
            j["text"] = doc.text_in_effect();
            j["token_count"] = doc.token_count;
            cpt_lines.push_back(j.dump());
            entries.push_back({to_string(doc.source), doc.domain, true, doc.token_count});
        }
        write_lines(path("export/cpt.jsonl"), cpt_lines);

        std::vector<std::string> sft_lines;
        for (const auto& record : instructions) {
            sft_lines.push_back(serialize(record));
            const std::uint64_t tokens = tokenizer_->count(
                record.context + "\n\n" + record.question + "\n\n" + record.answer);
            entries.push_back({config_.export_.sft_source, record.domain, true, tokens});
        }
        write_lines(path("export/sft.jsonl"), sft_lines);

        const DatasetManifest manifest =
            build_manifest(entries, config_.export_.epochs, tokenizer_->name());
        write_text(path("export/manifest.json"), serialize(manifest));

        std::cerr << "[export] " << docs.size() << " documents, " << instructions.size()
                  << " instructions\n";
    });
}

void Pipeline::stage_stats() {
    struct Row {
        const char* artifact;
        const char* label;
    };
    const Row rows[] = {
        {"documents.jsonl", "ingested documents"},
        {"corrected.jsonl", "corrected documents"},
        {"scored.jsonl", "scored documents"},
        {"cpt_kept.jsonl", "CPT kept"},
        {"cpt_dropped.jsonl", "CPT dropped"},
        {"instructions.jsonl", "synthesized instructions"},
        {"deduped.jsonl", "after dedup"},
        {"rated.jsonl", "rated instructions"},
        {"sft_kept.jsonl", "SFT kept"},
        {"sft_dropped.jsonl", "SFT dropped"},
        {"export/cpt.jsonl", "exported CPT records"},
        {"export/sft.jsonl", "exported SFT records"},
    };

    std::cout << "run directory: " << config_.run_dir << "\n";
    std::map<std::string, std::size_t> counts;
    for (const auto& row : rows) {
        const std::string p = path(row.artifact);
        if (!fs::exists(p)) continue;
        counts[row.artifact] = count_lines(p);
        std::cout << "  " << row.label << ": " << counts[row.artifact] << "\n";
    }

    if (counts.contains("cpt_kept.jsonl") && counts.contains("cpt_dropped.jsonl")) {
        const double total =
            static_cast<double>(counts["cpt_kept.jsonl"] + counts["cpt_dropped.jsonl"]);
        if (total > 0)
            std::cout << "  CPT drop fraction: "
                      << static_cast<double>(counts["cpt_dropped.jsonl"]) / total << "\n";
    }
    if (counts.contains("instructions.jsonl") && counts.contains("deduped.jsonl")) {
        const double total = static_cast<double>(counts["instructions.jsonl"]);
        if (total > 0)
            std::cout << "  dedup removal fraction: "
                      << (total - static_cast<double>(counts["deduped.jsonl"])) / total << "\n";
    }
    if (counts.contains("sft_kept.jsonl") && counts.contains("sft_dropped.jsonl")) {
        const double total =
            static_cast<double>(counts["sft_kept.jsonl"] + counts["sft_dropped.jsonl"]);
        if (total > 0)
            std::cout << "  SFT gate drop fraction: "
                      << static_cast<double>(counts["sft_dropped.jsonl"]) / total << "\n";
    }

    if (fs::exists(path("scored.jsonl"))) {
        const auto docs = load_documents(path("scored.jsonl"));
        std::cout << "score histogram (bin width 0.5):\n";
        print_histogram(score_histogram(docs), std::cout);
    }
    if (fs::exists(path("rated.jsonl"))) {
        const auto records = load_instructions(path("rated.jsonl"));
        std::cout << "aspect histogram:\n" << serialize_histogram(aspect_histogram(records));
    }
}

} // namespace sciprep
