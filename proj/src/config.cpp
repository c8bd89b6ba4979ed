#include "sciprep/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace sciprep {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string resolve(const fs::path& base, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    return p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
}

} // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }

    const fs::path base = fs::path(path).parent_path();
    Config c;
    c.run_dir = resolve(base, j.value("run_dir", c.run_dir));

    if (j.contains("backend")) {
        const json& b = j["backend"];
        c.backend.kind = b.value("kind", c.backend.kind);
        if (c.backend.kind != "mock" && c.backend.kind != "http")
            throw ConfigError("config: backend.kind must be mock or http, got \"" +
                              c.backend.kind + "\"");
        c.backend.mock_seed = b.value("seed", c.backend.mock_seed);
        c.backend.fixture_file = resolve(base, b.value("fixture_file", std::string()));
        c.backend.url = b.value("url", c.backend.url);
        c.backend.model = b.value("model", c.backend.model);
        c.backend.credential_env = b.value("credential_env", c.backend.credential_env);
        c.backend.max_in_flight = b.value("max_in_flight", c.backend.max_in_flight);
        c.backend.max_retries = b.value("max_retries", c.backend.max_retries);
        c.backend.backoff_ms = b.value("backoff_ms", c.backend.backoff_ms);
    }

    if (j.contains("ingest"))
        c.ingest.input = resolve(base, j["ingest"].value("input", std::string()));

    if (j.contains("correct")) {
        const json& s = j["correct"];
        c.correct.max_chunk_tokens = s.value("max_chunk_tokens", c.correct.max_chunk_tokens);
        c.correct.min_ratio = s.value("min_ratio", c.correct.min_ratio);
        c.correct.max_ratio = s.value("max_ratio", c.correct.max_ratio);
    }

    if (j.contains("score")) {
        const json& s = j["score"];
        c.score.source = s.value("source", c.score.source);
        if (c.score.source != "llm_labeler" && c.score.source != "external_file")
            throw ConfigError("config: score.source must be llm_labeler or external_file");
        c.score.external_file = resolve(base, s.value("external_file", std::string()));
        if (c.score.source == "external_file" && c.score.external_file.empty())
            throw ConfigError("config: score.source external_file requires score.external_file");
    }

    if (j.contains("filter"))
        c.filter.drop_fraction = j["filter"].value("drop_fraction", c.filter.drop_fraction);

    if (j.contains("keywords")) {
        const json& s = j["keywords"];
        if (s.contains("domains"))
            for (const auto& [domain, files] : s["domains"].items()) {
                std::vector<std::string> resolved;
                for (const auto& f : files) resolved.push_back(resolve(base, f.get<std::string>()));
                c.keywords.domains[domain] = std::move(resolved);
            }
        if (s.contains("stopwords"))
            c.keywords.stopwords = s["stopwords"].get<std::vector<std::string>>();
        c.keywords.k = s.value("k", c.keywords.k);
        c.keywords.temperature = s.value("temperature", c.keywords.temperature);
    }

    if (j.contains("synth")) {
        const json& s = j["synth"];
        if (s.contains("plan"))
            for (const auto& row : s["plan"]) {
                SynthesisPlanRow r;
                r.domain = row.at("domain").get<std::string>();
                r.task_type = task_type_from_string(row.at("task_type").get<std::string>());
                r.count = row.at("count").get<std::size_t>();
                c.synth.plan.push_back(std::move(r));
            }
        c.synth.min_coverage = s.value("min_coverage", c.synth.min_coverage);
        c.synth.max_attempts = s.value("max_attempts", c.synth.max_attempts);
        c.synth.task_registry = resolve(base, s.value("task_registry", std::string()));
    }

    if (j.contains("dedup")) {
        const json& s = j["dedup"];
        const std::string mode = s.value("mode", std::string("fixed_threshold"));
        if (mode == "fixed_threshold")
            c.dedup.mode = DedupPolicy::Mode::fixed_threshold;
        else if (mode == "target_fraction")
            c.dedup.mode = DedupPolicy::Mode::target_fraction;
        else
            throw ConfigError("config: dedup.mode must be fixed_threshold or target_fraction");
        c.dedup.threshold = s.value("threshold", c.dedup.threshold);
        c.dedup.target_fraction = s.value("target_fraction", c.dedup.target_fraction);
        c.dedup.group_by = s.value("group_by", c.dedup.group_by);
    }

    if (j.contains("gate"))
        c.gate.min_average = j["gate"].value("min_average", c.gate.min_average);

    if (j.contains("export")) {
        const json& s = j["export"];
        if (s.contains("epochs"))
            for (const auto& [source, epochs] : s["epochs"].items())
                c.export_.epochs.emplace_back(source, epochs.get<int>());
        c.export_.sft_source = s.value("sft_source", c.export_.sft_source);
    }

    if (j.contains("runtime")) {
        const json& s = j["runtime"];
        c.runtime.workers = s.value("workers", c.runtime.workers);
        c.runtime.seed = s.value("seed", c.runtime.seed);
        if (c.runtime.workers < 1)
            throw ConfigError("config: runtime.workers must be >= 1");
    }

    return c;
}

std::string Config::section_fingerprint(const std::string& section) const {
    json j;
    if (section == "ingest") {
        j = {{"input", ingest.input}};
    } else if (section == "correct") {
        j = {{"max_chunk_tokens", correct.max_chunk_tokens},
             {"min_ratio", correct.min_ratio},
             {"max_ratio", correct.max_ratio}};
    } else if (section == "score") {
        j = {{"source", score.source}, {"external_file", score.external_file}};
    } else if (section == "filter") {
        j = {{"drop_fraction", filter.drop_fraction}};
    } else if (section == "keywords") {
        j = {{"domains", keywords.domains},
             {"stopwords", keywords.stopwords},
             {"k", keywords.k},
             {"temperature", keywords.temperature}};
    } else if (section == "synth") {
        json plan = json::array();
        for (const auto& row : synth.plan)
            plan.push_back({{"domain", row.domain},
                            {"task_type", to_string(row.task_type)},
                            {"count", row.count}});
        j = {{"plan", plan},
             {"min_coverage", synth.min_coverage},
             {"max_attempts", synth.max_attempts},
             {"task_registry", synth.task_registry}};
    } else if (section == "dedup") {
        j = {{"mode", dedup.mode == DedupPolicy::Mode::fixed_threshold ? "fixed_threshold"
                                                                       : "target_fraction"},
             {"threshold", dedup.threshold},
             {"target_fraction", dedup.target_fraction},
             {"group_by", dedup.group_by}};
    } else if (section == "rate") {
        j = json::object();
    } else if (section == "gate") {
        j = {{"min_average", gate.min_average}};
    } else if (section == "export") {
        json epochs = json::object();
        for (const auto& [source, n] : export_.epochs) epochs[source] = n;
        j = {{"epochs", epochs}, {"sft_source", export_.sft_source}};
    } else {
        throw ConfigError("config: unknown section \"" + section + "\"");
    }
    j["backend_kind"] = backend.kind;
    j["backend_seed"] = backend.mock_seed;
    j["seed"] = runtime.seed;
    return j.dump();
}

} // namespace sciprep
