#include "sciprep/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "sciprep/parsers.hpp"
#include "sciprep/prompts.hpp"
#include "sciprep/records.hpp"

namespace sciprep {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string collapse_spaces(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_run = false;
    for (char c : text) {
        if (c == ' ' || c == '\t') {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty() && out.back() != '\n') out.push_back(' ');
        in_run = false;
        out.push_back(c);
    }
    return out;
}

std::optional<std::string> slice_between(const std::string& text, std::string_view begin,
                                         std::string_view end) {
    std::size_t b = text.find(begin);
    if (b == std::string::npos) return std::nullopt;
    b += begin.size();
    std::size_t e = text.find(end, b);
    if (e == std::string::npos) return std::nullopt;
    return text.substr(b, e - b);
}

std::vector<std::string> extract_keyword_list(const std::string& prompt) {
    std::vector<std::string> keywords;
    std::size_t pos = prompt.find("the keywords:");
    if (pos == std::string::npos) return keywords;
    pos += std::string_view("the keywords:").size();
    while (pos < prompt.size() && (prompt[pos] == '\n' || prompt[pos] == ' ')) ++pos;
    std::size_t end = prompt.find('\n', pos);
    std::string line = prompt.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (!line.empty() && line.back() == '.') line.pop_back();
    std::size_t i = 0;
    while (i < line.size()) {
        std::size_t comma = line.find(", ", i);
        std::string word =
            comma == std::string::npos ? line.substr(i) : line.substr(i, comma - i);
        if (!word.empty()) keywords.push_back(word);
        if (comma == std::string::npos) break;
        i = comma + 2;
    }
    return keywords;
}

std::string join(const std::vector<std::string>& words, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += sep;
        out += words[i];
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// MockBackend
// ---------------------------------------------------------------------------

std::uint64_t MockBackend::prompt_hash(std::string_view prompt) { return fnv1a64(prompt); }

void MockBackend::add_fixture(std::string_view prompt, std::string response) {
    fixtures_[prompt_hash(prompt)] = std::move(response);
}

void MockBackend::load_fixture_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("mock backend: cannot open fixture file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("mock backend: fixture file " + path + " is not valid JSON: " +
                          e.what());
    }
    for (const auto& [key, value] : j.items())
        fixtures_[std::stoull(key, nullptr, 16)] = value.get<std::string>();
}

CompletionResponse MockBackend::complete(const CompletionRequest& request) {
    const std::uint64_t h = prompt_hash(request.prompt);
    if (auto it = fixtures_.find(h); it != fixtures_.end()) return {it->second, id()};
    if (!seed_)
        throw BackendError("mock backend: no fixture for prompt hash " + std::to_string(h));
    std::uint64_t mixed = h ^ (*seed_ * 0x9e3779b97f4a7c15ull) ^
                          (request.seed.value_or(0) * 0xbf58476d1ce4e5b9ull);
    return {synthesize(request.prompt, mixed), id()};
}

std::string MockBackend::synthesize(const std::string& prompt, std::uint64_t mixed_seed) const {
    std::uint64_t rng = mixed_seed;

    if (prompt.find(kCorrectionPreamble) != std::string::npos) {
        auto raw = slice_between(prompt, "Raw Text:\n\n", "\n\nStart your response");
        std::string cleaned = collapse_spaces(raw.value_or(prompt));
        return std::string(kCorrectionPreamble) + "\n\n" + cleaned;
    }

    if (prompt.find(kEducationalScoreMarker) != std::string::npos) {
        int score = static_cast<int>(splitmix64(rng) % 6);
        return "The extract presents its subject with a structure and depth consistent with "
               "instructional material at this level.\n\n" +
               std::string(kEducationalScoreMarker) + " " + std::to_string(score);
    }

    if (prompt.find("\"text\" and \"answer\" attributes") != std::string::npos) {
        std::vector<std::string> keywords = extract_keyword_list(prompt);
        if (keywords.empty()) keywords = {"measurement", "analysis"};

        auto value = [&] {
            return std::to_string(10 + splitmix64(rng) % 90) + "." +
                   std::to_string(splitmix64(rng) % 100);
        };
        std::string v1 = value(), v2 = value(), v3 = value(), v4 = value();

        std::string text = "Recent investigations of " + join(keywords, ", ") +
                           " report consistent trends across repeated trials. The following "
                           "table summarizes the measured quantities. "
                           "\\begin{tabular}{|c|c|c|}\\hline Sample & Onset & Peak "
                           "\\\\\\hline A" +
                           std::to_string(splitmix64(rng) % 10) + " & " + v1 + " & " + v2 +
                           " \\\\\\hline B" + std::to_string(splitmix64(rng) % 10) + " & " + v3 +
                           " & " + v4 + " \\\\\\hline\\end{tabular} These values anchor the "
                           "discussion of " +
                           keywords.front() + " throughout the study.";
        std::string answer = "Sample,Onset,Peak\nA,";
        answer += v1 + "," + v2 + "\nB," + v3 + "," + v4;

        json out;
        out["text"] = text;
        out["answer"] = answer;
        return out.dump();
    }

    if (prompt.find("instruction-tuning data") != std::string::npos) {
        AspectScores scores;
        scores.clarity = 3 + static_cast<int>(splitmix64(rng) % 3);
        scores.complexity = 3 + static_cast<int>(splitmix64(rng) % 3);
        scores.correctness = 3 + static_cast<int>(splitmix64(rng) % 3);
        scores.usefulness = 3 + static_cast<int>(splitmix64(rng) % 3);
        scores.adaptability = 3 + static_cast<int>(splitmix64(rng) % 3);
        scores.total = scores.aspect_sum();
        scores.explanation =
            "The sample defines a concrete task over the provided context and the response "
            "addresses it directly; the scores reflect its precision and scope.";
        return format_rating(scores);
    }

    throw BackendError("mock backend: unrecognized prompt kind");
}

// ---------------------------------------------------------------------------
// HttpBackend
// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.credential_env.empty())
        throw ConfigError("http backend: no credential env var configured");
    const char* cred = std::getenv(config_.credential_env.c_str());
    if (cred == nullptr || *cred == '\0')
        throw ConfigError("http backend: credential environment variable " +
                          config_.credential_env + " is not set");
    credential_ = cred;

    std::size_t scheme_end = config_.url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("http backend: url must include a scheme: " + config_.url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (config_.url.substr(0, scheme_end) == "https")
        throw ConfigError("http backend: built without TLS support, https url unavailable");
#endif
    std::size_t path_start = config_.url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = config_.url;
        path_ = "/";
    } else {
        scheme_host_port_ = config_.url.substr(0, path_start);
        path_ = config_.url.substr(path_start);
    }
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
    json body;
    body["model"] = config_.model;
    body["messages"] = json::array({json{{"content", request.prompt}, {"role", "user"}}});
    body["max_tokens"] = request.max_output_units;
    body["temperature"] = request.temperature;
    if (request.seed) body["seed"] = *request.seed;

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers{{"Authorization", "Bearer " + credential_}};

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
        throw BackendError("http backend: connection error: " + httplib::to_string(res.error()),
                           /*transient=*/true);
    if (res->status == 429 || res->status >= 500)
        throw BackendError("http backend: status " + std::to_string(res->status),
                           /*transient=*/true);
    if (res->status != 200)
        throw BackendError("http backend: status " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 256));

    try {
        json j = json::parse(res->body);
        return {j.at("choices").at(0).at("message").at("content").get<std::string>(), id()};
    } catch (const json::exception& e) {
        throw BackendError(std::string("http backend: unexpected response shape: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayPolicy policy)
    : backend_(std::move(backend)), policy_(policy) {
    if (!backend_) throw ConfigError("gateway: no backend configured");
    if (policy_.max_in_flight < 1) throw ConfigError("gateway: max_in_flight must be >= 1");
}

CompletionResponse Gateway::complete(const CompletionRequest& request) {
    std::unique_lock lock(mutex_);
    slot_freed_.wait(lock, [&] { return in_flight_ < policy_.max_in_flight; });
    ++in_flight_;
    lock.unlock();

    struct SlotRelease {
        Gateway* gw;
        ~SlotRelease() {
            {
                std::lock_guard guard(gw->mutex_);
                --gw->in_flight_;
            }
            gw->slot_freed_.notify_one();
        }
    } release{this};

    for (int attempt = 0;; ++attempt) {
        try {
            return backend_->complete(request);
        } catch (const BackendError& e) {
            if (!e.transient()) throw;
            if (attempt >= policy_.max_retries)
                throw BackendError("transport error after " + std::to_string(attempt + 1) +
                                   " attempts: " + e.what());
            auto delay = std::chrono::milliseconds(
                static_cast<long long>(policy_.backoff_initial_ms) * (1ll << attempt));
            std::this_thread::sleep_for(delay);
        }
    }
}

} // namespace sciprep
