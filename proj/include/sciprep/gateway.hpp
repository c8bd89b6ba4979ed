#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "sciprep/error.hpp"

namespace sciprep {

struct CompletionRequest {
    std::string prompt;
    int max_output_units = 2048;
    double temperature = 0.0;
    std::optional<std::uint64_t> seed;
};

struct CompletionResponse {
    std::string text;
    std::string backend_id;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Deterministic offline backend. Fixture entries map a prompt hash to a
/// canned response; with a seed set, prompts without a fixture get a
/// synthesized response that is a pure function of (prompt, seed), so results
/// are independent of call interleaving.
class MockBackend final : public Backend {
public:
    MockBackend() = default;
    explicit MockBackend(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t prompt_hash(std::string_view prompt);

    void add_fixture(std::string_view prompt, std::string response);
    void load_fixture_file(const std::string& path);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string id() const override { return "mock"; }

private:
    std::string synthesize(const std::string& prompt, std::uint64_t mixed_seed) const;

    std::map<std::uint64_t, std::string> fixtures_;
    std::optional<std::uint64_t> seed_;
};

struct HttpBackendConfig {
    std::string url;            // full endpoint URL, chat-completions style
    std::string model;
    std::string credential_env; // name of the env var holding the API key
    int timeout_seconds = 120;
};

/// Live chat-completion HTTP backend. Construction fails fast when the
/// credential env var is unset.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string id() const override { return "http:" + config_.model; }

private:
    HttpBackendConfig config_;
    std::string credential_;
    std::string scheme_host_port_;
    std::string path_;
};

struct GatewayPolicy {
    int max_retries = 3;        // retries after the first attempt
    int backoff_initial_ms = 250;
    int max_in_flight = 4;
};

/// Thread-safe completion front end: bounds concurrent requests and retries
/// transient backend failures with exponential backoff.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewayPolicy policy);

    CompletionResponse complete(const CompletionRequest& request);

    Backend& backend() { return *backend_; }
    const GatewayPolicy& policy() const { return policy_; }

private:
    class InFlightSlot;

    std::shared_ptr<Backend> backend_;
    GatewayPolicy policy_;
    std::mutex mutex_;
    std::condition_variable slot_freed_;
    int in_flight_ = 0;
};

} // namespace sciprep
