#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace sciprep {

/// Counts text length in tokenizer units. Implementations must be pure and
/// thread-safe; manifests record which tokenizer produced the counts.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::uint64_t count(std::string_view text) const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic model-free approximation: split on whitespace, each word
/// contributes ceil(word_bytes / 4) units.
class ApproxTokenizer final : public Tokenizer {
public:
    std::uint64_t count(std::string_view text) const override {
        std::uint64_t total = 0;
        std::size_t i = 0;
        const std::size_t n = text.size();
        while (i < n) {
            while (i < n && is_space(text[i])) ++i;
            std::size_t start = i;
            while (i < n && !is_space(text[i])) ++i;
            if (i > start) total += (i - start + 3) / 4;
        }
        return total;
    }

    std::string name() const override { return "approx-ws4"; }

private:
    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    }
};

inline std::shared_ptr<const Tokenizer> default_tokenizer() {
    static const auto instance = std::make_shared<const ApproxTokenizer>();
    return instance;
}

} // namespace sciprep
