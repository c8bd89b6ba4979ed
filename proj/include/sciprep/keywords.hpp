#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace sciprep {

/// Normalized word-frequency distribution for one domain. Entries are sorted
/// by descending probability (ties by word) and sum to 1 within 1e-9.
struct KeywordTable {
    std::string domain;
    std::vector<std::pair<std::string, double>> entries;

    std::size_t size() const { return entries.size(); }
};

/// The default article/function-word stopword set.
const std::set<std::string>& default_stopwords();

/// Lowercases, splits on whitespace, strips edge punctuation (internal
/// hyphens survive), removes stopwords, and normalizes counts to
/// probabilities. A corpus with no surviving words is an error.
KeywordTable build_keyword_table(const std::string& domain,
                                 const std::vector<std::string>& texts,
                                 const std::set<std::string>& stopwords);

/// Draws k distinct words without replacement; draw weights are p^(1/T),
/// renormalized after each draw. Deterministic for a given seed.
std::vector<std::string> sample_keywords(const KeywordTable& table, std::size_t k,
                                         double temperature, std::uint64_t rng_seed);

/// Two-column table file (word TAB probability), descending by probability,
/// with the domain and stopword list recorded in header comments.
void save_keyword_table(const KeywordTable& table, const std::string& path,
                        const std::set<std::string>& stopwords);
KeywordTable load_keyword_table(const std::string& path);

} // namespace sciprep
