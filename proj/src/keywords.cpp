#include "sciprep/keywords.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "sciprep/error.hpp"

namespace sciprep {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits; avoids stdlib distribution
// differences so seeded runs are portable.
double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

// Lowercase and strip leading/trailing punctuation; internal characters
// (hyphens in material names, dots in abbreviations) are preserved.
std::string normalize_word(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && is_punct(raw[b])) ++b;
    while (e > b && is_punct(raw[e - 1])) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i)
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    return out;
}

} // namespace

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        "a",     "an",    "the",   "and",  "or",    "of",    "in",    "on",    "at",
        "to",    "for",   "with",  "by",   "is",    "are",   "was",   "were",  "be",
        "been",  "being", "as",    "that", "this",  "these", "those", "it",    "its",
        "from",  "but",   "not",   "we",   "our",   "they",  "their", "which", "can",
        "has",   "have",  "had",   "if",   "then",  "than",  "also",  "into",  "such",
        "each",  "both",  "may",   "more", "most",  "other", "some",  "between",
        "during", "using", "used", "based",
    };
    return words;
}

KeywordTable build_keyword_table(const std::string& domain,
                                 const std::vector<std::string>& texts,
                                 const std::set<std::string>& stopwords) {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
    for (const auto& text : texts) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && is_ws(text[i])) ++i;
            std::size_t start = i;
            while (i < text.size() && !is_ws(text[i])) ++i;
            if (i == start) continue;
            std::string word = normalize_word(std::string_view(text).substr(start, i - start));
            if (word.empty() || stopwords.contains(word)) continue;
            counts[word] += 1;
            ++total;
        }
    }
    if (total == 0)
        throw DataError("keyword table: no words survive normalization and stopword removal");

    KeywordTable table;
    table.domain = domain;
    table.entries.reserve(counts.size());
    for (const auto& [word, count] : counts)
        table.entries.emplace_back(word,
                                   static_cast<double>(count) / static_cast<double>(total));
    std::sort(table.entries.begin(), table.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return table;
}

std::vector<std::string> sample_keywords(const KeywordTable& table, std::size_t k,
                                         double temperature, std::uint64_t rng_seed) {
    if (temperature <= 0.0)
        throw ConfigError("keyword sampling: temperature must be > 0, got " +
                          std::to_string(temperature));
    if (k > table.size())
        throw DataError("keyword sampling: insufficient vocabulary: need " + std::to_string(k) +
                        " words, table has " + std::to_string(table.size()));

    std::vector<double> weights(table.size());
    double total = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        weights[i] = std::pow(table.entries[i].second, 1.0 / temperature);
        total += weights[i];
    }

    std::uint64_t state = rng_seed;
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t draw = 0; draw < k; ++draw) {
        double r = uniform01(state) * total;
        std::size_t chosen = table.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] == 0.0) continue;
            if (r < weights[i]) {
                chosen = i;
                break;
            }
            r -= weights[i];
            chosen = i; // guards against rounding at the upper edge
        }
        out.push_back(table.entries[chosen].first);
        total -= weights[chosen];
        weights[chosen] = 0.0;
    }
    return out;
}

void save_keyword_table(const KeywordTable& table, const std::string& path,
                        const std::set<std::string>& stopwords) {
    std::ofstream out(path);
    if (!out) throw DataError("keyword table: cannot write " + path);
    out << "# domain: " << table.domain << "\n";
    out << "# stopwords:";
    for (const auto& word : stopwords) out << " " << word;
    out << "\n";
    char buf[64];
    for (const auto& [word, prob] : table.entries) {
        std::snprintf(buf, sizeof(buf), "%.17g", prob);
        out << word << "\t" << buf << "\n";
    }
}

KeywordTable load_keyword_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("keyword table: cannot open " + path);
    KeywordTable table;
    std::string line;
    double sum = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            constexpr std::string_view domain_key = "# domain: ";
            if (line.rfind(domain_key, 0) == 0) table.domain = line.substr(domain_key.size());
            continue;
        }
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("keyword table: malformed line in " + path + ": " + line);
        double prob = std::stod(line.substr(tab + 1));
        table.entries.emplace_back(line.substr(0, tab), prob);
        sum += prob;
    }
    if (table.entries.empty()) throw DataError("keyword table: " + path + " has no entries");
    if (std::abs(sum - 1.0) > 1e-9)
        throw DataError("keyword table: probabilities in " + path + " sum to " +
                        std::to_string(sum) + ", expected 1");
    return table;
}

} // namespace sciprep
