#include "sciprep/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include <json.hpp>

namespace sciprep {

namespace {

// Two-row full DP; the reference path for the public normalized distance.
int levenshtein_full(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    std::vector<int> prev(m + 1), cur(m + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (int i = 1; i <= n; ++i) {
        cur[0] = i;
        const char ai = a[i - 1];
        for (int j = 1; j <= m; ++j) {
            int sub = prev[j - 1] + (ai == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

struct UnionFind {
    explicit UnionFind(std::size_t size) : parent(size) {
        std::iota(parent.begin(), parent.end(), 0);
    }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]]; // path halving
            x = parent[x];
        }
        return x;
    }

    void merge(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }

    std::vector<std::size_t> parent;
};

struct GroupView {
    std::vector<std::size_t> members;     // indices into the record span,
                                          // sorted by (question length, idx)
    std::vector<const std::string*> q;    // parallel to members
    std::vector<const std::string*> a;
};

struct PassStats {
    std::size_t skipped = 0;
    std::size_t evaluated = 0;
};

// Evaluates all pairs of one group at `threshold`, collecting merge edges.
// Members are sorted by question length, so once the question length gap
// alone caps similarity below the threshold, every later partner is skipped
// in bulk; surviving pairs get the exact product bound, then bounded DP.
PassStats evaluate_pairs(const GroupView& g, double threshold,
                         std::vector<std::pair<std::size_t, std::size_t>>& edges, int workers) {
    const std::size_t n = g.members.size();
    edges.clear();
    if (n < 2) return {};

    auto run_range = [&](std::size_t begin, std::size_t end,
                         std::vector<std::pair<std::size_t, std::size_t>>& local_edges,
                         PassStats& stats) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::string& qi = *g.q[i];
            const std::string& ai = *g.a[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                const std::string& qj = *g.q[j];
                const double max_q = static_cast<double>(qj.size()); // qj is the longer
                const double gap_q = max_q == 0.0
                                         ? 0.0
                                         : (max_q - static_cast<double>(qi.size())) / max_q;
                if (1.0 - gap_q < threshold) {
                    stats.skipped += n - j; // longer partners only widen the gap
                    break;
                }
                const std::string& aj = *g.a[j];
                const double max_a = static_cast<double>(std::max(ai.size(), aj.size()));
                const double gap_a =
                    max_a == 0.0 ? 0.0
                                 : std::abs(static_cast<double>(ai.size()) -
                                            static_cast<double>(aj.size())) / max_a;
                if ((1.0 - gap_q) * (1.0 - gap_a) < threshold) {
                    ++stats.skipped;
                    continue;
                }
                ++stats.evaluated;

                const int cutoff_q =
                    static_cast<int>(std::floor((1.0 - threshold) * max_q + 1e-9));
                const int dq = max_q == 0.0 ? 0 : levenshtein_bounded(qi, qj, cutoff_q);
                if (dq > cutoff_q) continue;
                const double factor_q = max_q == 0.0 ? 1.0 : 1.0 - dq / max_q;

                const int cutoff_a = static_cast<int>(
                    std::floor((1.0 - threshold / factor_q) * max_a + 1e-9));
                if (cutoff_a < 0) continue;
                const int da = max_a == 0.0 ? 0 : levenshtein_bounded(ai, aj, cutoff_a);
                if (da > cutoff_a) continue;
                const double factor_a = max_a == 0.0 ? 1.0 : 1.0 - da / max_a;

                if (factor_q * factor_a >= threshold) local_edges.emplace_back(i, j);
            }
        }
    };

    if (workers <= 1 || n < 256) {
        PassStats stats;
        run_range(0, n, edges, stats);
        return stats;
    }

    // Partition rows round-robin-ish by contiguous blocks; edge order does not
    // matter for the final clustering.
    const std::size_t nw = std::min<std::size_t>(workers, n);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> local_edges(nw);
    std::vector<PassStats> local_stats(nw);
    std::vector<std::thread> threads;
    const std::size_t block = (n + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
        std::size_t begin = w * block;
        std::size_t end = std::min(n, begin + block);
        if (begin >= end) break;
        threads.emplace_back([&, w, begin, end] {
            run_range(begin, end, local_edges[w], local_stats[w]);
        });
    }
    for (auto& t : threads) t.join();

    PassStats stats;
    for (std::size_t w = 0; w < nw; ++w) {
        stats.skipped += local_stats[w].skipped;
        stats.evaluated += local_stats[w].evaluated;
        edges.insert(edges.end(), local_edges[w].begin(), local_edges[w].end());
    }
    return stats;
}

struct ClusterPass {
    std::vector<std::vector<std::size_t>> components; // sorted member lists
    std::size_t removed = 0;
    PassStats stats;
};

ClusterPass cluster_at(const GroupView& g, double threshold, int workers) {
    ClusterPass pass;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    pass.stats = evaluate_pairs(g, threshold, edges, workers);

    UnionFind uf(g.members.size());
    for (const auto& [i, j] : edges) uf.merge(i, j);

    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < g.members.size(); ++i) by_root[uf.find(i)].push_back(i);
    for (auto& [root, members] : by_root) {
        if (members.size() > 1) pass.removed += members.size() - 1;
        pass.components.push_back(std::move(members));
    }
    return pass;
}

} // namespace

int levenshtein_bounded(std::string_view a, std::string_view b, int cutoff) {
    if (cutoff < 0) cutoff = 0;
    if (a.size() > b.size()) std::swap(a, b);
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (m - n > cutoff) return cutoff + 1;
    const int inf = cutoff + 1;

    std::vector<int> prev(m + 1, inf), cur(m + 1, inf);
    for (int j = 0; j <= std::min(m, cutoff); ++j) prev[j] = j;
    for (int i = 1; i <= n; ++i) {
        const int jlo = std::max(0, i - cutoff);
        const int jhi = std::min(m, i + cutoff);
        if (jlo > 0) cur[jlo - 1] = inf;
        if (jhi < m) cur[jhi + 1] = inf;
        int row_min = inf;
        const char ai = a[i - 1];
        for (int j = jlo; j <= jhi; ++j) {
            int best;
            if (j == 0) {
                best = i;
            } else {
                best = prev[j - 1] + (ai == b[j - 1] ? 0 : 1);
                if (prev[j] + 1 < best) best = prev[j] + 1;
                if (cur[j - 1] + 1 < best) best = cur[j - 1] + 1;
            }
            cur[j] = std::min(best, inf);
            row_min = std::min(row_min, cur[j]);
        }
        if (row_min > cutoff) return inf;
        std::swap(prev, cur);
    }
    return std::min(prev[m], inf);
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
    const std::size_t max_len = std::max(a.size(), b.size());
    if (max_len == 0) return 0.0;
    return static_cast<double>(levenshtein_full(a, b)) / static_cast<double>(max_len);
}

double pair_similarity(const InstructionRecord& r1, const InstructionRecord& r2) {
    const double lev_q = normalized_levenshtein(r1.question, r2.question);
    const double lev_a = normalized_levenshtein(r1.answer, r2.answer);
    return (1.0 - lev_q) * (1.0 - lev_a);
}

DedupResult dedup(const std::vector<InstructionRecord>& records, const DedupPolicy& policy,
                  int workers) {
    if (policy.mode == DedupPolicy::Mode::fixed_threshold) {
        if (policy.threshold <= 0.0 || policy.threshold > 1.0)
            throw ConfigError("dedup: threshold must be in (0, 1], got " +
                              std::to_string(policy.threshold));
    } else {
        if (policy.target_fraction < 0.0 || policy.target_fraction >= 1.0)
            throw ConfigError("dedup: target_fraction must be in [0, 1), got " +
                              std::to_string(policy.target_fraction));
    }
    if (policy.group_by != "task_type" && policy.group_by != "domain" &&
        policy.group_by != "none")
        throw ConfigError("dedup: group_by must be task_type, domain, or none, got \"" +
                          policy.group_by + "\"");

    auto group_key = [&](const InstructionRecord& r) -> std::string {
        if (policy.group_by == "task_type") return to_string(r.task_type);
        if (policy.group_by == "domain") return r.domain;
        return "all";
    };

    std::map<std::string, GroupView> groups;
    for (std::size_t i = 0; i < records.size(); ++i)
        groups[group_key(records[i])].members.push_back(i);

    DedupResult result;
    std::vector<bool> keep(records.size(), false);
    std::vector<std::int64_t> cluster_ids(records.size(), -1);
    std::int64_t next_cluster_id = 0;

    for (auto& [key, group] : groups) {
        std::sort(group.members.begin(), group.members.end(),
                  [&](std::size_t x, std::size_t y) {
                      if (records[x].question.size() != records[y].question.size())
                          return records[x].question.size() < records[y].question.size();
                      return x < y;
                  });
        group.q.reserve(group.members.size());
        group.a.reserve(group.members.size());
        for (std::size_t idx : group.members) {
            group.q.push_back(&records[idx].question);
            group.a.push_back(&records[idx].answer);
        }

        const std::size_t n = group.members.size();
        GroupReport report;
        report.group = key;
        report.records = n;
        report.pairs_total = n < 2 ? 0 : n * (n - 1) / 2;

        ClusterPass pass;
        if (policy.mode == DedupPolicy::Mode::fixed_threshold) {
            report.effective_threshold = policy.threshold;
            pass = cluster_at(group, policy.threshold, workers);
        } else {
            // removal(t) decreases in t; bisect and keep the nearest outcome.
            const double target = policy.target_fraction;
            double lo = 0.05, hi = 1.0;
            double best_gap = std::numeric_limits<double>::infinity();
            for (int iter = 0; iter < 24; ++iter) {
                double mid = 0.5 * (lo + hi);
                ClusterPass probe = cluster_at(group, mid, workers);
                double frac = n == 0 ? 0.0
                                     : static_cast<double>(probe.removed) /
                                           static_cast<double>(n);
                double gap = std::abs(frac - target);
                if (gap < best_gap) {
                    best_gap = gap;
                    report.effective_threshold = mid;
                    pass = std::move(probe);
                }
                if (gap <= 0.01) break;
                if (frac > target)
                    lo = mid; // removing too much: raise the threshold
                else
                    hi = mid;
            }
            report.target_attained = best_gap <= 0.01;
        }

        report.pairs_prefilter_skipped = pass.stats.skipped;
        report.pairs_evaluated = pass.stats.evaluated;
        report.removed = pass.removed;
        report.removal_fraction =
            n == 0 ? 0.0 : static_cast<double>(pass.removed) / static_cast<double>(n);

        for (const auto& component : pass.components) {
            // Representative: lexicographically smallest record id.
            std::size_t rep = component.front();
            for (std::size_t pos : component)
                if (records[group.members[pos]].id < records[group.members[rep]].id) rep = pos;
            const std::int64_t cid = next_cluster_id++;
            for (std::size_t pos : component) cluster_ids[group.members[pos]] = cid;
            keep[group.members[rep]] = true;
            if (component.size() > 1) {
                report.clusters += 1;
                std::vector<std::string> ids;
                ids.reserve(component.size());
                for (std::size_t pos : component) ids.push_back(records[group.members[pos]].id);
                std::sort(ids.begin(), ids.end());
                result.clusters.push_back(std::move(ids));
            }
        }
        result.report.push_back(std::move(report));
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!keep[i]) continue;
        InstructionRecord r = records[i];
        r.cluster_id = cluster_ids[i];
        result.kept.push_back(std::move(r));
    }
    return result;
}

std::string serialize_report(const std::vector<GroupReport>& report) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& g : report) {
        j.push_back({{"group", g.group},
                     {"records", g.records},
                     {"pairs_total", g.pairs_total},
                     {"pairs_prefilter_skipped", g.pairs_prefilter_skipped},
                     {"pairs_evaluated", g.pairs_evaluated},
                     {"clusters", g.clusters},
                     {"removed", g.removed},
                     {"effective_threshold", g.effective_threshold},
                     {"removal_fraction", g.removal_fraction},
                     {"target_attained", g.target_attained}});
    }
    return j.dump(2) + "\n";
}

} // namespace sciprep
