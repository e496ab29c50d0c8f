#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hybrid/csr_index.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

struct TemporalParams {
    std::int64_t window_ms = 7LL * 24 * 3600 * 1000;  // 7 days
    double epsilon = 0.05;
    double lambda_hat = 1.4;
    std::uint32_t k_max_partitions = 4;
};

/// max(1, ceil(ln(1/epsilon)/lambda)); throws on domain violations.
std::uint32_t k_star(double epsilon, double lambda);

struct LambdaEstimate {
    double lambda;
    bool no_recency_structure;  // near-flat histogram warning
};

/// ML fit of pi_age proportional to exp(-lambda * age) over a histogram of
/// partition-age ranks (age 0 = newest). Throws if the histogram has fewer
/// than two distinct ranks; configure lambda manually in that case.
LambdaEstimate estimate_lambda(
    const std::map<std::uint32_t, std::uint64_t>& age_rank_counts);

struct TemporalStats {
    std::uint32_t partitions_searched = 0;
    std::uint64_t postings_touched = 0;
    bool early_stopped = false;
};

/// Time-partitioned index: disjoint, contiguous half-open windows sorted
/// oldest to newest, each an independent CsrIndex sharing the corpus-global
/// idf/avgdl so partition scoring is bit-identical to flat scoring.
class TemporalIndex {
public:
    struct Partition {
        std::int64_t window_start;
        std::int64_t window_end;  // half-open [start, end)
        CsrIndex index;
    };

    std::vector<Partition> partitions;
    std::uint64_t total_docs = 0;
    TemporalParams params;
    SharedStats shared;

    std::uint32_t num_partitions() const {
        return static_cast<std::uint32_t>(partitions.size());
    }

    /// Greedy most-recent-first search of at most
    /// min(k_star, k_max_partitions, K) partitions, with the admissible
    /// across-partition upper-bound stop. `use_ub_stop=false` disables the
    /// stop (it never changes the result, only the work).
    RankedList topk(const std::vector<std::string>& query_terms,
                    std::size_t k, const Bm25Params& p,
                    TemporalStats* stats = nullptr,
                    bool use_ub_stop = true) const;

    /// Sum of the partition's per-term MaxScores over the query terms; an
    /// upper bound on any score within the partition (build params).
    double partition_upper_bound(
        std::uint32_t partition_i,
        const std::vector<std::string>& query_terms) const;
};

/// Records with valid timestamps, bucketed into window-aligned partitions.
TemporalIndex build_temporal_index(const std::vector<MemoryRecord>& records,
                                   const TemporalParams& params,
                                   TokenizerMode mode,
                                   const Bm25Params& bm25 = {},
                                   std::size_t chunk_size = 50000);

}  // namespace hybrid
