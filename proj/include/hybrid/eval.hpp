#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hybrid/types.hpp"

namespace hybrid {

/// query id -> doc id -> graded relevance (non-negative).
using Qrels = std::map<std::string, std::map<DocId, std::uint32_t>>;

/// Exponential-gain nDCG@k: dcg = sum (2^r - 1)/log2(i+1), i 1-based,
/// normalized by the ideal DCG over all judged docs. Returns -1 when the
/// query has no relevant doc (metric undefined; callers exclude and count).
double ndcg_at_k(const RankedList& ranked,
                 const std::map<DocId, std::uint32_t>& rels, std::size_t k);

/// Linear-gain variant (gain r instead of 2^r - 1); regression oracle for
/// the silent-disagreement pitfall. Same undefined convention.
double linear_gain_ndcg_at_k(const RankedList& ranked,
                             const std::map<DocId, std::uint32_t>& rels,
                             std::size_t k);

/// Standard definitions over a gold set; -1 when gold is empty.
double recall_at_k(const RankedList& ranked, const std::set<DocId>& gold,
                   std::size_t k);
double mrr_at_k(const RankedList& ranked, const std::set<DocId>& gold,
                std::size_t k);
double hit_at_k(const RankedList& ranked, const std::set<DocId>& gold,
                std::size_t k);

/// Mean over defined per-query values; excluded counts undefined ones.
struct AggregateResult {
    double mean = 0.0;
    std::size_t defined = 0;
    std::size_t excluded = 0;
};
AggregateResult aggregate(const std::vector<double>& per_query);

struct BootstrapResult {
    double delta_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 0.0;        // doubled one-sided tail, uncapped
    double p_value_capped = 0.0; // min(p_value, 1)
    std::uint32_t resamples = 0;
};

/// Paired bootstrap over per-query metric values: resamples query indices
/// with replacement, delta = mean(a) - mean(b), 95% percentile CI, p from
/// the doubled one-sided tail without capping (values above 1 are
/// reported as-is). Throws on length mismatch or fewer than 2 queries.
BootstrapResult paired_bootstrap(const std::vector<double>& per_query_a,
                                 const std::vector<double>& per_query_b,
                                 std::uint32_t resamples, std::uint64_t seed);

}  // namespace hybrid
