#include "hybrid/temporal_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybrid {

std::uint32_t k_star(double epsilon, double lambda) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("epsilon must be in (0,1)");
    if (!(lambda > 0.0))
        throw std::invalid_argument("lambda must be > 0");
    double v = std::ceil(std::log(1.0 / epsilon) / lambda);
    if (v < 1.0) v = 1.0;
    return static_cast<std::uint32_t>(v);
}

LambdaEstimate estimate_lambda(
    const std::map<std::uint32_t, std::uint64_t>& age_rank_counts) {
    if (age_rank_counts.size() < 2)
        throw std::invalid_argument(
            "degenerate histogram (single partition-age rank); "
            "configure lambda manually");
    double total = 0.0, weighted = 0.0;
    std::uint32_t max_age = 0;
    for (const auto& [age, count] : age_rank_counts) {
        total += static_cast<double>(count);
        weighted += static_cast<double>(age) * static_cast<double>(count);
        max_age = std::max(max_age, age);
    }
    double sample_mean = weighted / total;

    // Truncated-geometric mean, strictly decreasing in lambda.
    auto model_mean = [&](double lam) {
        double z = 0.0, m = 0.0;
        for (std::uint32_t a = 0; a <= max_age; ++a) {
            double w = std::exp(-lam * static_cast<double>(a));
            z += w;
            m += static_cast<double>(a) * w;
        }
        return m / z;
    };

    double lo = 1e-9, hi = 60.0;
    if (model_mean(lo) <= sample_mean) {
        return {lo, true};  // flat (or inverted) histogram
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (model_mean(mid) > sample_mean) lo = mid;
        else hi = mid;
    }
    double lambda = 0.5 * (lo + hi);
    return {lambda, lambda < 0.1};
}

double TemporalIndex::partition_upper_bound(
    std::uint32_t partition_i,
    const std::vector<std::string>& query_terms) const {
    if (partition_i >= partitions.size())
        throw std::out_of_range("partition index out of range");
    double ub = 0.0;
    const CsrIndex& idx = partitions[partition_i].index;
    for (const auto& t : query_terms) {
        auto it = idx.vocab.find(t);
        if (it != idx.vocab.end()) ub += idx.term_maxscores[it->second];
    }
    return ub;
}

RankedList TemporalIndex::topk(const std::vector<std::string>& query_terms,
                               std::size_t k, const Bm25Params& p,
                               TemporalStats* stats, bool use_ub_stop) const {
    RankedList current;
    if (partitions.empty() || k == 0) return current;

    std::uint32_t budget = std::min<std::uint32_t>(
        {k_star(params.epsilon, params.lambda_hat), params.k_max_partitions,
         num_partitions()});

    // Stored per-partition MaxScores are valid bounds only for the build
    // params; with other params the UB stop is simply not applied.
    bool ub_valid = p.k1 == partitions[0].index.build_params.k1 &&
                    p.b == partitions[0].index.build_params.b;

    std::uint32_t first = num_partitions() - budget;
    for (std::uint32_t i = num_partitions(); i-- > first;) {
        if (stats) ++stats->partitions_searched;
        SearchStats ps;
        RankedList plist =
            partitions[i].index.bm25_topk_maxscore(query_terms, k, p, &ps);
        if (stats) stats->postings_touched += ps.postings_touched;

        // Partition candidates arrive score-descending; stop merging as soon
        // as one cannot enter the current top-k.
        for (const auto& entry : plist.entries) {
            if (current.entries.size() < k ||
                RankedList::better(entry, current.entries.back())) {
                auto pos = std::lower_bound(current.entries.begin(),
                                            current.entries.end(), entry,
                                            RankedList::better);
                current.entries.insert(pos, entry);
                if (current.entries.size() > k) current.entries.pop_back();
            } else {
                break;
            }
        }

        if (use_ub_stop && ub_valid && i > first &&
            current.entries.size() == k) {
            double ub_rest = 0.0;
            for (std::uint32_t j = first; j < i; ++j)
                ub_rest = std::max(ub_rest,
                                   partition_upper_bound(j, query_terms));
            if (current.entries.back().second > ub_rest) {
                if (stats) stats->early_stopped = true;
                break;
            }
        }
    }
    return current;
}

TemporalIndex build_temporal_index(const std::vector<MemoryRecord>& records,
                                   const TemporalParams& params,
                                   TokenizerMode mode, const Bm25Params& bm25,
                                   std::size_t chunk_size) {
    if (params.window_ms <= 0)
        throw std::invalid_argument("window must be > 0");
    TemporalIndex tidx;
    tidx.params = params;
    tidx.total_docs = records.size();
    if (records.empty()) return tidx;

    // Flat pass over the whole corpus pins the global statistics every
    // partition scores with.
    std::vector<std::pair<DocId, std::string>> all;
    all.reserve(records.size());
    for (const auto& r : records) all.emplace_back(r.id, r.text);
    CsrIndex flat = build_index(all, mode, chunk_size, bm25);
    tidx.shared = collect_shared_stats(flat);

    std::int64_t t0 = records.front().ts_ms;
    std::int64_t t1 = t0;
    for (const auto& r : records) {
        t0 = std::min(t0, r.ts_ms);
        t1 = std::max(t1, r.ts_ms);
    }
    std::uint32_t n_parts = static_cast<std::uint32_t>(
        (t1 - t0) / params.window_ms + 1);

    std::vector<std::vector<std::pair<DocId, std::string>>> buckets(n_parts);
    for (const auto& r : records) {
        auto j = static_cast<std::size_t>((r.ts_ms - t0) / params.window_ms);
        buckets[j].emplace_back(r.id, r.text);
    }

    tidx.partitions.reserve(n_parts);
    for (std::uint32_t j = 0; j < n_parts; ++j) {
        TemporalIndex::Partition part;
        part.window_start = t0 + static_cast<std::int64_t>(j) * params.window_ms;
        part.window_end = part.window_start + params.window_ms;
        part.index = build_index(buckets[j], mode, chunk_size, bm25,
                                 &tidx.shared);
        tidx.partitions.push_back(std::move(part));
    }
    return tidx;
}

}  // namespace hybrid
