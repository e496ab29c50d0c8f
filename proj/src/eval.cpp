#include "hybrid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hybrid/rng.hpp"

namespace hybrid {

namespace {

double dcg(const RankedList& ranked,
           const std::map<DocId, std::uint32_t>& rels, std::size_t k,
           bool exponential) {
    double sum = 0.0;
    std::size_t n = std::min(k, ranked.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto it = rels.find(ranked.entries[i].first);
        if (it == rels.end() || it->second == 0) continue;
        double gain = exponential
                          ? std::exp2(static_cast<double>(it->second)) - 1.0
                          : static_cast<double>(it->second);
        sum += gain / std::log2(static_cast<double>(i + 2));
    }
    return sum;
}

double ideal_dcg(const std::map<DocId, std::uint32_t>& rels, std::size_t k,
                 bool exponential) {
    std::vector<std::uint32_t> grades;
    for (const auto& [doc, r] : rels)
        if (r > 0) grades.push_back(r);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double sum = 0.0;
    std::size_t n = std::min(k, grades.size());
    for (std::size_t i = 0; i < n; ++i) {
        double gain = exponential
                          ? std::exp2(static_cast<double>(grades[i])) - 1.0
                          : static_cast<double>(grades[i]);
        sum += gain / std::log2(static_cast<double>(i + 2));
    }
    return sum;
}

double ndcg_impl(const RankedList& ranked,
                 const std::map<DocId, std::uint32_t>& rels, std::size_t k,
                 bool exponential) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    double ideal = ideal_dcg(rels, k, exponential);
    if (ideal <= 0.0) return -1.0;  // undefined: no relevant docs
    return dcg(ranked, rels, k, exponential) / ideal;
}

}  // namespace

double ndcg_at_k(const RankedList& ranked,
                 const std::map<DocId, std::uint32_t>& rels, std::size_t k) {
    return ndcg_impl(ranked, rels, k, true);
}

double linear_gain_ndcg_at_k(const RankedList& ranked,
                             const std::map<DocId, std::uint32_t>& rels,
                             std::size_t k) {
    return ndcg_impl(ranked, rels, k, false);
}

double recall_at_k(const RankedList& ranked, const std::set<DocId>& gold,
                   std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (gold.empty()) return -1.0;
    std::size_t hits = 0;
    std::size_t n = std::min(k, ranked.entries.size());
    for (std::size_t i = 0; i < n; ++i)
        if (gold.count(ranked.entries[i].first)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double mrr_at_k(const RankedList& ranked, const std::set<DocId>& gold,
                std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (gold.empty()) return -1.0;
    std::size_t n = std::min(k, ranked.entries.size());
    for (std::size_t i = 0; i < n; ++i)
        if (gold.count(ranked.entries[i].first))
            return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double hit_at_k(const RankedList& ranked, const std::set<DocId>& gold,
                std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (gold.empty()) return -1.0;
    std::size_t n = std::min(k, ranked.entries.size());
    for (std::size_t i = 0; i < n; ++i)
        if (gold.count(ranked.entries[i].first)) return 1.0;
    return 0.0;
}

AggregateResult aggregate(const std::vector<double>& per_query) {
    AggregateResult r;
    double sum = 0.0;
    for (double v : per_query) {
        if (v < 0.0) {
            ++r.excluded;
        } else {
            sum += v;
            ++r.defined;
        }
    }
    if (r.defined > 0) r.mean = sum / static_cast<double>(r.defined);
    return r;
}

BootstrapResult paired_bootstrap(const std::vector<double>& per_query_a,
                                 const std::vector<double>& per_query_b,
                                 std::uint32_t resamples,
                                 std::uint64_t seed) {
    if (per_query_a.size() != per_query_b.size())
        throw std::invalid_argument("paired bootstrap: length mismatch");
    std::size_t n = per_query_a.size();
    if (n < 2)
        throw std::invalid_argument("paired bootstrap: need >= 2 queries");
    if (resamples == 0)
        throw std::invalid_argument("paired bootstrap: need >= 1 resample");

    std::mt19937_64 rng(seed);
    std::vector<double> deltas;
    deltas.reserve(resamples);
    std::size_t ge = 0, le = 0;
    for (std::uint32_t r = 0; r < resamples; ++r) {
        double sum_a = 0.0, sum_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // portable index draw: uniform_int_distribution is
            // implementation-defined and would break cross-platform runs
            std::size_t j = static_cast<std::size_t>(uniform_u64(rng, n));
            sum_a += per_query_a[j];
            sum_b += per_query_b[j];
        }
        double delta = (sum_a - sum_b) / static_cast<double>(n);
        deltas.push_back(delta);
        if (delta >= 0.0) ++ge;
        if (delta <= 0.0) ++le;
    }
    std::sort(deltas.begin(), deltas.end());

    auto percentile = [&](double p) {
        double idx = p * static_cast<double>(deltas.size() - 1);
        std::size_t lo = static_cast<std::size_t>(idx);
        std::size_t hi = std::min(lo + 1, deltas.size() - 1);
        double frac = idx - static_cast<double>(lo);
        return deltas[lo] * (1.0 - frac) + deltas[hi] * frac;
    };

    BootstrapResult out;
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += per_query_a[i];
        mean_b += per_query_b[i];
    }
    out.delta_mean = (mean_a - mean_b) / static_cast<double>(n);
    out.ci_low = percentile(0.025);
    out.ci_high = percentile(0.975);
    double tail = static_cast<double>(std::min(ge, le)) /
                  static_cast<double>(resamples);
    out.p_value = 2.0 * tail;  // uncapped by convention
    out.p_value_capped = std::min(out.p_value, 1.0);
    out.resamples = resamples;
    return out;
}

}  // namespace hybrid
