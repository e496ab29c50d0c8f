#include "hybrid/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hybrid/rng.hpp"
#include "hybrid/tokenizer.hpp"

namespace hybrid {

namespace {

// Inverse-CDF Zipf over ranks 1..n with exponent s.
class ZipfSampler {
public:
    ZipfSampler(std::uint32_t n, double s) : cdf_(n) {
        double sum = 0.0;
        for (std::uint32_t k = 1; k <= n; ++k) {
            sum += 1.0 / std::pow(static_cast<double>(k), s);
            cdf_[k - 1] = sum;
        }
        for (double& v : cdf_) v /= sum;
    }
    std::uint32_t sample(std::mt19937_64& rng) const {
        double u = next_double(rng);
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::uint32_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

Role sample_role(std::mt19937_64& rng) {
    double u = next_double(rng);
    if (u < 0.30) return Role::User;
    if (u < 0.60) return Role::Assistant;
    if (u < 0.70) return Role::ToolCall;
    if (u < 0.90) return Role::ToolOutput;
    if (u < 0.95) return Role::System;
    return Role::Planning;
}

}  // namespace

std::vector<MemoryRecord> gen_corpus(const WorkloadSpec& spec) {
    if (spec.n_records == 0)
        throw std::invalid_argument("n_records must be >= 1");
    std::mt19937_64 rng(spec.seed);
    ZipfSampler zipf(spec.vocab_size, spec.zipf_s);
    static const char* kToolTypes[] = {"search", "code", "files"};

    std::vector<MemoryRecord> out;
    out.reserve(spec.n_records);
    for (std::uint64_t i = 0; i < spec.n_records; ++i) {
        MemoryRecord r;
        r.id = i;
        std::uint32_t len =
            spec.min_doc_tokens +
            static_cast<std::uint32_t>(uniform_u64(
                rng, spec.max_doc_tokens - spec.min_doc_tokens + 1));
        std::string text;
        for (std::uint32_t t = 0; t < len; ++t) {
            if (t) text += ' ';
            text += 'w';
            text += std::to_string(zipf.sample(rng));
        }
        r.text = std::move(text);
        r.role = sample_role(rng);
        r.session = "s" + std::to_string(uniform_u64(rng, spec.n_sessions));
        r.agent = "a" + std::to_string(uniform_u64(rng, spec.n_agents));
        if (r.role == Role::ToolCall || r.role == Role::ToolOutput)
            r.tool_type = kToolTypes[uniform_u64(rng, 3)];
        r.ts_ms = spec.t0_ms + static_cast<std::int64_t>(uniform_u64(
                                   rng, static_cast<std::uint64_t>(
                                            spec.time_span_ms)));
        r.weight = next_double(rng);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<GeneratedQuery> gen_queries(
    const std::vector<MemoryRecord>& corpus, const QuerySpec& qspec,
    const WorkloadSpec& wspec) {
    if (corpus.empty()) throw std::invalid_argument("empty corpus");
    std::mt19937_64 rng(qspec.seed ^ 0x9E3779B97F4A7C15ULL);

    std::int64_t window_start =
        wspec.t0_ms + static_cast<std::int64_t>(
                          static_cast<double>(wspec.time_span_ms) *
                          (1.0 - wspec.recency_window));
    std::vector<std::size_t> recent, older;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].ts_ms >= window_start) recent.push_back(i);
        else older.push_back(i);
    }
    if (recent.empty()) recent = older;
    if (older.empty()) older = recent;

    std::vector<GeneratedQuery> out;
    out.reserve(qspec.n_queries);
    for (std::uint64_t q = 0; q < qspec.n_queries; ++q) {
        bool pick_recent = next_double(rng) < wspec.recency_mass;
        const auto& pool = pick_recent ? recent : older;
        const MemoryRecord& gold = corpus[pool[uniform_u64(rng, pool.size())]];

        auto tokens = tokenize(gold.text, TokenizerMode::Minimal);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

        std::uint32_t want =
            qspec.min_terms +
            static_cast<std::uint32_t>(uniform_u64(
                rng, qspec.max_terms - qspec.min_terms + 1));
        GeneratedQuery gq;
        // sample without replacement
        for (std::uint32_t t = 0; t < want && !tokens.empty(); ++t) {
            std::size_t j = uniform_u64(rng, tokens.size());
            gq.terms.push_back(tokens[j]);
            tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(j));
        }
        bool paraphrase = next_double(rng) < qspec.paraphrase_noise;
        if (paraphrase)
            for (auto& term : gq.terms) term = "syn_" + term;
        gq.qtype = paraphrase ? "paraphrase" : "lexical";
        gq.gold.insert(gold.id);
        std::int64_t after = static_cast<std::int64_t>(uniform_u64(
            rng, static_cast<std::uint64_t>(wspec.time_span_ms / 10 + 1)));
        gq.ts_ms = gold.ts_ms + after;
        out.push_back(std::move(gq));
    }
    return out;
}

}  // namespace hybrid
