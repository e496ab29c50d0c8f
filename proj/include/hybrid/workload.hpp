#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "hybrid/types.hpp"

namespace hybrid {

struct WorkloadSpec {
    std::uint64_t n_records = 4052;
    std::uint64_t seed = 42;
    double recency_mass = 0.8;       // fraction of gold docs drawn from ...
    double recency_window = 0.2;     // ... the newest fraction of the span
    std::uint32_t vocab_size = 5000;
    double zipf_s = 1.1;
    std::uint32_t min_doc_tokens = 5;
    std::uint32_t max_doc_tokens = 30;
    std::uint32_t n_sessions = 50;
    std::uint32_t n_agents = 4;
    std::int64_t time_span_ms = 28LL * 24 * 3600 * 1000;  // 28 days
    std::int64_t t0_ms = 1700000000000;                   // span start
};

struct QuerySpec {
    std::uint64_t n_queries = 1000;
    std::uint32_t min_terms = 3;
    std::uint32_t max_terms = 6;
    double paraphrase_noise = 0.0;  // probability a query is paraphrased
    std::uint64_t seed = 42;
};

struct GeneratedQuery {
    std::vector<std::string> terms;
    std::set<DocId> gold;
    std::int64_t ts_ms = 0;
    std::string qtype;  // "lexical" or "paraphrase"
};

/// Deterministic synthetic agent-memory corpus: Zipf token bags with
/// role/session/agent/tool metadata, timestamps spread over the span.
std::vector<MemoryRecord> gen_corpus(const WorkloadSpec& spec);

/// Recency-biased queries. The gold doc's timestamp is drawn from the
/// two-segment mass/window split; query terms are sampled from the gold
/// doc's tokens (lexically reachable). A paraphrased query replaces every
/// term with its "syn_" substitute, defeating lexical match while staying
/// resolvable through the synonym-aware test embedder.
std::vector<GeneratedQuery> gen_queries(
    const std::vector<MemoryRecord>& corpus, const QuerySpec& qspec,
    const WorkloadSpec& wspec);

}  // namespace hybrid
