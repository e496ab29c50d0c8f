#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hybrid/tokenizer.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5)), recorded in the index header.
inline constexpr const char* kIdfConvention = "lucene_ln1p";

double bm25_score(double tf, double idf, double doc_len, double avgdl,
                  const Bm25Params& p);

enum class IndexMode : std::uint8_t { Bm25, Bridge };

/// Statistics shared across partition indexes so partition-local scoring is
/// bit-identical to scoring against one flat index: per-term idf, the corpus
/// avgdl, and the per-term accumulation-order key (flat-index MaxScore).
struct SharedStats {
    std::unordered_map<std::string, double> idf;
    std::unordered_map<std::string, double> order_key;
    double avgdl = 0.0;
};

struct SearchStats {
    std::uint64_t postings_touched = 0;
};

/// Flattened inverted index. term_offsets delimits each term's contiguous
/// (row, weight) postings; rows are dense per-index positions resolved to
/// caller doc ids through doc_ids[]. Immutable after build.
class CsrIndex {
public:
    IndexMode mode = IndexMode::Bm25;
    TokenizerMode tok_mode = TokenizerMode::Stopword;
    Bm25Params build_params;

    std::vector<std::string> terms;          // alphabetical; tid = position
    std::unordered_map<std::string, std::uint32_t> vocab;
    std::vector<std::uint64_t> term_offsets; // |V|+1, sentinel at end
    std::vector<std::uint32_t> posting_rows; // strictly increasing per term
    std::vector<double> posting_weights;     // raw tf (Bm25) / learned (Bridge)
    std::vector<double> term_idfs;
    std::vector<double> term_maxscores;      // MS_t under build_params
    std::vector<double> term_order_keys;     // accumulation order key
    std::vector<std::uint32_t> doc_lens;
    std::vector<DocId> doc_ids;              // insertion order
    double avgdl = 0.0;

    std::uint32_t num_docs() const {
        return static_cast<std::uint32_t>(doc_ids.size());
    }
    std::uint64_t num_postings() const { return posting_rows.size(); }

    /// Single-posting BM25 contribution; throws on out-of-range posting_index.
    double bm25_term_score(std::uint32_t term_id, std::uint64_t posting_index,
                           const Bm25Params& p) const;

    /// Exhaustive top-k over summed per-term BM25 scores.
    RankedList bm25_topk(const std::vector<std::string>& query_terms,
                         std::size_t k, const Bm25Params& p,
                         SearchStats* stats = nullptr) const;

    /// Lossless MaxScore-pruned top-k; identical output to bm25_topk.
    RankedList bm25_topk_maxscore(const std::vector<std::string>& query_terms,
                                  std::size_t k, const Bm25Params& p,
                                  SearchStats* stats = nullptr) const;

    /// MS_t recomputed for arbitrary params (build_params values are cached).
    std::vector<double> compute_term_maxscores(const Bm25Params& p) const;

    /// Sum of MS_t over the query terms present in this index; an upper bound
    /// on any document's score under build_params.
    double query_upper_bound(const std::vector<std::string>& query_terms) const;
};

/// Chunked streaming build. Transient per-chunk state is released between
/// chunks; the result is byte-identical for any chunk_size >= 1.
/// Throws on duplicate doc ids (the message names the id).
CsrIndex build_index(const std::vector<std::pair<DocId, std::string>>& docs,
                     TokenizerMode mode, std::size_t chunk_size = 50000,
                     const Bm25Params& params = {},
                     const SharedStats* shared = nullptr);

/// SharedStats of a flat build over the full corpus (for partition builds).
SharedStats collect_shared_stats(const CsrIndex& flat);

}  // namespace hybrid
