#pragma once

#include <cstdint>
#include <vector>

#include "hybrid/csr_index.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

/// Learned-sparse vector: strictly increasing term ids, positive values.
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    std::size_t nnz() const { return indices.size(); }
    void validate() const;  // throws on unsorted/duplicate/non-positive
};

/// Transposes per-doc weight vectors into the CSR posting layout. The
/// structure is identical to the BM25 index; only the payload semantics
/// change (learned weight instead of integer tf). Throws on duplicate ids.
CsrIndex bridge_ingest(
    const std::vector<std::pair<DocId, SparseVector>>& doc_vectors);

/// Inverse of bridge_ingest, exact round trip.
std::vector<std::pair<DocId, SparseVector>> bridge_export(
    const CsrIndex& idx);

/// Posting-traversal scoring: S[doc] += w_q * W_t, accumulated per document
/// in ascending query term-id order on both this path and the brute-force
/// oracle, which makes exact floating-point equality a contract.
RankedList bridge_topk(const CsrIndex& idx, const SparseVector& query_vec,
                       std::size_t k, SearchStats* stats = nullptr);

/// MaxScore-pruned variant using per-term max weights; identical output.
RankedList bridge_topk_maxscore(const CsrIndex& idx,
                                const SparseVector& query_vec, std::size_t k,
                                SearchStats* stats = nullptr);

}  // namespace hybrid
