#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid/types.hpp"

namespace hybrid {

/// Unit-norm vectors, one per doc, all of one dimension.
class EmbeddingMatrix {
public:
    std::uint32_t dim = 0;
    std::vector<DocId> doc_ids;
    std::vector<float> data;  // row-major, doc_ids.size() x dim

    std::size_t count() const { return doc_ids.size(); }
    const float* row(std::size_t i) const { return data.data() + i * dim; }
    void add(DocId id, const std::vector<float>& v);
};

/// Deterministic stand-in for a neural encoder: signed feature hashing of
/// unigram counts, L2-normalized. Token prefix "syn_" is stripped before
/// hashing, so a synonym-substituted paraphrase embeds like its source term
/// while staying lexically disjoint from it.
/// Empty token list maps to the e0 basis vector.
std::vector<float> hash_embed(std::string_view text, std::uint32_t dim,
                              std::uint64_t seed);

/// Exact brute-force top-k by inner product; ties by ascending doc id.
/// Throws on dimension mismatch.
RankedList dense_topk(const EmbeddingMatrix& matrix,
                      const std::vector<float>& query_vec, std::size_t k);

/// Binary container: magic "HEMB", version, dim, count, then per row a
/// uint64 doc id + dim float32 values, little-endian. Rows that have
/// drifted off unit norm are re-normalized on load (warning on stderr when
/// drift > 1e-3); malformed input raises an error naming the byte offset.
void save_embeddings(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix load_embeddings(const std::string& path);

/// JSONL alternative: one {"doc_id": ..., "vector": [...]} per line.
EmbeddingMatrix load_embeddings_jsonl(const std::string& path);

}  // namespace hybrid
