#include "hybrid/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace hybrid {

void SparseVector::validate() const {
    if (indices.size() != values.size())
        throw std::invalid_argument("indices/values length mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument(
                "sparse vector indices must be strictly increasing");
        if (!(values[i] > 0.0))
            throw std::invalid_argument("sparse vector values must be > 0");
    }
}

CsrIndex bridge_ingest(
    const std::vector<std::pair<DocId, SparseVector>>& doc_vectors) {
    CsrIndex idx;
    idx.mode = IndexMode::Bridge;

    std::uint32_t dim = 0;
    std::unordered_set<DocId> seen;
    for (const auto& [id, vec] : doc_vectors) {
        if (!seen.insert(id).second)
            throw std::runtime_error("duplicate doc id: " +
                                     std::to_string(id));
        vec.validate();
        if (!vec.indices.empty())
            dim = std::max(dim, vec.indices.back() + 1);
    }

    // CSC transpose: per-term postings in doc order (rows ascend).
    std::vector<std::vector<std::pair<std::uint32_t, double>>> postings(dim);
    double len_sum = 0.0;
    for (const auto& [id, vec] : doc_vectors) {
        std::uint32_t row = static_cast<std::uint32_t>(idx.doc_ids.size());
        for (std::size_t i = 0; i < vec.nnz(); ++i)
            postings[vec.indices[i]].emplace_back(row, vec.values[i]);
        idx.doc_ids.push_back(id);
        idx.doc_lens.push_back(static_cast<std::uint32_t>(vec.nnz()));
        len_sum += static_cast<double>(vec.nnz());
    }
    idx.avgdl = idx.doc_ids.empty()
                    ? 0.0
                    : len_sum / static_cast<double>(idx.doc_ids.size());

    idx.terms.reserve(dim);
    idx.term_offsets.reserve(dim + 1);
    std::uint64_t off = 0;
    for (std::uint32_t t = 0; t < dim; ++t) {
        idx.terms.push_back(std::to_string(t));
        idx.vocab.emplace(idx.terms.back(), t);
        idx.term_offsets.push_back(off);
        double maxw = 0.0;
        for (const auto& [row, w] : postings[t]) {
            idx.posting_rows.push_back(row);
            idx.posting_weights.push_back(w);
            maxw = std::max(maxw, w);
        }
        off += postings[t].size();
        idx.term_idfs.push_back(0.0);
        idx.term_maxscores.push_back(maxw);
    }
    idx.term_offsets.push_back(off);
    idx.term_order_keys = idx.term_maxscores;
    return idx;
}

std::vector<std::pair<DocId, SparseVector>> bridge_export(const CsrIndex& idx) {
    if (idx.mode != IndexMode::Bridge)
        throw std::runtime_error("bridge export requires a bridge-mode index");
    std::vector<std::pair<DocId, SparseVector>> out(idx.doc_ids.size());
    for (std::size_t r = 0; r < idx.doc_ids.size(); ++r)
        out[r].first = idx.doc_ids[r];
    for (std::uint32_t t = 0; t < idx.terms.size(); ++t) {
        for (std::uint64_t i = idx.term_offsets[t]; i < idx.term_offsets[t + 1];
             ++i) {
            SparseVector& v = out[idx.posting_rows[i]].second;
            v.indices.push_back(t);
            v.values.push_back(idx.posting_weights[i]);
        }
    }
    return out;
}

namespace {

void check_bridge(const CsrIndex& idx) {
    if (idx.mode != IndexMode::Bridge)
        throw std::runtime_error(
            "bridge scoring requires a bridge-mode index");
}

RankedList collect(const CsrIndex& idx, const std::vector<double>& acc,
                   const std::vector<std::uint32_t>& rows, std::size_t k) {
    RankedList out;
    out.entries.reserve(rows.size());
    for (std::uint32_t row : rows)
        if (acc[row] > 0.0) out.entries.emplace_back(idx.doc_ids[row], acc[row]);
    out.sort_and_truncate(k);
    return out;
}

}  // namespace

RankedList bridge_topk(const CsrIndex& idx, const SparseVector& query_vec,
                       std::size_t k, SearchStats* stats) {
    check_bridge(idx);
    query_vec.validate();
    std::vector<double> acc(idx.num_docs(), 0.0);
    std::vector<std::uint8_t> seen(idx.num_docs(), 0);
    std::vector<std::uint32_t> rows;
    std::uint64_t touched = 0;
    for (std::size_t i = 0; i < query_vec.nnz(); ++i) {
        std::uint32_t t = query_vec.indices[i];
        if (t >= idx.terms.size()) continue;
        double wq = query_vec.values[i];
        for (std::uint64_t j = idx.term_offsets[t]; j < idx.term_offsets[t + 1];
             ++j) {
            std::uint32_t row = idx.posting_rows[j];
            acc[row] += wq * idx.posting_weights[j];
            if (!seen[row]) {
                seen[row] = 1;
                rows.push_back(row);
            }
        }
        touched += idx.term_offsets[t + 1] - idx.term_offsets[t];
    }
    if (stats) stats->postings_touched += touched;
    return collect(idx, acc, rows, k);
}

RankedList bridge_topk_maxscore(const CsrIndex& idx,
                                const SparseVector& query_vec, std::size_t k,
                                SearchStats* stats) {
    check_bridge(idx);
    query_vec.validate();

    // Same ascending term-id accumulation order as bridge_topk; pruning only
    // narrows which documents keep accumulating.
    std::vector<std::pair<std::uint32_t, double>> qterms;
    for (std::size_t i = 0; i < query_vec.nnz(); ++i)
        if (query_vec.indices[i] < idx.terms.size())
            qterms.emplace_back(query_vec.indices[i], query_vec.values[i]);
    const std::size_t m = qterms.size();
    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;)
        suffix[i] =
            suffix[i + 1] + qterms[i].second * idx.term_maxscores[qterms[i].first];

    std::vector<double> acc(idx.num_docs(), 0.0);
    std::vector<std::uint8_t> in_cand(idx.num_docs(), 0);
    std::vector<std::uint32_t> cand;
    std::vector<double> scratch;
    std::uint64_t touched = 0;
    double theta = -1.0, theta_safe = -1.0;

    for (std::size_t i = 0; i < m; ++i) {
        auto [t, wq] = qterms[i];
        std::uint64_t begin = idx.term_offsets[t], end = idx.term_offsets[t + 1];
        bool admit_new = theta < 0.0 || suffix[i] >= theta_safe;
        if (admit_new) {
            for (std::uint64_t j = begin; j < end; ++j) {
                std::uint32_t row = idx.posting_rows[j];
                acc[row] += wq * idx.posting_weights[j];
                if (!in_cand[row]) {
                    in_cand[row] = 1;
                    cand.push_back(row);
                }
            }
            touched += end - begin;
        } else {
            for (std::uint64_t j = begin; j < end; ++j) {
                std::uint32_t row = idx.posting_rows[j];
                if (in_cand[row]) acc[row] += wq * idx.posting_weights[j];
            }
            touched += end - begin;
        }
        if (cand.size() >= k && k > 0) {
            scratch.clear();
            for (std::uint32_t row : cand) scratch.push_back(acc[row]);
            auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
            std::nth_element(scratch.begin(), nth, scratch.end(),
                             std::greater<double>());
            theta = *nth;
            theta_safe = theta - theta * 1e-12;
            double rest = suffix[i + 1];
            std::size_t w = 0;
            for (std::uint32_t row : cand) {
                if (acc[row] + rest >= theta_safe) cand[w++] = row;
                else in_cand[row] = 0;
            }
            cand.resize(w);
        }
    }
    if (stats) stats->postings_touched += touched;
    return collect(idx, acc, cand, k);
}

}  // namespace hybrid
