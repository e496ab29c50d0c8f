#include "hybrid/csr_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace hybrid {

double bm25_score(double tf, double idf, double doc_len, double avgdl,
                  const Bm25Params& p) {
    double norm = avgdl > 0.0 ? doc_len / avgdl : 1.0;
    double denom = tf + p.k1 * (1.0 - p.b + p.b * norm);
    return idf * tf * (p.k1 + 1.0) / denom;
}

namespace {

double idf_from_df(std::uint32_t df, std::uint32_t n_docs) {
    return std::log(1.0 + (static_cast<double>(n_docs) - df + 0.5) /
                              (df + 0.5));
}

// Unique query terms with multiplicities, in canonical accumulation order:
// descending order key, ties by ascending term id. Every scoring path adds
// per-document contributions in exactly this order.
struct QueryPlan {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> terms;  // (tid, mult)
};

QueryPlan make_plan(const CsrIndex& idx,
                    const std::vector<std::string>& query_terms) {
    std::unordered_map<std::uint32_t, std::uint32_t> mult;
    for (const auto& t : query_terms) {
        auto it = idx.vocab.find(t);
        if (it != idx.vocab.end()) ++mult[it->second];
    }
    QueryPlan plan;
    plan.terms.assign(mult.begin(), mult.end());
    std::sort(plan.terms.begin(), plan.terms.end(),
              [&](const auto& a, const auto& b) {
                  double ka = idx.term_order_keys[a.first];
                  double kb = idx.term_order_keys[b.first];
                  if (ka != kb) return ka > kb;
                  return a.first < b.first;
              });
    return plan;
}

RankedList collect_topk(const CsrIndex& idx, const std::vector<double>& acc,
                        const std::vector<std::uint32_t>& rows,
                        std::size_t k) {
    RankedList out;
    out.entries.reserve(rows.size());
    for (std::uint32_t row : rows)
        if (acc[row] > 0.0) out.entries.emplace_back(idx.doc_ids[row], acc[row]);
    out.sort_and_truncate(k);
    return out;
}

}  // namespace

double CsrIndex::bm25_term_score(std::uint32_t term_id,
                                 std::uint64_t posting_index,
                                 const Bm25Params& p) const {
    if (term_id >= terms.size())
        throw std::out_of_range("term_id out of range");
    std::uint64_t begin = term_offsets[term_id];
    std::uint64_t end = term_offsets[term_id + 1];
    if (posting_index >= end - begin)
        throw std::out_of_range("posting_index out of term range");
    std::uint64_t i = begin + posting_index;
    return bm25_score(posting_weights[i], term_idfs[term_id],
                      doc_lens[posting_rows[i]], avgdl, p);
}

RankedList CsrIndex::bm25_topk(const std::vector<std::string>& query_terms,
                               std::size_t k, const Bm25Params& p,
                               SearchStats* stats) const {
    if (mode != IndexMode::Bm25)
        throw std::runtime_error("BM25 scoring requires a BM25-mode index");
    QueryPlan plan = make_plan(*this, query_terms);
    std::vector<double> acc(num_docs(), 0.0);
    std::vector<std::uint8_t> seen(num_docs(), 0);
    std::vector<std::uint32_t> rows;
    std::uint64_t touched = 0;
    for (const auto& [tid, mult] : plan.terms) {
        double idf = term_idfs[tid];
        std::uint64_t begin = term_offsets[tid], end = term_offsets[tid + 1];
        for (std::uint64_t i = begin; i < end; ++i) {
            std::uint32_t row = posting_rows[i];
            double s = bm25_score(posting_weights[i], idf, doc_lens[row],
                                  avgdl, p);
            for (std::uint32_t m = 0; m < mult; ++m) acc[row] += s;
            if (!seen[row]) {
                seen[row] = 1;
                rows.push_back(row);
            }
        }
        touched += end - begin;
    }
    if (stats) stats->postings_touched += touched;
    return collect_topk(*this, acc, rows, k);
}

RankedList CsrIndex::bm25_topk_maxscore(
    const std::vector<std::string>& query_terms, std::size_t k,
    const Bm25Params& p, SearchStats* stats) const {
    if (mode != IndexMode::Bm25)
        throw std::runtime_error("BM25 scoring requires a BM25-mode index");
    QueryPlan plan = make_plan(*this, query_terms);
    const std::size_t m = plan.terms.size();

    bool cached = p.k1 == build_params.k1 && p.b == build_params.b;
    std::vector<double> ms;
    if (!cached) ms = compute_term_maxscores(p);
    const std::vector<double>& msref = cached ? term_maxscores : ms;

    // suffix[i] = max total contribution of plan terms i..m-1
    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;)
        suffix[i] = suffix[i + 1] +
                    plan.terms[i].second * msref[plan.terms[i].first];

    std::vector<double> acc(num_docs(), 0.0);
    std::vector<std::uint8_t> in_cand(num_docs(), 0);
    std::vector<std::uint32_t> cand;
    std::uint64_t touched = 0;
    double theta = -1.0;       // kth-best partial score; <0 means "not yet k"
    double theta_safe = -1.0;  // theta with a relative slack so pruning stays
                               // lossless under last-ulp rounding
    std::vector<double> scratch;

    for (std::size_t i = 0; i < m; ++i) {
        auto [tid, mult] = plan.terms[i];
        double idf = term_idfs[tid];
        std::uint64_t begin = term_offsets[tid], end = term_offsets[tid + 1];
        std::uint64_t len = end - begin;
        bool admit_new = theta < 0.0 || suffix[i] >= theta_safe;
        if (admit_new) {
            for (std::uint64_t j = begin; j < end; ++j) {
                std::uint32_t row = posting_rows[j];
                double s = bm25_score(posting_weights[j], idf, doc_lens[row],
                                      avgdl, p);
                for (std::uint32_t q = 0; q < mult; ++q) acc[row] += s;
                if (!in_cand[row]) {
                    in_cand[row] = 1;
                    cand.push_back(row);
                }
            }
            touched += len;
        } else {
            // Only surviving candidates can still reach the top-k; probe
            // this term's postings per candidate instead of scanning.
            std::uint64_t probe_cost =
                static_cast<std::uint64_t>(std::ceil(std::log2(
                    static_cast<double>(len) + 1.0))) + 1;
            if (cand.size() * probe_cost < len) {
                for (std::uint32_t row : cand) {
                    auto first = posting_rows.begin() +
                                 static_cast<std::ptrdiff_t>(begin);
                    auto last = posting_rows.begin() +
                                static_cast<std::ptrdiff_t>(end);
                    auto it = std::lower_bound(first, last, row);
                    touched += probe_cost;
                    if (it == last || *it != row) continue;
                    std::uint64_t j = begin +
                        static_cast<std::uint64_t>(it - first);
                    double s = bm25_score(posting_weights[j], idf,
                                          doc_lens[row], avgdl, p);
                    for (std::uint32_t q = 0; q < mult; ++q) acc[row] += s;
                }
            } else {
                for (std::uint64_t j = begin; j < end; ++j) {
                    std::uint32_t row = posting_rows[j];
                    if (!in_cand[row]) continue;
                    double s = bm25_score(posting_weights[j], idf,
                                          doc_lens[row], avgdl, p);
                    for (std::uint32_t q = 0; q < mult; ++q) acc[row] += s;
                }
                touched += len;
            }
        }
        // Refresh the kth-best partial score and drop hopeless candidates.
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
                if (acc[row] + rest >= theta_safe) {
                    cand[w++] = row;
                } else {
                    in_cand[row] = 0;
                }
            }
            cand.resize(w);
        }
    }
    if (stats) stats->postings_touched += touched;
    return collect_topk(*this, acc, cand, k);
}

std::vector<double> CsrIndex::compute_term_maxscores(
    const Bm25Params& p) const {
    std::vector<double> ms(terms.size(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        for (std::uint64_t i = term_offsets[t]; i < term_offsets[t + 1]; ++i) {
            double s = bm25_score(posting_weights[i], term_idfs[t],
                                  doc_lens[posting_rows[i]], avgdl, p);
            if (s > ms[t]) ms[t] = s;
        }
    }
    return ms;
}

double CsrIndex::query_upper_bound(
    const std::vector<std::string>& query_terms) const {
    double ub = 0.0;
    for (const auto& t : query_terms) {
        auto it = vocab.find(t);
        if (it != vocab.end()) ub += term_maxscores[it->second];
    }
    return ub;
}

CsrIndex build_index(const std::vector<std::pair<DocId, std::string>>& docs,
                     TokenizerMode mode, std::size_t chunk_size,
                     const Bm25Params& params, const SharedStats* shared) {
    if (chunk_size == 0) throw std::invalid_argument("chunk_size must be >= 1");
    CsrIndex idx;
    idx.mode = IndexMode::Bm25;
    idx.tok_mode = mode;
    idx.build_params = params;

    using Postings = std::vector<std::pair<std::uint32_t, double>>;
    std::unordered_map<std::string, Postings> merged;
    std::unordered_map<std::string, Postings> chunk;
    std::unordered_set<DocId> seen_ids;
    std::size_t in_chunk = 0;

    auto flush_chunk = [&] {
        for (auto& [term, vec] : chunk) {
            Postings& dst = merged[term];
            dst.insert(dst.end(), vec.begin(), vec.end());
        }
        chunk.clear();
        in_chunk = 0;
    };

    for (const auto& [doc_id, text] : docs) {
        if (!seen_ids.insert(doc_id).second)
            throw std::runtime_error("duplicate doc id: " +
                                     std::to_string(doc_id));
        std::uint32_t row = static_cast<std::uint32_t>(idx.doc_ids.size());
        auto toks = tokenize(text, mode);
        std::unordered_map<std::string, std::uint32_t> counts;
        for (auto& t : toks) ++counts[t];
        for (auto& [term, tf] : counts)
            chunk[term].emplace_back(row, static_cast<double>(tf));
        idx.doc_ids.push_back(doc_id);
        idx.doc_lens.push_back(static_cast<std::uint32_t>(toks.size()));
        if (++in_chunk >= chunk_size) flush_chunk();
    }
    flush_chunk();

    idx.terms.reserve(merged.size());
    for (auto& [term, vec] : merged) idx.terms.push_back(term);
    std::sort(idx.terms.begin(), idx.terms.end());

    std::uint64_t total = 0;
    for (auto& t : idx.terms) total += merged[t].size();
    idx.term_offsets.reserve(idx.terms.size() + 1);
    idx.posting_rows.reserve(total);
    idx.posting_weights.reserve(total);
    idx.term_idfs.reserve(idx.terms.size());

    double len_sum = 0.0;
    for (auto l : idx.doc_lens) len_sum += l;
    idx.avgdl = idx.doc_lens.empty()
                    ? 0.0
                    : len_sum / static_cast<double>(idx.doc_lens.size());
    if (shared) idx.avgdl = shared->avgdl;

    std::uint64_t off = 0;
    for (std::size_t t = 0; t < idx.terms.size(); ++t) {
        const auto& term = idx.terms[t];
        idx.vocab.emplace(term, static_cast<std::uint32_t>(t));
        idx.term_offsets.push_back(off);
        Postings& vec = merged[term];
        for (auto& [row, w] : vec) {
            idx.posting_rows.push_back(row);
            idx.posting_weights.push_back(w);
        }
        off += vec.size();
        double idf;
        if (shared) {
            auto it = shared->idf.find(term);
            if (it == shared->idf.end())
                throw std::runtime_error("shared stats missing term: " + term);
            idf = it->second;
        } else {
            idf = idf_from_df(static_cast<std::uint32_t>(vec.size()),
                              static_cast<std::uint32_t>(idx.doc_ids.size()));
        }
        idx.term_idfs.push_back(idf);
    }
    idx.term_offsets.push_back(off);

    idx.term_maxscores = idx.compute_term_maxscores(params);
    if (shared) {
        idx.term_order_keys.reserve(idx.terms.size());
        for (const auto& term : idx.terms)
            idx.term_order_keys.push_back(shared->order_key.at(term));
    } else {
        idx.term_order_keys = idx.term_maxscores;
    }
    return idx;
}

SharedStats collect_shared_stats(const CsrIndex& flat) {
    SharedStats s;
    s.avgdl = flat.avgdl;
    for (std::size_t t = 0; t < flat.terms.size(); ++t) {
        s.idf.emplace(flat.terms[t], flat.term_idfs[t]);
        s.order_key.emplace(flat.terms[t], flat.term_order_keys[t]);
    }
    return s;
}

}  // namespace hybrid
