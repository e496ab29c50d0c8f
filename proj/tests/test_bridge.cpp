#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "hybrid/bridge.hpp"
#include "hybrid/rng.hpp"

using namespace hybrid;

namespace {

std::vector<std::pair<DocId, SparseVector>> random_vectors(
    std::mt19937_64& rng, std::size_t ndocs, std::uint32_t vocab,
    double density) {
    std::vector<std::pair<DocId, SparseVector>> out;
    for (std::size_t d = 0; d < ndocs; ++d) {
        SparseVector v;
        for (std::uint32_t t = 0; t < vocab; ++t)
            if (next_double(rng) < density) {
                v.indices.push_back(t);
                v.values.push_back(0.05 + next_double(rng) * 3.0);
            }
        out.emplace_back(d, std::move(v));
    }
    return out;
}

// term-at-a-time oracle accumulating in ascending query term-id order,
// mirroring the production accumulation contract exactly
RankedList brute_force(const std::vector<std::pair<DocId, SparseVector>>& docs,
                       const SparseVector& q, std::size_t k) {
    std::unordered_map<DocId, double> acc;
    for (std::size_t qi = 0; qi < q.indices.size(); ++qi) {
        for (const auto& [id, v] : docs) {
            auto it = std::lower_bound(v.indices.begin(), v.indices.end(),
                                       q.indices[qi]);
            if (it != v.indices.end() && *it == q.indices[qi])
                acc[id] += q.values[qi] *
                           v.values[static_cast<std::size_t>(
                               it - v.indices.begin())];
        }
    }
    RankedList r;
    for (const auto& [id, s] : acc)
        if (s > 0.0) r.entries.emplace_back(id, s);
    r.sort_and_truncate(k);
    return r;
}

}  // namespace

TEST_SUITE("bridge") {

TEST_CASE("single posting scores w_q * W_t") {
    std::vector<std::pair<DocId, SparseVector>> docs;
    docs.emplace_back(7, SparseVector{{3}, {1.5}});
    auto idx = bridge_ingest(docs);
    CHECK(idx.mode == IndexMode::Bridge);
    auto r = bridge_topk(idx, SparseVector{{3}, {2.0}}, 5);
    REQUIRE(r.size() == 1);
    CHECK(r.entries[0].first == 7);
    CHECK(r.entries[0].second == 2.0 * 1.5);
}

TEST_CASE("ingest then export is an exact round trip") {
    std::mt19937_64 rng(11);
    auto docs = random_vectors(rng, 40, 120, 0.08);
    auto back = bridge_export(bridge_ingest(docs));
    REQUIRE(back.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(back[i].first == docs[i].first);
        CHECK(back[i].second.indices == docs[i].second.indices);
        CHECK(back[i].second.values == docs[i].second.values);
    }
}

TEST_CASE("transpose conserves nonzeros on a 100x500 matrix") {
    std::mt19937_64 rng(5);
    auto docs = random_vectors(rng, 100, 500, 0.02);
    std::size_t nnz = 0;
    for (const auto& [_, v] : docs) nnz += v.nnz();
    auto idx = bridge_ingest(docs);
    CHECK(idx.num_postings() == nnz);
    CHECK(idx.num_docs() == 100);
}

TEST_CASE("posting traversal equals brute force to the bit") {
    std::mt19937_64 rng(21);
    for (std::size_t ndocs : {std::size_t{10}, std::size_t{1000}}) {
        auto docs = random_vectors(rng, ndocs, 200, 0.05);
        auto idx = bridge_ingest(docs);
        for (int trial = 0; trial < 50; ++trial) {
            SparseVector q;
            for (std::uint32_t t = 0; t < 200; ++t)
                if (next_double(rng) < 0.03) {
                    q.indices.push_back(t);
                    q.values.push_back(0.1 + next_double(rng));
                }
            auto got = bridge_topk(idx, q, 10);
            auto want = brute_force(docs, q, 10);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.entries.size(); ++i) {
                CHECK(got.entries[i].first == want.entries[i].first);
                CHECK(got.entries[i].second == want.entries[i].second);  // ==
            }
            auto pruned = bridge_topk_maxscore(idx, q, 10);
            CHECK(pruned.entries == got.entries);
        }
    }
}

TEST_CASE("empty query returns an empty list") {
    std::mt19937_64 rng(2);
    auto idx = bridge_ingest(random_vectors(rng, 10, 50, 0.1));
    CHECK(bridge_topk(idx, SparseVector{}, 5).size() == 0);
}

TEST_CASE("one-hot query ranks docs by that term's weight") {
    std::vector<std::pair<DocId, SparseVector>> docs;
    docs.emplace_back(1, SparseVector{{4}, {0.2}});
    docs.emplace_back(2, SparseVector{{4}, {0.9}});
    docs.emplace_back(3, SparseVector{{5}, {5.0}});
    auto idx = bridge_ingest(docs);
    auto r = bridge_topk(idx, SparseVector{{4}, {1.0}}, 10);
    REQUIRE(r.size() == 2);
    CHECK(r.entries[0].first == 2);
    CHECK(r.entries[1].first == 1);
}

TEST_CASE("duplicate doc ids are rejected") {
    std::vector<std::pair<DocId, SparseVector>> docs;
    docs.emplace_back(3, SparseVector{{1}, {1.0}});
    docs.emplace_back(3, SparseVector{{2}, {1.0}});
    CHECK_THROWS(bridge_ingest(docs));
}

TEST_CASE("validate rejects malformed sparse vectors") {
    CHECK_THROWS(SparseVector({3, 1}, {1.0, 1.0}).validate());   // unsorted
    CHECK_THROWS(SparseVector({1, 1}, {1.0, 1.0}).validate());   // duplicate
    CHECK_THROWS(SparseVector({1, 2}, {1.0, 0.0}).validate());   // non-positive
    CHECK_THROWS(SparseVector({1, 2}, {1.0}).validate());        // ragged
    CHECK_NOTHROW(SparseVector({1, 2}, {0.5, 1.0}).validate());
}

TEST_CASE("bm25 scoring refuses a bridge-mode index") {
    std::vector<std::pair<DocId, SparseVector>> docs;
    docs.emplace_back(1, SparseVector{{0}, {1.0}});
    auto idx = bridge_ingest(docs);
    CHECK_THROWS_WITH_AS(idx.bm25_topk({"t0"}, 5, Bm25Params{}),
                         "BM25 scoring requires a BM25-mode index",
                         std::runtime_error);
}

}  // TEST_SUITE
