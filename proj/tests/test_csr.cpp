#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hybrid/csr_index.hpp"
#include "hybrid/rng.hpp"

using namespace hybrid;

namespace {

// Five-doc toy corpus: cat/dog/fish postings with tf patterns
//   cat:  (d0,2) (d2,1) (d3,1) (d4,3)
//   dog:  (d1,1) (d2,2) (d4,1)
//   fish: (d0,1) (d3,1)
// doc lens 10/8/12/7/9, padded with per-doc unique fillers that sort
// after "fish" so the first three term ids stay 0/1/2.
std::vector<std::pair<DocId, std::string>> toy_docs() {
    return {
        {0, "cat cat fish z00 z01 z02 z03 z04 z05 z06"},
        {1, "dog z10 z11 z12 z13 z14 z15 z16"},
        {2, "cat dog dog z20 z21 z22 z23 z24 z25 z26 z27 z28"},
        {3, "cat fish z30 z31 z32 z33 z34"},
        {4, "cat cat cat dog z40 z41 z42 z43 z44"},
    };
}

struct RandomInstance {
    std::vector<std::pair<DocId, std::string>> docs;
    std::vector<std::string> query;
};

RandomInstance random_instance(std::mt19937_64& rng) {
    RandomInstance inst;
    std::size_t n_docs = 5 + uniform_u64(rng, 60);
    std::size_t vocab = 8 + uniform_u64(rng, 25);
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::size_t len = 2 + uniform_u64(rng, 15);
        std::string text;
        for (std::size_t t = 0; t < len; ++t) {
            if (t) text += ' ';
            text += "t" + std::to_string(uniform_u64(rng, vocab));
        }
        inst.docs.emplace_back(d, text);
    }
    std::size_t q_terms = 1 + uniform_u64(rng, 4);
    for (std::size_t t = 0; t < q_terms; ++t)
        inst.query.push_back("t" + std::to_string(uniform_u64(rng, vocab)));
    return inst;
}

bool identical(const RankedList& a, const RankedList& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i].first != b.entries[i].first ||
            a.entries[i].second != b.entries[i].second)
            return false;
    return true;
}

}  // namespace

TEST_SUITE("csr") {

TEST_CASE("toy corpus reproduces the reference layout") {
    auto idx = build_index(toy_docs(), TokenizerMode::Minimal);
    REQUIRE(idx.terms.size() >= 3);
    CHECK(idx.terms[0] == "cat");
    CHECK(idx.terms[1] == "dog");
    CHECK(idx.terms[2] == "fish");
    CHECK(idx.term_offsets[0] == 0);
    CHECK(idx.term_offsets[1] == 4);
    CHECK(idx.term_offsets[2] == 7);
    CHECK(idx.term_offsets[3] == 9);

    std::vector<std::uint32_t> cat_rows(idx.posting_rows.begin(),
                                        idx.posting_rows.begin() + 4);
    std::vector<double> cat_tfs(idx.posting_weights.begin(),
                                idx.posting_weights.begin() + 4);
    CHECK(cat_rows == std::vector<std::uint32_t>{0, 2, 3, 4});
    CHECK(cat_tfs == std::vector<double>{2, 1, 1, 3});
    std::vector<std::uint32_t> dog_rows(idx.posting_rows.begin() + 4,
                                        idx.posting_rows.begin() + 7);
    CHECK(dog_rows == std::vector<std::uint32_t>{1, 2, 4});

    CHECK(idx.doc_lens == std::vector<std::uint32_t>{10, 8, 12, 7, 9});
    CHECK(idx.avgdl == doctest::Approx(9.2));
}

TEST_CASE("hand-checked scores on the toy values") {
    // idf values as given in the walkthrough, raw tf, k1=1.2, b=0.75
    Bm25Params p;
    CHECK(bm25_score(1.0, 1.2, 12.0, 9.2, p) ==
          doctest::Approx(1.0672).epsilon(1e-3));
    double both = bm25_score(1.0, 1.2, 12.0, 9.2, p) +
                  bm25_score(2.0, 0.8, 12.0, 9.2, p);
    CHECK(both == doctest::Approx(2.0805).epsilon(1e-3));
}

TEST_CASE("saturation asymptote and b=0 length independence") {
    Bm25Params p;
    CHECK(bm25_score(1e9, 2.0, 50.0, 10.0, p) ==
          doctest::Approx(2.0 * (p.k1 + 1.0)).epsilon(1e-6));
    CHECK(bm25_score(2.0, 1.0, 5.0, 10.0, p) <
          2.0 * bm25_score(1.0, 1.0, 5.0, 10.0, p));
    CHECK(bm25_score(2.0, 1.0, 5.0, 10.0, p) >
          bm25_score(1.0, 1.0, 5.0, 10.0, p));
    Bm25Params b0{1.2, 0.0};
    CHECK(bm25_score(3.0, 1.0, 5.0, 10.0, b0) ==
          bm25_score(3.0, 1.0, 500.0, 10.0, b0));
}

TEST_CASE("bm25_term_score range checking") {
    auto idx = build_index(toy_docs(), TokenizerMode::Minimal);
    Bm25Params p;
    CHECK_NOTHROW(idx.bm25_term_score(0, 3, p));
    CHECK_THROWS_AS(idx.bm25_term_score(0, 4, p), std::out_of_range);
}

TEST_CASE("duplicate doc id is a build error naming the id") {
    std::vector<std::pair<DocId, std::string>> docs = {{7, "a"}, {7, "b"}};
    CHECK_THROWS_WITH_AS(build_index(docs, TokenizerMode::Minimal),
                         doctest::Contains("7"), std::runtime_error);
}

TEST_CASE("empty corpus builds an empty index") {
    auto idx = build_index({}, TokenizerMode::Minimal);
    CHECK(idx.num_docs() == 0);
    CHECK(idx.num_postings() == 0);
    CHECK(idx.bm25_topk({"cat"}, 5, Bm25Params{}).empty());
}

TEST_CASE("chunk size does not affect the built index") {
    std::mt19937_64 rng(11);
    auto inst = random_instance(rng);
    auto a = build_index(inst.docs, TokenizerMode::Minimal, 1);
    auto b = build_index(inst.docs, TokenizerMode::Minimal, 1000000);
    CHECK(a.terms == b.terms);
    CHECK(a.term_offsets == b.term_offsets);
    CHECK(a.posting_rows == b.posting_rows);
    CHECK(a.posting_weights == b.posting_weights);
    CHECK(a.term_idfs == b.term_idfs);
    CHECK(a.term_maxscores == b.term_maxscores);
    CHECK(a.doc_lens == b.doc_lens);
    CHECK(a.doc_ids == b.doc_ids);
    CHECK(a.avgdl == b.avgdl);
}

TEST_CASE("topk basics: unknown terms, oversized k, zero-score floor") {
    auto idx = build_index(toy_docs(), TokenizerMode::Minimal);
    Bm25Params p;
    CHECK(idx.bm25_topk({"unicorn"}, 5, p).empty());
    auto all = idx.bm25_topk({"cat"}, 100, p);
    CHECK(all.size() == 4);  // only docs containing "cat" are emitted
    for (const auto& [_, score] : all.entries) CHECK(score > 0.0);
    auto q = idx.bm25_topk({"cat", "dog"}, 5, p);
    CHECK(q.size() == 5);
}

TEST_CASE("maxscore pruning is lossless over random instances") {
    std::mt19937_64 rng(1234);
    Bm25Params p;
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = random_instance(rng);
        auto idx = build_index(inst.docs, TokenizerMode::Minimal);
        std::size_t k = 1 + uniform_u64(rng, 10);
        SearchStats se, sm;
        auto exhaustive = idx.bm25_topk(inst.query, k, p, &se);
        auto pruned = idx.bm25_topk_maxscore(inst.query, k, p, &sm);
        CAPTURE(trial);
        CHECK(identical(exhaustive, pruned));
        CHECK(sm.postings_touched <= se.postings_touched);
    }
}

TEST_CASE("single-term query touches every posting") {
    auto idx = build_index(toy_docs(), TokenizerMode::Minimal);
    SearchStats se, sm;
    Bm25Params p;
    idx.bm25_topk({"cat"}, 2, p, &se);
    idx.bm25_topk_maxscore({"cat"}, 2, p, &sm);
    CHECK(sm.postings_touched == se.postings_touched);
}

TEST_CASE("a dominant rare term lets pruning skip postings") {
    // "rare" appears once with high idf; "common" is everywhere with tf 1.
    std::vector<std::pair<DocId, std::string>> docs;
    for (DocId d = 0; d < 200; ++d) {
        std::string text = "common";
        if (d == 0) text += " rare rare rare";
        docs.emplace_back(d, text);
    }
    auto idx = build_index(docs, TokenizerMode::Minimal);
    SearchStats se, sm;
    Bm25Params p;
    auto a = idx.bm25_topk({"rare", "common"}, 1, p, &se);
    auto b = idx.bm25_topk_maxscore({"rare", "common"}, 1, p, &sm);
    CHECK(identical(a, b));
    CHECK(sm.postings_touched < se.postings_touched);
}

TEST_CASE("pre-normalized tf flips a ranking that raw tf gets right") {
    // Pitfall regression: docA (len 2, tf 1) vs docB (len 4, tf 3).
    Bm25Params p;
    double avgdl = 3.0, idf = 1.0;
    double raw_a = bm25_score(1.0, idf, 2.0, avgdl, p);
    double raw_b = bm25_score(3.0, idf, 4.0, avgdl, p);
    CHECK(raw_b > raw_a);
    auto prenorm = [&](double tf, double len) {
        double ntf = tf / len;  // the tf/|d| mistake
        double norm = p.k1 * (1.0 - p.b + p.b * len / avgdl);
        return idf * ntf * (p.k1 + 1.0) / (ntf + norm);
    };
    CHECK(prenorm(1.0, 2.0) > prenorm(3.0, 4.0));  // order flipped
}

TEST_CASE("query upper bound dominates every achieved score") {
    std::mt19937_64 rng(77);
    Bm25Params p;
    for (int trial = 0; trial < 50; ++trial) {
        auto inst = random_instance(rng);
        auto idx = build_index(inst.docs, TokenizerMode::Minimal);
        double ub = idx.query_upper_bound(inst.query);
        auto full = idx.bm25_topk(inst.query, inst.docs.size(), p);
        for (const auto& [_, score] : full.entries)
            CHECK(score <= ub + 1e-12);
    }
}

TEST_CASE("postings count equals sum of per-doc distinct terms") {
    std::mt19937_64 rng(5);
    auto inst = random_instance(rng);
    auto idx = build_index(inst.docs, TokenizerMode::Minimal);
    std::uint64_t distinct = 0;
    for (const auto& [_, text] : inst.docs) {
        auto toks = tokenize(text, TokenizerMode::Minimal);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        distinct += toks.size();
    }
    CHECK(idx.num_postings() == distinct);
}

}  // TEST_SUITE
