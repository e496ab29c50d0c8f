#include <doctest.h>

#include <random>
#include <stdexcept>

#include "hybrid/rng.hpp"
#include "hybrid/twophase.hpp"

using namespace hybrid;

namespace {

RankedList sort_oracle(const std::vector<double>& scores, std::size_t k) {
    RankedList r;
    for (std::size_t i = 0; i < scores.size(); ++i)
        r.entries.emplace_back(i, scores[i]);
    r.sort_and_truncate(k);
    return r;
}

bool identical(const RankedList& a, const RankedList& b) {
    return a.entries == b.entries;
}

}  // namespace

TEST_SUITE("twophase") {

TEST_CASE("matches the sort oracle on random score rows") {
    std::mt19937_64 rng(99);
    TwoPhaseSelector sel(32);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + uniform_u64(rng, 200);
        std::vector<double> scores(n);
        for (auto& s : scores) s = next_double(rng) * 10.0;
        std::size_t k = 1 + uniform_u64(rng, 32);
        CHECK(identical(sel.select(scores, k), sort_oracle(scores, k)));
    }
}

TEST_CASE("K_max equal to k is still exact") {
    TwoPhaseSelector sel(4);
    std::vector<double> scores{0.5, 9.0, 3.0, 7.0, 1.0, 8.0};
    CHECK(identical(sel.select(scores, 4), sort_oracle(scores, 4)));
}

TEST_CASE("k beyond the buffer capacity is rejected") {
    TwoPhaseSelector sel(8);
    CHECK_THROWS_AS(sel.select({1.0, 2.0}, 9), std::invalid_argument);
}

TEST_CASE("batch selection equals per-row selection") {
    std::mt19937_64 rng(7);
    TwoPhaseSelector sel(16);
    std::vector<std::vector<double>> matrix(10);
    for (auto& row : matrix) {
        row.resize(50);
        for (auto& s : row) s = next_double(rng);
    }
    auto batch = sel.select_batch(matrix, 5);
    REQUIRE(batch.size() == matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i)
        CHECK(identical(batch[i], sort_oracle(matrix[i], 5)));
}

TEST_CASE("stale slots contaminate results without the sentinel reset") {
    // Query 1 fills unused buffer slots with large scores; query 2's
    // smaller scores then lose the reduction to stale data.
    std::vector<double> big(40);
    for (std::size_t i = 0; i < big.size(); ++i)
        big[i] = 100.0 + static_cast<double>(i);
    std::vector<double> small{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};

    TwoPhaseSelector buggy(32, /*reset_sentinel=*/false);
    buggy.select(big, 2);
    auto contaminated = buggy.select(small, 2);
    CHECK_FALSE(identical(contaminated, sort_oracle(small, 2)));

    TwoPhaseSelector fixed(32, /*reset_sentinel=*/true);
    fixed.select(big, 2);
    auto clean = fixed.select(small, 2);
    CHECK(identical(clean, sort_oracle(small, 2)));
}

}  // TEST_SUITE
