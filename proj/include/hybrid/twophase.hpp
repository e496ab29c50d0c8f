#pragma once

#include <cstddef>
#include <vector>

#include "hybrid/types.hpp"

namespace hybrid {

/// CPU emulation of the two-phase batched top-k selection. One candidate
/// buffer of K_max slots is deliberately reused across all queries; before
/// each query's reduction phase every slot is reset to a -inf sentinel.
/// `reset_sentinel=false` is a test-only switch that reproduces the
/// stale-slot contamination failure.
class TwoPhaseSelector {
public:
    explicit TwoPhaseSelector(std::size_t buffer_capacity,
                              bool reset_sentinel = true);

    /// Exact top-k of one score row; scores[i] belongs to doc id i.
    /// Throws if k > buffer capacity.
    RankedList select(const std::vector<double>& scores, std::size_t k);

    /// Per-row selection over a query x doc score matrix.
    std::vector<RankedList> select_batch(
        const std::vector<std::vector<double>>& score_matrix, std::size_t k);

private:
    struct Slot {
        double score;
        DocId doc;
        bool valid;
    };
    std::vector<Slot> buffer_;
    bool reset_sentinel_;
};

}  // namespace hybrid
