#include "hybrid/twophase.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hybrid {

TwoPhaseSelector::TwoPhaseSelector(std::size_t buffer_capacity,
                                   bool reset_sentinel)
    : buffer_(buffer_capacity), reset_sentinel_(reset_sentinel) {
    if (buffer_capacity == 0)
        throw std::invalid_argument("buffer capacity must be >= 1");
    for (auto& s : buffer_)
        s = {-std::numeric_limits<double>::infinity(), 0, false};
}

RankedList TwoPhaseSelector::select(const std::vector<double>& scores,
                                    std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (k > buffer_.size())
        throw std::invalid_argument("k exceeds buffer capacity");

    if (reset_sentinel_) {
        for (auto& s : buffer_)
            s = {-std::numeric_limits<double>::infinity(), 0, false};
    }

    // Phase 1: each lane scans a strided share of the row and writes its
    // local top-k into its slot region. Slots beyond the lane's candidate
    // count are left untouched.
    std::size_t lanes = std::max<std::size_t>(1, buffer_.size() / k);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        std::vector<std::pair<DocId, double>> local;
        for (std::size_t d = lane; d < scores.size(); d += lanes) {
            if (scores[d] <= 0.0) continue;
            std::pair<DocId, double> cand{static_cast<DocId>(d), scores[d]};
            auto pos = std::lower_bound(local.begin(), local.end(), cand,
                                        RankedList::better);
            if (local.size() < k) {
                local.insert(pos, cand);
            } else if (pos != local.end()) {
                local.insert(pos, cand);
                local.pop_back();
            }
        }
        for (std::size_t i = 0; i < local.size(); ++i) {
            buffer_[lane * k + i] = {local[i].second, local[i].first, true};
        }
    }

    // Phase 2: reduce over all K_max slots.
    std::vector<std::pair<DocId, double>> cands;
    for (const auto& s : buffer_)
        if (s.valid && s.score > 0.0) cands.emplace_back(s.doc, s.score);
    std::sort(cands.begin(), cands.end(), RankedList::better);
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    RankedList out;
    for (const auto& c : cands) {
        out.entries.push_back(c);
        if (out.entries.size() == k) break;
    }
    return out;
}

std::vector<RankedList> TwoPhaseSelector::select_batch(
    const std::vector<std::vector<double>>& score_matrix, std::size_t k) {
    std::vector<RankedList> out;
    out.reserve(score_matrix.size());
    for (const auto& row : score_matrix) out.push_back(select(row, k));
    return out;
}

}  // namespace hybrid
