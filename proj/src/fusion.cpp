#include "hybrid/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace hybrid {

RankedList rrf(const std::vector<RankedList>& lists, double k_rrf) {
    if (k_rrf <= 0.0) throw std::invalid_argument("k_rrf must be > 0");
    std::unordered_map<DocId, double> score;
    for (const auto& list : lists) {
        for (std::size_t r = 0; r < list.entries.size(); ++r)
            score[list.entries[r].first] +=
                1.0 / (k_rrf + static_cast<double>(r + 1));
    }
    RankedList out;
    out.entries.assign(score.begin(), score.end());
    out.sort_and_truncate(out.entries.size());
    return out;
}

RankedList agent_rrf(const RankedList& sparse, const RankedList& dense,
                     const RecordLookup& records, std::int64_t query_ts_ms,
                     const std::optional<std::string>& qtype,
                     const FusionParams& p) {
    RankedList fused = rrf({sparse, dense}, p.k_rrf);
    bool bonus_on;
    if (p.recency_qtypes.empty()) {
        bonus_on = qtype.has_value() || p.apply_bonus_when_qtype_unknown;
    } else if (qtype) {
        bonus_on = p.recency_qtypes.count(*qtype) > 0;
    } else {
        bonus_on = p.apply_bonus_when_qtype_unknown;
    }
    double tau = static_cast<double>(p.tau_for(qtype));
    for (auto& [doc, score] : fused.entries) {
        const MemoryRecord* rec = records(doc);
        if (!rec)
            throw std::runtime_error("record missing from lookup: " +
                                     std::to_string(doc));
        if (bonus_on && p.alpha > 0.0) {
            double dt = static_cast<double>(
                std::max<std::int64_t>(0, query_ts_ms - rec->ts_ms));
            score += p.alpha * std::exp(-dt / tau);
        }
        if (p.beta != 0.0) score += p.beta * rec->weight;
    }
    fused.sort_and_truncate(fused.entries.size());
    return fused;
}

RankedList soft_rrf(const std::map<std::string, RankedList>& per_system,
                    const std::map<std::string, double>& weights,
                    double k_rrf) {
    if (k_rrf <= 0.0) throw std::invalid_argument("k_rrf must be > 0");
    bool any_positive = false;
    for (const auto& [sys, w] : weights) {
        if (w < 0.0) throw std::invalid_argument("negative system weight");
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw std::invalid_argument("all system weights are zero");
    std::unordered_map<DocId, double> score;
    for (const auto& [sys, list] : per_system) {
        auto wit = weights.find(sys);
        double w = wit == weights.end() ? 0.0 : wit->second;
        if (w == 0.0) continue;
        for (std::size_t r = 0; r < list.entries.size(); ++r)
            score[list.entries[r].first] +=
                w / (k_rrf + static_cast<double>(r + 1));
    }
    RankedList out;
    out.entries.assign(score.begin(), score.end());
    out.sort_and_truncate(out.entries.size());
    return out;
}

std::vector<MemoryRecord> apply_filters(
    const std::vector<MemoryRecord>& records,
    const std::optional<std::string>& session,
    const std::optional<std::set<Role>>& roles) {
    std::vector<MemoryRecord> out;
    for (const auto& r : records) {
        if (session && r.session != *session) continue;
        if (roles && roles->count(r.role) == 0) continue;
        out.push_back(r);
    }
    return out;
}

}  // namespace hybrid
