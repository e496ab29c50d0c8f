#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hybrid/types.hpp"

namespace hybrid {

struct FusionParams {
    double k_rrf = 60.0;
    double alpha = 0.005;
    std::int64_t tau_ms = 30LL * 24 * 3600 * 1000;  // 30 days
    std::map<std::string, std::int64_t> tau_overrides_ms;  // per qtype
    double beta = 0.0;
    std::set<std::string> recency_qtypes;  // empty = bonus for all qtypes
    bool apply_bonus_when_qtype_unknown = true;

    std::int64_t tau_for(const std::optional<std::string>& qtype) const {
        if (qtype) {
            auto it = tau_overrides_ms.find(*qtype);
            if (it != tau_overrides_ms.end()) return it->second;
        }
        return tau_ms;
    }
};

/// Plain reciprocal rank fusion: score(d) = sum over lists containing d of
/// 1/(k_rrf + rank), ranks 1-based.
RankedList rrf(const std::vector<RankedList>& lists, double k_rrf);

using RecordLookup =
    std::function<const MemoryRecord*(DocId)>;  // nullptr = unknown id

/// RRF of the sparse and dense lists plus the additive recency bonus
/// alpha*exp(-dt/tau) and importance boost beta*w. dt is clamped at 0 for
/// future-dated records. Throws if a listed doc is missing from the lookup.
RankedList agent_rrf(const RankedList& sparse, const RankedList& dense,
                     const RecordLookup& records, std::int64_t query_ts_ms,
                     const std::optional<std::string>& qtype,
                     const FusionParams& p);

/// Weight-prefactored RRF: score(d) = sum_s w(s)/(k_rrf + rank_s(d)).
/// Throws when all weights are zero or any is negative.
RankedList soft_rrf(const std::map<std::string, RankedList>& per_system,
                    const std::map<std::string, double>& weights,
                    double k_rrf);

/// Hard conjunctive session/role filters applied before scoring.
std::vector<MemoryRecord> apply_filters(
    const std::vector<MemoryRecord>& records,
    const std::optional<std::string>& session,
    const std::optional<std::set<Role>>& roles);

}  // namespace hybrid
