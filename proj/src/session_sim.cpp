#include "hybrid/session_sim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hybrid/rng.hpp"

namespace hybrid {

namespace {

double percentile_nearest(std::vector<double>& v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(v.size()))) ;
    if (idx > 0) --idx;
    if (idx >= v.size()) idx = v.size() - 1;
    return v[idx];
}

}  // namespace

SessionResult simulate_session(const SessionSpec& spec,
                               const LatencyCurve& curve,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> step_ms;
    std::vector<double> per_query_ms;
    step_ms.reserve(spec.turns);
    double cumulative_ms = 0.0;
    std::size_t over = 0;
    for (std::uint32_t t = 0; t < spec.turns; ++t) {
        double frac = spec.turns > 1
                          ? static_cast<double>(t) /
                                static_cast<double>(spec.turns - 1)
                          : 0.0;
        std::uint64_t n = spec.corpus_start +
                          static_cast<std::uint64_t>(
                              frac * static_cast<double>(spec.corpus_end -
                                                         spec.corpus_start));
        std::uint32_t r = std::clamp(poisson(rng, spec.poisson_lambda),
                                     spec.retrievals_min, spec.retrievals_max);
        double base = curve(n);
        double total = 0.0;
        for (std::uint32_t i = 0; i < r; ++i) {
            double jitter = spec.jitter_sigma == 0.0
                                ? 1.0
                                : std::exp(spec.jitter_sigma * normal(rng));
            double ms = base * jitter;
            per_query_ms.push_back(ms);
            total += ms;
        }
        step_ms.push_back(total);
        cumulative_ms += total;
        if (total > spec.budget_ms) ++over;
    }
    SessionResult res;
    res.cumulative_s = cumulative_ms / 1000.0;
    res.p99_ms_per_step = percentile_nearest(step_ms, 0.99);
    res.pct_over_budget = spec.turns
                              ? static_cast<double>(over) /
                                    static_cast<double>(spec.turns)
                              : 0.0;
    res.p99_us_per_q = percentile_nearest(per_query_ms, 0.99) * 1000.0;
    return res;
}

std::map<std::string, SessionResult> simulate_session_strategies(
    const SessionSpec& spec,
    const std::map<std::string, LatencyCurve>& curves, std::uint64_t seed) {
    std::map<std::string, SessionResult> out;
    for (const auto& [name, curve] : curves)
        out[name] = simulate_session(spec, curve, seed);
    return out;
}

}  // namespace hybrid
