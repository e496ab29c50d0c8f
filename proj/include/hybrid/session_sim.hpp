#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace hybrid {

struct SessionSpec {
    std::uint32_t turns = 800;
    std::uint64_t corpus_start = 4000;
    std::uint64_t corpus_end = 5000000;  // linear growth across the session
    double poisson_lambda = 8.0;
    std::uint32_t retrievals_min = 3;
    std::uint32_t retrievals_max = 20;
    double jitter_sigma = 0.30;      // log-normal, median 1
    double budget_ms = 200.0;        // perceptual per-turn budget
};

/// ms per query at corpus size N.
using LatencyCurve = std::function<double(std::uint64_t)>;

struct SessionResult {
    double cumulative_s = 0.0;
    double p99_ms_per_step = 0.0;
    double pct_over_budget = 0.0;  // fraction of turns over budget_ms
    double p99_us_per_q = 0.0;
};

/// Simulated agent session: per turn, a clipped-Poisson number of
/// retrievals, each costing curve(N_t) times a log-normal jitter factor.
SessionResult simulate_session(const SessionSpec& spec,
                               const LatencyCurve& curve, std::uint64_t seed);

/// Convenience: one run per named strategy curve, same seed.
std::map<std::string, SessionResult> simulate_session_strategies(
    const SessionSpec& spec,
    const std::map<std::string, LatencyCurve>& curves, std::uint64_t seed);

}  // namespace hybrid
