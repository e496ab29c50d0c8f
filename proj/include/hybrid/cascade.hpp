#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybrid/fusion.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

enum class ConfidenceProxy { Margin, Top1Fraction, EntropyComplement,
                             Classifier };

struct CascadeConfig {
    double conf_threshold = 0.10;
    std::map<std::string, double> per_qtype_thresholds;  // empty = global
    bool use_qtype_classifier = false;
    ConfidenceProxy proxy = ConfidenceProxy::Margin;
    double skip_cost_ms = 0.4;
    double escalate_cost_ms = 53.2;
    double epsilon_guard = 1e-9;
};

/// Confidence signal over the cheap channel's top-k scores.
///   Margin            (s0-s1)/max(s0, eps); < 2 scores or s0 <= 0 -> 0
///   Top1Fraction      s0 / sum(s)
///   EntropyComplement 1 - H(p)/log(n), p_i = s_i/sum(s)
double confidence(const std::vector<double>& scores, ConfidenceProxy proxy,
                  double epsilon_guard);

struct CascadeDecision {
    RankedList results;
    bool escalated = false;
    double confidence = 0.0;
    std::optional<std::string> qtype_used;
    double accounted_cost_ms = 0.0;
};

struct QtypePrediction {
    std::string qtype;
    std::string best_system;  // used by the Classifier proxy
};

using RetrieveFn = std::function<RankedList(std::size_t k)>;
using QtypeFn = std::function<QtypePrediction()>;

/// Always run BM25; skip the dense channel when the confidence signal
/// clears the (possibly per-qtype) threshold, otherwise escalate to
/// agent_rrf(BM25, dense). qtype_fn is required iff use_qtype_classifier.
CascadeDecision cascade_retrieve(std::size_t k, const CascadeConfig& cfg,
                                 const RetrieveFn& bm25_fn,
                                 const RetrieveFn& dense_fn,
                                 const RecordLookup& records,
                                 std::int64_t query_ts_ms,
                                 const FusionParams& fusion,
                                 const QtypeFn& qtype_fn = nullptr);

/// L_amort = rho*L_skip + (1-rho)*L_escalate; throws unless rho in [0,1].
double amortized_cost(double skip_rate, double skip_cost_ms,
                      double escalate_cost_ms);

/// Per-query material precomputed once so threshold sweeps are exact and
/// deterministic: both paths' results plus the skip-decision confidence.
struct PreparedQuery {
    RankedList skip_results;       // BM25-only path
    RankedList escalate_results;   // agent_rrf path
    double confidence = 0.0;
    std::set<DocId> gold;
    std::string qtype;
};

using QualityMetric =
    std::function<double(const RankedList&, const std::set<DocId>&)>;

struct SweepRow {
    double tau_c;
    double skip_rate;
    double amortized_ms;
    double quality;
};

std::vector<SweepRow> sweep_thresholds(
    const std::vector<PreparedQuery>& queries,
    const std::vector<double>& tau_grid, const QualityMetric& metric,
    double skip_cost_ms, double escalate_cost_ms);

/// Per qtype: the largest grid threshold whose quality stays within
/// noise_margin of the always-escalate baseline; among thresholds tied at
/// that quality, the smallest wins. Qtypes absent from the training set
/// fall back to global_tau with a warning on stderr.
std::map<std::string, double> tune_per_qtype_thresholds(
    const std::vector<PreparedQuery>& queries,
    const std::vector<double>& tau_grid, double noise_margin,
    const QualityMetric& metric, double global_tau,
    const std::set<std::string>& all_qtypes = {});

}  // namespace hybrid
