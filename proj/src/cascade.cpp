#include "hybrid/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hybrid {

double confidence(const std::vector<double>& scores, ConfidenceProxy proxy,
                  double epsilon_guard) {
    if (proxy == ConfidenceProxy::Classifier)
        throw std::invalid_argument(
            "Classifier proxy has no score-based confidence");
    if (scores.empty() || scores[0] <= 0.0) return 0.0;
    switch (proxy) {
        case ConfidenceProxy::Margin: {
            if (scores.size() < 2) return 0.0;
            return (scores[0] - scores[1]) /
                   std::max(scores[0], epsilon_guard);
        }
        case ConfidenceProxy::Top1Fraction: {
            double sum = 0.0;
            for (double s : scores) sum += s;
            return scores[0] / std::max(sum, epsilon_guard);
        }
        case ConfidenceProxy::EntropyComplement: {
            if (scores.size() < 2) return 0.0;
            double sum = 0.0;
            for (double s : scores) sum += s;
            if (sum <= 0.0) return 0.0;
            double h = 0.0;
            for (double s : scores) {
                double pi = s / sum;
                if (pi > 0.0) h -= pi * std::log(pi);
            }
            return 1.0 - h / std::log(static_cast<double>(scores.size()));
        }
        default:
            return 0.0;
    }
}

CascadeDecision cascade_retrieve(std::size_t k, const CascadeConfig& cfg,
                                 const RetrieveFn& bm25_fn,
                                 const RetrieveFn& dense_fn,
                                 const RecordLookup& records,
                                 std::int64_t query_ts_ms,
                                 const FusionParams& fusion,
                                 const QtypeFn& qtype_fn) {
    if (cfg.use_qtype_classifier && !qtype_fn)
        throw std::invalid_argument(
            "use_qtype_classifier requires a qtype callback");

    CascadeDecision d;
    RankedList sparse = bm25_fn(k);

    std::optional<std::string> qtype;
    std::string best_system;
    if (cfg.use_qtype_classifier) {
        QtypePrediction pred = qtype_fn();
        qtype = pred.qtype;
        best_system = pred.best_system;
        d.qtype_used = pred.qtype;
    }

    bool skip;
    if (cfg.proxy == ConfidenceProxy::Classifier) {
        if (!cfg.use_qtype_classifier)
            throw std::invalid_argument(
                "Classifier proxy requires use_qtype_classifier");
        skip = best_system == "bm25";
        d.confidence = skip ? 1.0 : 0.0;
    } else {
        std::vector<double> scores;
        scores.reserve(sparse.entries.size());
        for (const auto& [doc, s] : sparse.entries) scores.push_back(s);
        d.confidence = confidence(scores, cfg.proxy, cfg.epsilon_guard);
        double tau = cfg.conf_threshold;
        if (qtype) {
            auto it = cfg.per_qtype_thresholds.find(*qtype);
            if (it != cfg.per_qtype_thresholds.end()) tau = it->second;
        }
        skip = d.confidence >= tau;
    }

    if (skip) {
        d.results = std::move(sparse);
        d.escalated = false;
        d.accounted_cost_ms = cfg.skip_cost_ms;
        return d;
    }
    RankedList dense = dense_fn(k);
    RankedList fused =
        agent_rrf(sparse, dense, records, query_ts_ms, qtype, fusion);
    fused.sort_and_truncate(k);
    d.results = std::move(fused);
    d.escalated = true;
    d.accounted_cost_ms = cfg.escalate_cost_ms;
    return d;
}

double amortized_cost(double skip_rate, double skip_cost_ms,
                      double escalate_cost_ms) {
    if (!(skip_rate >= 0.0 && skip_rate <= 1.0))
        throw std::invalid_argument("skip rate must be in [0,1]");
    return skip_rate * skip_cost_ms + (1.0 - skip_rate) * escalate_cost_ms;
}

std::vector<SweepRow> sweep_thresholds(
    const std::vector<PreparedQuery>& queries,
    const std::vector<double>& tau_grid, const QualityMetric& metric,
    double skip_cost_ms, double escalate_cost_ms) {
    if (tau_grid.empty()) throw std::invalid_argument("empty threshold grid");
    std::vector<SweepRow> rows;
    rows.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        std::size_t skipped = 0;
        double quality = 0.0;
        for (const auto& q : queries) {
            bool skip = q.confidence >= tau;
            if (skip) ++skipped;
            quality += metric(skip ? q.skip_results : q.escalate_results,
                              q.gold);
        }
        double n = static_cast<double>(queries.size());
        double rho = queries.empty() ? 0.0 : skipped / n;
        rows.push_back({tau, rho,
                        amortized_cost(rho, skip_cost_ms, escalate_cost_ms),
                        queries.empty() ? 0.0 : quality / n});
    }
    return rows;
}

std::map<std::string, double> tune_per_qtype_thresholds(
    const std::vector<PreparedQuery>& queries,
    const std::vector<double>& tau_grid, double noise_margin,
    const QualityMetric& metric, double global_tau,
    const std::set<std::string>& all_qtypes) {
    if (tau_grid.empty()) throw std::invalid_argument("empty threshold grid");
    std::map<std::string, std::vector<const PreparedQuery*>> buckets;
    for (const auto& q : queries) buckets[q.qtype].push_back(&q);

    std::vector<double> grid = tau_grid;
    std::sort(grid.begin(), grid.end());

    std::map<std::string, double> out;
    for (const auto& [qtype, qs] : buckets) {
        double n = static_cast<double>(qs.size());
        double baseline = 0.0;  // always-escalate quality
        for (const auto* q : qs) baseline += metric(q->escalate_results,
                                                    q->gold);
        baseline /= n;
        double target = baseline - noise_margin;

        // quality per grid threshold
        std::vector<double> quality(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double sum = 0.0;
            for (const auto* q : qs)
                sum += metric(q->confidence >= grid[i] ? q->skip_results
                                                       : q->escalate_results,
                              q->gold);
            quality[i] = sum / n;
        }
        // Largest threshold within the margin; among thresholds tied at its
        // quality level, the smallest wins.
        std::ptrdiff_t best = -1;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (quality[i] >= target) best = static_cast<std::ptrdiff_t>(i);
        if (best < 0) {
            out[qtype] = grid.back();  // escalate as much as the grid allows
            continue;
        }
        double best_quality = quality[static_cast<std::size_t>(best)];
        double chosen = grid[static_cast<std::size_t>(best)];
        for (std::size_t i = 0; i < static_cast<std::size_t>(best); ++i) {
            if (quality[i] >= target && quality[i] == best_quality) {
                chosen = grid[i];
                break;
            }
        }
        out[qtype] = chosen;
    }

    for (const auto& qtype : all_qtypes) {
        if (!out.count(qtype)) {
            std::fprintf(stderr,
                         "warning: qtype '%s' has no training queries; "
                         "falling back to global threshold %g\n",
                         qtype.c_str(), global_tau);
            out[qtype] = global_tau;
        }
    }
    return out;
}

}  // namespace hybrid
