#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hybrid/types.hpp"

namespace hybrid {

struct RouterTrainConfig {
    std::uint32_t epochs = 500;
    double learning_rate = 0.5;
    double l2 = 1e-3;
    std::uint64_t seed = 42;
    bool use_dense_features = false;  // concatenates a hash embedding
    std::uint32_t dense_dim = 64;
};

/// TF-IDF 1-2 gram features + multinomial logistic regression over question
/// types, with the per-type best-system table used for routing.
class RouterModel {
public:
    std::unordered_map<std::string, std::uint32_t> feature_ids;  // n-gram
    std::vector<double> feature_idf;
    std::vector<std::string> qtype_labels;
    std::vector<std::vector<double>> weights;  // qtype x feature
    std::vector<double> biases;
    std::map<std::string, std::string> best_system;  // qtype -> system
    bool use_dense_features = false;
    std::uint32_t dense_dim = 0;
    std::uint64_t dense_seed = 0;

    std::size_t num_features() const {
        return feature_idf.size() + (use_dense_features ? dense_dim : 0);
    }

    /// L2-normalized TF-IDF vector of the query's 1-2 grams (sparse),
    /// optionally concatenated with the dense hash embedding.
    std::vector<std::pair<std::uint32_t, double>> featurize(
        const std::string& query) const;

    std::string to_json() const;
    static RouterModel from_json(const std::string& text);
};

struct RoutingDecision {
    std::string predicted_qtype;
    std::map<std::string, double> posterior;     // sums to 1
    std::string chosen_system;                   // best_system[argmax]
    std::map<std::string, double> soft_weights;  // per system
};

/// Deterministic full-batch gradient descent; throws on single-class input.
/// Training loss is non-increasing across epochs.
RouterModel train_router(
    const std::vector<std::pair<std::string, std::string>>& labeled,
    const RouterTrainConfig& cfg,
    const std::map<std::string, std::string>& best_system,
    std::vector<double>* loss_trace = nullptr);

RoutingDecision classify(const RouterModel& model, const std::string& query);

/// Returns exactly the chosen system's list; throws when absent.
RankedList route_discrete(
    const RoutingDecision& decision,
    const std::map<std::string, RankedList>& per_system_results);

/// Posterior-weighted soft routing (delegates to soft_rrf).
RankedList route_soft(
    const RoutingDecision& decision,
    const std::map<std::string, RankedList>& per_system_results,
    double k_rrf);

}  // namespace hybrid
