#include "hybrid/router.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "hybrid/dense.hpp"
#include "hybrid/fusion.hpp"
#include "hybrid/tokenizer.hpp"

namespace hybrid {

namespace {

std::vector<std::string> ngrams(const std::string& text) {
    auto toks = tokenize(text, TokenizerMode::Minimal);
    std::vector<std::string> out = toks;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i)
        out.push_back(toks[i] + "_" + toks[i + 1]);
    return out;
}

void softmax(std::vector<double>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        z += v;
    }
    for (double& v : logits) v /= z;
}

using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

std::vector<double> logits_of(const RouterModel& m, const SparseVec& x) {
    std::vector<double> logits(m.biases);
    for (std::size_t c = 0; c < logits.size(); ++c)
        for (const auto& [f, v] : x) logits[c] += m.weights[c][f] * v;
    return logits;
}

}  // namespace

std::vector<std::pair<std::uint32_t, double>> RouterModel::featurize(
    const std::string& query) const {
    std::map<std::uint32_t, double> tf;
    for (const auto& g : ngrams(query)) {
        auto it = feature_ids.find(g);
        if (it != feature_ids.end()) tf[it->second] += 1.0;
    }
    SparseVec x;
    double norm = 0.0;
    for (const auto& [f, count] : tf) {
        double v = count * feature_idf[f];
        x.emplace_back(f, v);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (auto& [f, v] : x) v /= norm;
    if (use_dense_features) {
        auto emb = hash_embed(query, dense_dim, dense_seed);
        std::uint32_t base = static_cast<std::uint32_t>(feature_idf.size());
        for (std::uint32_t j = 0; j < dense_dim; ++j)
            if (emb[j] != 0.0f)
                x.emplace_back(base + j, static_cast<double>(emb[j]));
    }
    return x;
}

RouterModel train_router(
    const std::vector<std::pair<std::string, std::string>>& labeled,
    const RouterTrainConfig& cfg,
    const std::map<std::string, std::string>& best_system,
    std::vector<double>* loss_trace) {
    if (labeled.empty()) throw std::invalid_argument("empty training set");
    std::set<std::string> label_set;
    for (const auto& [q, l] : labeled) label_set.insert(l);
    if (label_set.size() < 2)
        throw std::invalid_argument(
            "training requires at least two distinct qtype labels");

    RouterModel m;
    m.qtype_labels.assign(label_set.begin(), label_set.end());
    m.best_system = best_system;
    m.use_dense_features = cfg.use_dense_features;
    m.dense_dim = cfg.use_dense_features ? cfg.dense_dim : 0;
    m.dense_seed = cfg.seed;

    // Vocabulary and document frequencies over the training queries;
    // feature ids assigned alphabetically for determinism.
    std::map<std::string, std::uint32_t> df;
    for (const auto& [q, l] : labeled) {
        std::set<std::string> uniq;
        for (const auto& g : ngrams(q)) uniq.insert(g);
        for (const auto& g : uniq) ++df[g];
    }
    double n_docs = static_cast<double>(labeled.size());
    for (const auto& [g, d] : df) {
        std::uint32_t id = static_cast<std::uint32_t>(m.feature_idf.size());
        m.feature_ids.emplace(g, id);
        m.feature_idf.push_back(std::log((1.0 + n_docs) / (1.0 + d)) + 1.0);
    }

    const std::size_t C = m.qtype_labels.size();
    const std::size_t F = m.num_features();
    m.weights.assign(C, std::vector<double>(F, 0.0));
    m.biases.assign(C, 0.0);

    std::vector<SparseVec> xs;
    std::vector<std::size_t> ys;
    xs.reserve(labeled.size());
    for (const auto& [q, l] : labeled) {
        xs.push_back(m.featurize(q));
        ys.push_back(static_cast<std::size_t>(
            std::lower_bound(m.qtype_labels.begin(), m.qtype_labels.end(), l) -
            m.qtype_labels.begin()));
    }

    auto full_loss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto logits = logits_of(m, xs[i]);
            softmax(logits);
            loss -= std::log(std::max(logits[ys[i]], 1e-300));
        }
        loss /= n_docs;
        double reg = 0.0;
        for (const auto& row : m.weights)
            for (double w : row) reg += w * w;
        return loss + 0.5 * cfg.l2 * reg;
    };

    double lr = cfg.learning_rate;
    double prev_loss = full_loss();
    if (loss_trace) loss_trace->push_back(prev_loss);
    std::vector<std::vector<double>> gw(C, std::vector<double>(F));
    std::vector<double> gb(C);
    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (auto& row : gw) std::fill(row.begin(), row.end(), 0.0);
        std::fill(gb.begin(), gb.end(), 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto p = logits_of(m, xs[i]);
            softmax(p);
            for (std::size_t c = 0; c < C; ++c) {
                double delta = p[c] - (c == ys[i] ? 1.0 : 0.0);
                gb[c] += delta;
                for (const auto& [f, v] : xs[i]) gw[c][f] += delta * v;
            }
        }
        for (std::size_t c = 0; c < C; ++c) {
            gb[c] /= n_docs;
            for (std::size_t f = 0; f < F; ++f)
                gw[c][f] = gw[c][f] / n_docs + cfg.l2 * m.weights[c][f];
        }
        // Backtracking keeps the loss non-increasing with a fixed-seed,
        // fully deterministic trajectory.
        auto wsnap = m.weights;
        auto bsnap = m.biases;
        double step = lr;
        for (int tries = 0; tries < 30; ++tries) {
            for (std::size_t c = 0; c < C; ++c) {
                m.biases[c] = bsnap[c] - step * gb[c];
                for (std::size_t f = 0; f < F; ++f)
                    m.weights[c][f] = wsnap[c][f] - step * gw[c][f];
            }
            double loss = full_loss();
            if (loss <= prev_loss) {
                prev_loss = loss;
                break;
            }
            step *= 0.5;
            if (tries == 29) {
                m.weights = wsnap;
                m.biases = bsnap;
            }
        }
        if (loss_trace) loss_trace->push_back(prev_loss);
    }
    return m;
}

RoutingDecision classify(const RouterModel& model, const std::string& query) {
    auto x = model.featurize(query);
    auto p = logits_of(model, x);
    softmax(p);
    RoutingDecision d;
    std::size_t best = 0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        d.posterior[model.qtype_labels[c]] = p[c];
        if (p[c] > p[best]) best = c;
    }
    d.predicted_qtype = model.qtype_labels[best];
    auto bit = model.best_system.find(d.predicted_qtype);
    if (bit == model.best_system.end())
        throw std::runtime_error("best_system table missing qtype: " +
                                 d.predicted_qtype);
    d.chosen_system = bit->second;
    for (std::size_t c = 0; c < p.size(); ++c) {
        auto it = model.best_system.find(model.qtype_labels[c]);
        if (it == model.best_system.end())
            throw std::runtime_error("best_system table missing qtype: " +
                                     model.qtype_labels[c]);
        d.soft_weights[it->second] += p[c];
    }
    return d;
}

RankedList route_discrete(
    const RoutingDecision& decision,
    const std::map<std::string, RankedList>& per_system_results) {
    auto it = per_system_results.find(decision.chosen_system);
    if (it == per_system_results.end())
        throw std::runtime_error("no results for chosen system: " +
                                 decision.chosen_system);
    return it->second;
}

RankedList route_soft(
    const RoutingDecision& decision,
    const std::map<std::string, RankedList>& per_system_results,
    double k_rrf) {
    return soft_rrf(per_system_results, decision.soft_weights, k_rrf);
}

std::string RouterModel::to_json() const {
    nlohmann::json j;
    j["qtype_labels"] = qtype_labels;
    j["biases"] = biases;
    j["weights"] = weights;
    j["best_system"] = best_system;
    j["use_dense_features"] = use_dense_features;
    j["dense_dim"] = dense_dim;
    j["dense_seed"] = dense_seed;
    nlohmann::json feats = nlohmann::json::object();
    for (const auto& [g, id] : feature_ids) feats[g] = id;
    j["feature_ids"] = feats;
    j["feature_idf"] = feature_idf;
    return j.dump();
}

RouterModel RouterModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RouterModel m;
    m.qtype_labels = j.at("qtype_labels").get<std::vector<std::string>>();
    m.biases = j.at("biases").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.best_system =
        j.at("best_system").get<std::map<std::string, std::string>>();
    m.use_dense_features = j.at("use_dense_features").get<bool>();
    m.dense_dim = j.at("dense_dim").get<std::uint32_t>();
    m.dense_seed = j.at("dense_seed").get<std::uint64_t>();
    for (const auto& [g, id] : j.at("feature_ids").items())
        m.feature_ids.emplace(g, id.get<std::uint32_t>());
    m.feature_idf = j.at("feature_idf").get<std::vector<double>>();
    return m;
}

}  // namespace hybrid
