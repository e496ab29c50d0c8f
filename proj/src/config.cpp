#include "hybrid/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hybrid {

using nlohmann::json;

namespace {

constexpr std::int64_t kDayMs = 24LL * 3600 * 1000;

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
    throw std::runtime_error("unknown config key: " + section + "." + key);
}

double as_num(const json& v, const std::string& where) {
    if (!v.is_number())
        throw std::runtime_error("config: " + where + " must be a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean())
        throw std::runtime_error("config: " + where + " must be a boolean");
    return v.get<bool>();
}

std::string as_str(const json& v, const std::string& where) {
    if (!v.is_string())
        throw std::runtime_error("config: " + where + " must be a string");
    return v.get<std::string>();
}

void parse_tokenizer(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "mode")
            cfg.tok_mode = tokenizer_mode_from_name(as_str(v, "tokenizer.mode"));
        else
            bad_key("tokenizer", k);
    }
}

void parse_bm25(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "k1") cfg.bm25.k1 = as_num(v, "bm25.k1");
        else if (k == "b") cfg.bm25.b = as_num(v, "bm25.b");
        else bad_key("bm25", k);
    }
}

void parse_temporal(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "window_days")
            cfg.temporal.window_ms = static_cast<std::int64_t>(
                as_num(v, "temporal.window_days") * static_cast<double>(kDayMs));
        else if (k == "epsilon")
            cfg.temporal.epsilon = as_num(v, "temporal.epsilon");
        else if (k == "lambda_hat")
            cfg.temporal.lambda_hat = as_num(v, "temporal.lambda_hat");
        else if (k == "k_max_partitions")
            cfg.temporal.k_max_partitions = static_cast<std::uint32_t>(
                as_num(v, "temporal.k_max_partitions"));
        else bad_key("temporal", k);
    }
}

void parse_fusion(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "k_rrf") cfg.fusion.k_rrf = as_num(v, "fusion.k_rrf");
        else if (k == "alpha") cfg.fusion.alpha = as_num(v, "fusion.alpha");
        else if (k == "tau_days")
            cfg.fusion.tau_ms = static_cast<std::int64_t>(
                as_num(v, "fusion.tau_days") * static_cast<double>(kDayMs));
        else if (k == "tau_overrides") {
            for (const auto& [qt, days] : v.items())
                cfg.fusion.tau_overrides_ms[qt] = static_cast<std::int64_t>(
                    as_num(days, "fusion.tau_overrides." + qt) *
                    static_cast<double>(kDayMs));
        } else if (k == "beta") cfg.fusion.beta = as_num(v, "fusion.beta");
        else if (k == "recency_qtypes") {
            for (const auto& qt : v)
                cfg.fusion.recency_qtypes.insert(
                    as_str(qt, "fusion.recency_qtypes[]"));
        } else if (k == "apply_bonus_when_qtype_unknown")
            cfg.fusion.apply_bonus_when_qtype_unknown =
                as_bool(v, "fusion.apply_bonus_when_qtype_unknown");
        else bad_key("fusion", k);
    }
}

void parse_cascade(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "conf_threshold")
            cfg.cascade.conf_threshold = as_num(v, "cascade.conf_threshold");
        else if (k == "per_qtype_thresholds") {
            for (const auto& [qt, tau] : v.items())
                cfg.cascade.per_qtype_thresholds[qt] =
                    as_num(tau, "cascade.per_qtype_thresholds." + qt);
        } else if (k == "use_qtype_classifier")
            cfg.cascade.use_qtype_classifier =
                as_bool(v, "cascade.use_qtype_classifier");
        else if (k == "proxy")
            cfg.cascade.proxy = proxy_from_name(as_str(v, "cascade.proxy"));
        else if (k == "skip_cost_ms")
            cfg.cascade.skip_cost_ms = as_num(v, "cascade.skip_cost_ms");
        else if (k == "escalate_cost_ms")
            cfg.cascade.escalate_cost_ms = as_num(v, "cascade.escalate_cost_ms");
        else bad_key("cascade", k);
    }
}

void parse_router(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "epochs")
            cfg.router.epochs =
                static_cast<std::uint32_t>(as_num(v, "router.epochs"));
        else if (k == "learning_rate")
            cfg.router.learning_rate = as_num(v, "router.learning_rate");
        else if (k == "l2") cfg.router.l2 = as_num(v, "router.l2");
        else if (k == "seed")
            cfg.router.seed = static_cast<std::uint64_t>(
                as_num(v, "router.seed"));
        else if (k == "use_dense_features")
            cfg.router.use_dense_features =
                as_bool(v, "router.use_dense_features");
        else if (k == "dense_dim")
            cfg.router.dense_dim =
                static_cast<std::uint32_t>(as_num(v, "router.dense_dim"));
        else if (k == "best_system") {
            for (const auto& [qt, sys] : v.items())
                cfg.best_system[qt] = as_str(sys, "router.best_system." + qt);
        } else bad_key("router", k);
    }
}

void parse_workload(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "n_records")
            cfg.workload.n_records =
                static_cast<std::uint64_t>(as_num(v, "workload.n_records"));
        else if (k == "seed")
            cfg.workload.seed =
                static_cast<std::uint64_t>(as_num(v, "workload.seed"));
        else if (k == "recency_mass")
            cfg.workload.recency_mass = as_num(v, "workload.recency_mass");
        else if (k == "recency_window")
            cfg.workload.recency_window = as_num(v, "workload.recency_window");
        else if (k == "vocab_size")
            cfg.workload.vocab_size =
                static_cast<std::uint32_t>(as_num(v, "workload.vocab_size"));
        else if (k == "zipf_s")
            cfg.workload.zipf_s = as_num(v, "workload.zipf_s");
        else if (k == "min_doc_tokens")
            cfg.workload.min_doc_tokens = static_cast<std::uint32_t>(
                as_num(v, "workload.min_doc_tokens"));
        else if (k == "max_doc_tokens")
            cfg.workload.max_doc_tokens = static_cast<std::uint32_t>(
                as_num(v, "workload.max_doc_tokens"));
        else if (k == "n_sessions")
            cfg.workload.n_sessions =
                static_cast<std::uint32_t>(as_num(v, "workload.n_sessions"));
        else if (k == "n_agents")
            cfg.workload.n_agents =
                static_cast<std::uint32_t>(as_num(v, "workload.n_agents"));
        else if (k == "time_span_days")
            cfg.workload.time_span_ms = static_cast<std::int64_t>(
                as_num(v, "workload.time_span_days") *
                static_cast<double>(kDayMs));
        else if (k == "t0_ms")
            cfg.workload.t0_ms =
                static_cast<std::int64_t>(as_num(v, "workload.t0_ms"));
        else bad_key("workload", k);
    }
}

void parse_queries(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "n_queries")
            cfg.query.n_queries =
                static_cast<std::uint64_t>(as_num(v, "queries.n_queries"));
        else if (k == "min_terms")
            cfg.query.min_terms =
                static_cast<std::uint32_t>(as_num(v, "queries.min_terms"));
        else if (k == "max_terms")
            cfg.query.max_terms =
                static_cast<std::uint32_t>(as_num(v, "queries.max_terms"));
        else if (k == "paraphrase_noise")
            cfg.query.paraphrase_noise = as_num(v, "queries.paraphrase_noise");
        else if (k == "seed")
            cfg.query.seed =
                static_cast<std::uint64_t>(as_num(v, "queries.seed"));
        else bad_key("queries", k);
    }
}

void parse_session(const json& j, RunConfig& cfg) {
    for (const auto& [k, v] : j.items()) {
        if (k == "turns")
            cfg.session.turns =
                static_cast<std::uint32_t>(as_num(v, "session.turns"));
        else if (k == "corpus_start")
            cfg.session.corpus_start =
                static_cast<std::uint64_t>(as_num(v, "session.corpus_start"));
        else if (k == "corpus_end")
            cfg.session.corpus_end =
                static_cast<std::uint64_t>(as_num(v, "session.corpus_end"));
        else if (k == "poisson_lambda")
            cfg.session.poisson_lambda = as_num(v, "session.poisson_lambda");
        else if (k == "jitter_sigma")
            cfg.session.jitter_sigma = as_num(v, "session.jitter_sigma");
        else if (k == "budget_ms")
            cfg.session.budget_ms = as_num(v, "session.budget_ms");
        else bad_key("session", k);
    }
}

}  // namespace

const char* proxy_name(ConfidenceProxy p) {
    switch (p) {
        case ConfidenceProxy::Margin: return "margin";
        case ConfidenceProxy::Top1Fraction: return "top1_fraction";
        case ConfidenceProxy::EntropyComplement: return "entropy_complement";
        case ConfidenceProxy::Classifier: return "classifier";
    }
    return "margin";
}

ConfidenceProxy proxy_from_name(const std::string& name) {
    if (name == "margin") return ConfidenceProxy::Margin;
    if (name == "top1_fraction") return ConfidenceProxy::Top1Fraction;
    if (name == "entropy_complement") return ConfidenceProxy::EntropyComplement;
    if (name == "classifier") return ConfidenceProxy::Classifier;
    throw std::runtime_error("unknown confidence proxy: " + name);
}

RunConfig parse_config(const std::string& json_text) {
    RunConfig cfg;
    json doc = json::parse(json_text);
    if (!doc.is_object())
        throw std::runtime_error("config root must be a JSON object");
    for (const auto& [section, body] : doc.items()) {
        if (section == "tokenizer") parse_tokenizer(body, cfg);
        else if (section == "bm25") parse_bm25(body, cfg);
        else if (section == "temporal") parse_temporal(body, cfg);
        else if (section == "fusion") parse_fusion(body, cfg);
        else if (section == "cascade") parse_cascade(body, cfg);
        else if (section == "router") parse_router(body, cfg);
        else if (section == "workload") parse_workload(body, cfg);
        else if (section == "queries") parse_queries(body, cfg);
        else if (section == "session") parse_session(body, cfg);
        else throw std::runtime_error("unknown config section: " + section);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    if (path.empty() || path == "-") return RunConfig{};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_env_overrides(RunConfig& cfg) {
    auto get = [](const char* name) -> const char* {
        return std::getenv(name);
    };
    if (const char* v = get("HYBRID_TOK_MODE"))
        cfg.tok_mode = tokenizer_mode_from_name(v);
    if (const char* v = get("HYBRID_BM25_K1")) cfg.bm25.k1 = std::stod(v);
    if (const char* v = get("HYBRID_BM25_B")) cfg.bm25.b = std::stod(v);
    if (const char* v = get("HYBRID_TEMPORAL_EPSILON"))
        cfg.temporal.epsilon = std::stod(v);
    if (const char* v = get("HYBRID_TEMPORAL_LAMBDA"))
        cfg.temporal.lambda_hat = std::stod(v);
    if (const char* v = get("HYBRID_TEMPORAL_WINDOW_DAYS"))
        cfg.temporal.window_ms =
            static_cast<std::int64_t>(std::stod(v) * 24.0 * 3600.0 * 1000.0);
    if (const char* v = get("HYBRID_TEMPORAL_KMAX"))
        cfg.temporal.k_max_partitions =
            static_cast<std::uint32_t>(std::stoul(v));
    if (const char* v = get("HYBRID_FUSION_KRRF"))
        cfg.fusion.k_rrf = std::stod(v);
    if (const char* v = get("HYBRID_FUSION_ALPHA"))
        cfg.fusion.alpha = std::stod(v);
    if (const char* v = get("HYBRID_FUSION_TAU_DAYS"))
        cfg.fusion.tau_ms =
            static_cast<std::int64_t>(std::stod(v) * 24.0 * 3600.0 * 1000.0);
    if (const char* v = get("HYBRID_FUSION_BETA"))
        cfg.fusion.beta = std::stod(v);
    if (const char* v = get("HYBRID_CASCADE_TAU"))
        cfg.cascade.conf_threshold = std::stod(v);
    if (const char* v = get("HYBRID_CASCADE_PROXY"))
        cfg.cascade.proxy = proxy_from_name(v);
    if (const char* v = get("HYBRID_SEED")) {
        std::uint64_t s = std::stoull(v);
        cfg.workload.seed = s;
        cfg.query.seed = s;
        cfg.router.seed = s;
    }
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["tokenizer"]["mode"] = tokenizer_mode_name(cfg.tok_mode);
    j["bm25"]["k1"] = cfg.bm25.k1;
    j["bm25"]["b"] = cfg.bm25.b;
    j["temporal"]["window_days"] =
        static_cast<double>(cfg.temporal.window_ms) / kDayMs;
    j["temporal"]["epsilon"] = cfg.temporal.epsilon;
    j["temporal"]["lambda_hat"] = cfg.temporal.lambda_hat;
    j["temporal"]["k_max_partitions"] = cfg.temporal.k_max_partitions;
    j["fusion"]["k_rrf"] = cfg.fusion.k_rrf;
    j["fusion"]["alpha"] = cfg.fusion.alpha;
    j["fusion"]["tau_days"] = static_cast<double>(cfg.fusion.tau_ms) / kDayMs;
    j["fusion"]["beta"] = cfg.fusion.beta;
    j["fusion"]["apply_bonus_when_qtype_unknown"] =
        cfg.fusion.apply_bonus_when_qtype_unknown;
    j["fusion"]["tau_overrides"] = json::object();
    for (const auto& [qt, tau] : cfg.fusion.tau_overrides_ms)
        j["fusion"]["tau_overrides"][qt] = static_cast<double>(tau) / kDayMs;
    j["fusion"]["recency_qtypes"] = json::array();
    for (const auto& qt : cfg.fusion.recency_qtypes)
        j["fusion"]["recency_qtypes"].push_back(qt);
    j["cascade"]["conf_threshold"] = cfg.cascade.conf_threshold;
    j["cascade"]["per_qtype_thresholds"] = json::object();
    for (const auto& [qt, tau] : cfg.cascade.per_qtype_thresholds)
        j["cascade"]["per_qtype_thresholds"][qt] = tau;
    j["cascade"]["use_qtype_classifier"] = cfg.cascade.use_qtype_classifier;
    j["cascade"]["proxy"] = proxy_name(cfg.cascade.proxy);
    j["cascade"]["skip_cost_ms"] = cfg.cascade.skip_cost_ms;
    j["cascade"]["escalate_cost_ms"] = cfg.cascade.escalate_cost_ms;
    j["router"]["epochs"] = cfg.router.epochs;
    j["router"]["learning_rate"] = cfg.router.learning_rate;
    j["router"]["l2"] = cfg.router.l2;
    j["router"]["seed"] = cfg.router.seed;
    j["router"]["use_dense_features"] = cfg.router.use_dense_features;
    j["router"]["dense_dim"] = cfg.router.dense_dim;
    j["router"]["best_system"] = json::object();
    for (const auto& [qt, sys] : cfg.best_system)
        j["router"]["best_system"][qt] = sys;
    j["workload"]["n_records"] = cfg.workload.n_records;
    j["workload"]["seed"] = cfg.workload.seed;
    j["workload"]["recency_mass"] = cfg.workload.recency_mass;
    j["workload"]["recency_window"] = cfg.workload.recency_window;
    j["workload"]["vocab_size"] = cfg.workload.vocab_size;
    j["workload"]["zipf_s"] = cfg.workload.zipf_s;
    j["workload"]["min_doc_tokens"] = cfg.workload.min_doc_tokens;
    j["workload"]["max_doc_tokens"] = cfg.workload.max_doc_tokens;
    j["workload"]["n_sessions"] = cfg.workload.n_sessions;
    j["workload"]["n_agents"] = cfg.workload.n_agents;
    j["workload"]["time_span_days"] =
        static_cast<double>(cfg.workload.time_span_ms) / kDayMs;
    j["workload"]["t0_ms"] = cfg.workload.t0_ms;
    j["queries"]["n_queries"] = cfg.query.n_queries;
    j["queries"]["min_terms"] = cfg.query.min_terms;
    j["queries"]["max_terms"] = cfg.query.max_terms;
    j["queries"]["paraphrase_noise"] = cfg.query.paraphrase_noise;
    j["queries"]["seed"] = cfg.query.seed;
    j["session"]["turns"] = cfg.session.turns;
    j["session"]["corpus_start"] = cfg.session.corpus_start;
    j["session"]["corpus_end"] = cfg.session.corpus_end;
    j["session"]["poisson_lambda"] = cfg.session.poisson_lambda;
    j["session"]["jitter_sigma"] = cfg.session.jitter_sigma;
    j["session"]["budget_ms"] = cfg.session.budget_ms;
    return j.dump();  // nlohmann objects iterate in sorted key order
}

std::string config_hash(const RunConfig& cfg) {
    std::string s = config_to_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace hybrid
