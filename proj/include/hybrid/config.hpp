#pragma once

#include <string>

#include "hybrid/cascade.hpp"
#include "hybrid/csr_index.hpp"
#include "hybrid/fusion.hpp"
#include "hybrid/router.hpp"
#include "hybrid/session_sim.hpp"
#include "hybrid/temporal_index.hpp"
#include "hybrid/tokenizer.hpp"
#include "hybrid/workload.hpp"

namespace hybrid {

/// One declarative document covering every module's knobs. Defaults are the
/// shipped cookbook values; a config file overrides them section by section
/// and unknown keys are an error.
struct RunConfig {
    TokenizerMode tok_mode = TokenizerMode::Stopword;
    Bm25Params bm25;
    TemporalParams temporal;
    FusionParams fusion;
    CascadeConfig cascade;
    RouterTrainConfig router;
    std::map<std::string, std::string> best_system;  // qtype -> system
    WorkloadSpec workload;
    QuerySpec query;
    SessionSpec session;
};

/// Parse a JSON config document; throws std::runtime_error naming the first
/// unknown key or ill-typed value.
RunConfig parse_config(const std::string& json_text);

/// parse_config over a file; "-" or "" yields the defaults.
RunConfig load_config(const std::string& path);

/// HYBRID_-prefixed environment overrides (HYBRID_TOK_MODE, HYBRID_BM25_K1,
/// HYBRID_CASCADE_TAU, ...). Applied after file parsing; bad values throw.
void apply_env_overrides(RunConfig& cfg);

/// Canonical JSON rendering (sorted keys) of the effective config.
std::string config_to_json(const RunConfig& cfg);

/// FNV-1a 64-bit hash of the canonical rendering, as 16 hex digits; embedded
/// in CSV headers so every output names the config that produced it.
std::string config_hash(const RunConfig& cfg);

const char* proxy_name(ConfidenceProxy p);
ConfidenceProxy proxy_from_name(const std::string& name);

}  // namespace hybrid
