#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include "hybrid/config.hpp"
#include "hybrid/io.hpp"
#include "hybrid/rng.hpp"

using namespace hybrid;

namespace {

constexpr std::int64_t kDay = 24LL * 3600 * 1000;

std::string tmp_path(const char* name) {
    return std::string("/tmp/hybridmem_test_") + name;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::trunc);
    out << body;
}

std::vector<std::pair<DocId, std::string>> toy_docs() {
    return {{0, "cat cat fish bowl"},
            {1, "dog leash walk"},
            {2, "cat dog dog park"},
            {3, "cat fish tank"},
            {4, "cat cat cat dog"}};
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("empty document parses to the shipped defaults") {
    auto cfg = parse_config("{}");
    RunConfig defaults;
    CHECK(config_to_json(cfg) == config_to_json(defaults));
    CHECK(cfg.tok_mode == TokenizerMode::Stopword);
    CHECK(cfg.bm25.k1 == 1.2);
    CHECK(cfg.bm25.b == 0.75);
    CHECK(cfg.temporal.window_ms == 7 * kDay);
    CHECK(cfg.fusion.k_rrf == 60.0);
    CHECK(cfg.fusion.alpha == 0.005);
    CHECK(cfg.fusion.tau_ms == 30 * kDay);
    CHECK(cfg.fusion.beta == 0.0);
    CHECK(cfg.cascade.conf_threshold == 0.10);
    CHECK(cfg.cascade.skip_cost_ms == 0.4);
    CHECK(cfg.cascade.escalate_cost_ms == 53.2);
    CHECK(cfg.router.epochs == 500);
    CHECK(cfg.workload.n_records == 4052);
}

TEST_CASE("unknown keys and sections are named in the error") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"bm25": {"k9": 1.0}})"),
                         "unknown config key: bm25.k9", std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"bm52": {}})"),
                         "unknown config section: bm52", std::runtime_error);
    CHECK_THROWS(parse_config(R"({"bm25": {"k1": "fast"}})"));
    CHECK_THROWS(parse_config(R"([1, 2])"));
}

TEST_CASE("day-valued keys convert to milliseconds") {
    auto cfg = parse_config(R"({
        "temporal": {"window_days": 3},
        "fusion": {"tau_days": 45,
                   "tau_overrides": {"temporal-reasoning": 120}},
        "workload": {"time_span_days": 14}
    })");
    CHECK(cfg.temporal.window_ms == 3 * kDay);
    CHECK(cfg.fusion.tau_ms == 45 * kDay);
    CHECK(cfg.fusion.tau_overrides_ms.at("temporal-reasoning") == 120 * kDay);
    CHECK(cfg.workload.time_span_ms == 14 * kDay);
}

TEST_CASE("environment overrides are applied after parsing") {
    setenv("HYBRID_TOK_MODE", "nltk", 1);
    setenv("HYBRID_CASCADE_TAU", "0.25", 1);
    setenv("HYBRID_SEED", "99", 1);
    RunConfig cfg;
    apply_env_overrides(cfg);
    unsetenv("HYBRID_TOK_MODE");
    unsetenv("HYBRID_CASCADE_TAU");
    unsetenv("HYBRID_SEED");
    CHECK(cfg.tok_mode == TokenizerMode::PorterFull);
    CHECK(cfg.cascade.conf_threshold == 0.25);
    CHECK(cfg.workload.seed == 99);
    CHECK(cfg.query.seed == 99);
    CHECK(cfg.router.seed == 99);
}

TEST_CASE("config hash is stable, hex, and value sensitive") {
    RunConfig a, b;
    auto h = config_hash(a);
    CHECK(h.size() == 16);
    for (char c : h) CHECK(std::string("0123456789abcdef").find(c) !=
                           std::string::npos);
    CHECK(config_hash(b) == h);
    b.bm25.k1 = 1.21;
    CHECK(config_hash(b) != h);
}

TEST_CASE("proxy names round trip and reject garbage") {
    for (auto p : {ConfidenceProxy::Margin, ConfidenceProxy::Top1Fraction,
                   ConfidenceProxy::EntropyComplement,
                   ConfidenceProxy::Classifier})
        CHECK(proxy_from_name(proxy_name(p)) == p);
    CHECK_THROWS(proxy_from_name("vibes"));
}

TEST_CASE("index container round trips byte-equivalently") {
    auto idx = build_index(toy_docs(), TokenizerMode::Minimal);
    auto path = tmp_path("idx.bin");
    save_index(idx, path);
    auto loaded = load_index(path);
    CHECK(loaded.mode == idx.mode);
    CHECK(loaded.tok_mode == idx.tok_mode);
    CHECK(loaded.build_params.k1 == idx.build_params.k1);
    CHECK(loaded.build_params.b == idx.build_params.b);
    CHECK(loaded.terms == idx.terms);
    CHECK(loaded.term_offsets == idx.term_offsets);
    CHECK(loaded.posting_rows == idx.posting_rows);
    CHECK(loaded.posting_weights == idx.posting_weights);
    CHECK(loaded.term_idfs == idx.term_idfs);
    CHECK(loaded.term_maxscores == idx.term_maxscores);
    CHECK(loaded.term_order_keys == idx.term_order_keys);
    CHECK(loaded.doc_lens == idx.doc_lens);
    CHECK(loaded.doc_ids == idx.doc_ids);
    CHECK(loaded.avgdl == idx.avgdl);
    auto a = idx.bm25_topk({"cat", "dog"}, 5, Bm25Params{});
    auto b = loaded.bm25_topk({"cat", "dog"}, 5, Bm25Params{});
    CHECK(a.entries == b.entries);
    std::remove(path.c_str());
}

TEST_CASE("truncated index files are rejected") {
    auto idx = build_index(toy_docs(), TokenizerMode::Minimal);
    auto path = tmp_path("idx_trunc.bin");
    save_index(idx, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    write_file(path, bytes.substr(0, bytes.size() - 9));
    CHECK_THROWS(load_index(path));
    std::remove(path.c_str());
}

TEST_CASE("temporal container preserves search results") {
    std::mt19937_64 rng(3);
    std::vector<MemoryRecord> records;
    for (DocId d = 0; d < 200; ++d) {
        MemoryRecord r;
        r.id = d;
        for (int t = 0; t < 8; ++t)
            r.text += "t" + std::to_string(uniform_u64(rng, 30)) + " ";
        r.ts_ms = static_cast<std::int64_t>(uniform_u64(rng, 28 * kDay));
        records.push_back(std::move(r));
    }
    auto idx = build_temporal_index(records, TemporalParams{},
                                    TokenizerMode::Minimal);
    auto path = tmp_path("tidx.bin");
    save_temporal_index(idx, path);
    auto loaded = load_temporal_index(path);
    CHECK(loaded.num_partitions() == idx.num_partitions());
    CHECK(loaded.total_docs == idx.total_docs);
    Bm25Params p;
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::string> q{"t" + std::to_string(uniform_u64(rng, 30)),
                                   "t" + std::to_string(uniform_u64(rng, 30))};
        CHECK(loaded.topk(q, 5, p).entries == idx.topk(q, 5, p).entries);
    }
    std::remove(path.c_str());
}

TEST_CASE("corpus jsonl round trips including optional fields") {
    std::vector<MemoryRecord> records(3);
    records[0] = {0, "hello world", {}, Role::User, "s1", "a1", "", 123, 0.5};
    records[1] = {7, "ran a search", {0.5f, -0.25f}, Role::ToolOutput, "s1",
                  "a2", "search", 456, 0.9};
    records[2] = {9, "plan next step", {}, Role::Planning, "s2", "a1", "",
                  789, 0.1};
    auto path = tmp_path("corpus.jsonl");
    save_corpus_jsonl(records, path);
    auto loaded = load_corpus_jsonl(path);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].id == records[i].id);
        CHECK(loaded[i].text == records[i].text);
        CHECK(loaded[i].embedding == records[i].embedding);
        CHECK(loaded[i].role == records[i].role);
        CHECK(loaded[i].session == records[i].session);
        CHECK(loaded[i].agent == records[i].agent);
        CHECK(loaded[i].tool_type == records[i].tool_type);
        CHECK(loaded[i].ts_ms == records[i].ts_ms);
        CHECK(loaded[i].weight == records[i].weight);
    }
    std::remove(path.c_str());
}

TEST_CASE("malformed corpus lines report the line number") {
    auto path = tmp_path("corpus_bad.jsonl");
    write_file(path,
               R"({"id": 1, "text": "fine"})"
               "\nnot json at all\n");
    try {
        load_corpus_jsonl(path);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("query tsv round trips; the qtype column is optional") {
    std::vector<GeneratedQuery> queries(2);
    queries[0].terms = {"w1", "w2", "w3"};
    queries[0].gold = {4, 9};
    queries[0].ts_ms = 1700000001234;
    queries[0].qtype = "lexical";
    queries[1].terms = {"syn_w5"};
    queries[1].gold = {11};
    queries[1].ts_ms = 1700000005678;
    queries[1].qtype = "paraphrase";
    auto path = tmp_path("queries.tsv");
    save_queries_tsv(queries, path);
    auto loaded = load_queries_tsv(path);
    REQUIRE(loaded.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(loaded[i].terms == queries[i].terms);
        CHECK(loaded[i].gold == queries[i].gold);
        CHECK(loaded[i].ts_ms == queries[i].ts_ms);
        CHECK(loaded[i].qtype == queries[i].qtype);
    }
    write_file(path, "w1 w2\t3,4\t1000\n");
    auto bare = load_queries_tsv(path);
    REQUIRE(bare.size() == 1);
    CHECK(bare[0].qtype.empty());
    CHECK(bare[0].gold == std::set<DocId>{3, 4});
    std::remove(path.c_str());
}

TEST_CASE("trec qrels and run files round trip") {
    std::map<std::string, std::map<DocId, double>> qrels;
    qrels["q1"] = {{3, 2.0}, {8, 1.0}};
    qrels["q2"] = {{5, 1.0}};
    auto qpath = tmp_path("qrels.txt");
    save_qrels_trec(qrels, qpath);
    CHECK(load_qrels_trec(qpath) == qrels);
    std::remove(qpath.c_str());

    std::vector<std::pair<std::string, RankedList>> run(1);
    run[0].first = "q1";
    run[0].second.entries = {{3, 1.0 / 3.0}, {8, 0.12345678901234567}};
    auto rpath = tmp_path("run.txt");
    save_run_trec(run, "bm25", rpath);
    auto loaded = load_run_trec(rpath);
    REQUIRE(loaded.count("q1") == 1);
    CHECK(loaded["q1"].entries == run[0].second.entries);  // %.17g round trip
    std::remove(rpath.c_str());
}

TEST_CASE("longmemeval layout maps to memory records") {
    auto path = tmp_path("lme.json");
    write_file(path, R"([{
        "question_id": "q42",
        "haystack_dates": ["2023/05/20 (Sat) 02:21", "2023/05/21 (Sun) 10:00"],
        "haystack_session_ids": ["sess_a", "sess_b"],
        "haystack_sessions": [
            [{"role": "user", "content": "where did I park"},
             {"role": "assistant", "content": "level 3"}],
            [{"role": "user", "content": "thanks"}]
        ]
    }])");
    auto records = load_longmemeval_json(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].text == "where did I park");
    CHECK(records[0].role == Role::User);
    CHECK(records[1].role == Role::Assistant);
    CHECK(records[0].session == "sess_a");
    CHECK(records[2].session == "sess_b");
    CHECK(records[0].agent == "q42");
    CHECK(records[0].ts_ms > 0);
    CHECK(records[0].ts_ms == records[1].ts_ms);
    CHECK(records[2].ts_ms > records[0].ts_ms);
    std::remove(path.c_str());
}

TEST_CASE("locomo layout maps speakers to roles") {
    auto path = tmp_path("locomo.json");
    write_file(path, R"([{
        "conversation": {
            "speaker_a": "Caroline",
            "speaker_b": "Melanie",
            "session_1_date_time": "1:56 pm on 8 May, 2023",
            "session_1": [
                {"speaker": "Caroline", "text": "hi Mel"},
                {"speaker": "Melanie", "text": "hey Caroline"}
            ],
            "session_2_date_time": "3:10 pm on 9 May, 2023",
            "session_2": [
                {"speaker": "Caroline", "text": "about yesterday"}
            ]
        }
    }])");
    auto records = load_locomo_json(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].role == Role::User);
    CHECK(records[1].role == Role::Assistant);
    CHECK(records[0].agent == "Caroline");
    CHECK(records[1].agent == "Melanie");
    CHECK(records[0].session == "locomo_0_session_1");
    CHECK(records[2].session == "locomo_0_session_2");
    CHECK(records[0].ts_ms > 0);
    CHECK(records[2].ts_ms > records[0].ts_ms);
    std::remove(path.c_str());
}

}  // TEST_SUITE
