// hybridmem: single-binary driver for the retrieval substrate.
// Subcommands: gen-corpus, gen-queries, build, search, bench-scaling,
// bench-cascade, eval, train-router, simulate-session.

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>

#include "hybrid/bridge.hpp"
#include "hybrid/cascade.hpp"
#include "hybrid/config.hpp"
#include "hybrid/csr_index.hpp"
#include "hybrid/dense.hpp"
#include "hybrid/eval.hpp"
#include "hybrid/fusion.hpp"
#include "hybrid/io.hpp"
#include "hybrid/router.hpp"
#include "hybrid/session_sim.hpp"
#include "hybrid/temporal_index.hpp"
#include "hybrid/workload.hpp"

using namespace hybrid;

namespace {

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(
               steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_csv(const std::string& path, const RunConfig& cfg,
                       const std::string& columns) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# config_hash=" << config_hash(cfg) << '\n' << columns << '\n';
    return out;
}

// Index-order work queue; each job writes its own slot, so the gathered
// output is identical at any worker count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::string query_text(const GeneratedQuery& q) {
    std::string s;
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
        if (i) s += ' ';
        s += q.terms[i];
    }
    return s;
}

void report_latency(const std::vector<double>& samples_ms) {
    if (samples_ms.empty()) return;
    std::vector<double> v = samples_ms;
    std::sort(v.begin(), v.end());
    auto pct = [&](double p) {
        std::size_t i = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(v.size())));
        return v[i ? i - 1 : 0];
    };
    std::fprintf(stderr, "latency ms (warm): p50=%.4f p95=%.4f p99=%.4f\n",
                 pct(0.50), pct(0.95), pct(0.99));
}

EmbeddingMatrix embed_corpus(const std::vector<MemoryRecord>& corpus,
                             std::uint32_t dim, std::uint64_t seed) {
    EmbeddingMatrix m;
    m.dim = dim;
    for (const auto& r : corpus) m.add(r.id, hash_embed(r.text, dim, seed));
    return m;
}

std::map<std::string, std::string> default_best_system(
    const std::vector<std::pair<std::string, std::string>>& labeled,
    const std::map<std::string, std::string>& configured) {
    std::map<std::string, std::string> best = configured;
    for (const auto& [_, qtype] : labeled)
        if (!best.count(qtype))
            best[qtype] = qtype == "paraphrase" ? "dense" : "bm25";
    return best;
}

struct StatsRow {
    std::uint64_t postings = 0;
    std::uint32_t partitions = 0;
    bool escalated = false;
};

// ---- subcommands -------------------------------------------------------

int cmd_gen_corpus(const RunConfig& cfg, const std::string& out) {
    auto corpus = gen_corpus(cfg.workload);
    save_corpus_jsonl(corpus, out);
    std::fprintf(stderr, "wrote %zu records to %s\n", corpus.size(),
                 out.c_str());
    return 0;
}

int cmd_gen_queries(const RunConfig& cfg, const std::string& corpus_path,
                    const std::string& out, const std::string& qrels_out) {
    auto corpus = load_corpus_jsonl(corpus_path);
    auto queries = gen_queries(corpus, cfg.query, cfg.workload);
    save_queries_tsv(queries, out);
    if (!qrels_out.empty()) {
        std::map<std::string, std::map<DocId, double>> qrels;
        for (std::size_t i = 0; i < queries.size(); ++i)
            for (DocId d : queries[i].gold)
                qrels["q" + std::to_string(i + 1)][d] = 1.0;
        save_qrels_trec(qrels, qrels_out);
    }
    std::fprintf(stderr, "wrote %zu queries to %s\n", queries.size(),
                 out.c_str());
    return 0;
}

int cmd_build(const RunConfig& cfg, const std::string& corpus_path,
              const std::string& out, bool temporal, std::size_t chunk) {
    auto corpus = load_corpus_jsonl(corpus_path);
    double t0 = now_ms();
    if (temporal) {
        auto idx = build_temporal_index(corpus, cfg.temporal, cfg.tok_mode,
                                        cfg.bm25, chunk);
        save_temporal_index(idx, out);
    } else {
        std::vector<std::pair<DocId, std::string>> docs;
        docs.reserve(corpus.size());
        for (const auto& r : corpus) docs.emplace_back(r.id, r.text);
        auto idx = build_index(docs, cfg.tok_mode, chunk, cfg.bm25);
        save_index(idx, out);
    }
    double dt = now_ms() - t0;
    std::fprintf(stderr, "built %zu docs in %.1f ms (%.0f docs/sec)\n",
                 corpus.size(), dt,
                 dt > 0 ? 1000.0 * static_cast<double>(corpus.size()) / dt
                        : 0.0);
    return 0;
}

int cmd_search(const RunConfig& cfg, const std::string& index_path,
               const std::string& corpus_path, const std::string& queries_path,
               const std::string& mode, std::size_t k, const std::string& out,
               const std::string& stats_out, const std::string& router_path,
               unsigned workers, std::uint32_t dense_dim,
               std::uint64_t embed_seed, const std::string& tag) {
    bool want_temporal_index = mode == "temporal";
    bool want_dense = mode == "dense" || mode == "rrf" || mode == "agent_rrf" ||
                      mode == "soft" || mode == "cascade";
    bool want_records = mode == "agent_rrf" || mode == "cascade";

    CsrIndex flat;
    TemporalIndex temporal;
    {
        std::ifstream probe(index_path, std::ios::binary);
        char magic[4] = {0};
        probe.read(magic, 4);
        bool is_temporal_file = std::string(magic, 4) == "HTIX";
        if (want_temporal_index != is_temporal_file)
            throw std::runtime_error(
                "mode/index mismatch: mode '" + mode + "' needs a " +
                (want_temporal_index ? "temporal (HTIX)" : "flat (HIDX)") +
                " index, got " + index_path);
    }
    if (want_temporal_index) temporal = load_temporal_index(index_path);
    else flat = load_index(index_path);

    std::vector<MemoryRecord> corpus;
    std::unordered_map<DocId, const MemoryRecord*> by_id;
    EmbeddingMatrix emb;
    if (want_dense || want_records) {
        if (corpus_path.empty())
            throw std::runtime_error("mode '" + mode + "' needs --corpus");
        corpus = load_corpus_jsonl(corpus_path);
        for (const auto& r : corpus) by_id[r.id] = &r;
        emb = embed_corpus(corpus, dense_dim, embed_seed);
    }
    RecordLookup lookup = [&](DocId d) -> const MemoryRecord* {
        auto it = by_id.find(d);
        return it == by_id.end() ? nullptr : it->second;
    };
    RouterModel router;
    bool has_router = false;
    if (!router_path.empty()) {
        std::ifstream rin(router_path);
        if (!rin) throw std::runtime_error("cannot open " + router_path);
        std::stringstream ss;
        ss << rin.rdbuf();
        router = RouterModel::from_json(ss.str());
        has_router = true;
    }
    if (mode == "soft" && !has_router)
        throw std::runtime_error("mode 'soft' needs --router");

    auto queries = load_queries_tsv(queries_path);
    std::vector<RankedList> results(queries.size());
    std::vector<StatsRow> stats(queries.size());

    auto run_one = [&](std::size_t i, bool record) {
        const GeneratedQuery& q = queries[i];
        SearchStats ss;
        TemporalStats ts;
        RankedList r;
        bool escalated = false;
        if (mode == "bm25") {
            r = flat.bm25_topk(q.terms, k, cfg.bm25, &ss);
        } else if (mode == "maxscore") {
            r = flat.bm25_topk_maxscore(q.terms, k, cfg.bm25, &ss);
        } else if (mode == "temporal") {
            r = temporal.topk(q.terms, k, cfg.bm25, &ts);
        } else if (mode == "dense") {
            r = dense_topk(emb, hash_embed(query_text(q), dense_dim,
                                           embed_seed), k);
        } else if (mode == "rrf") {
            auto a = flat.bm25_topk_maxscore(q.terms, k, cfg.bm25, &ss);
            auto b = dense_topk(emb, hash_embed(query_text(q), dense_dim,
                                                embed_seed), k);
            r = rrf({a, b}, cfg.fusion.k_rrf);
            r.sort_and_truncate(k);
        } else if (mode == "agent_rrf") {
            auto a = flat.bm25_topk_maxscore(q.terms, k, cfg.bm25, &ss);
            auto b = dense_topk(emb, hash_embed(query_text(q), dense_dim,
                                                embed_seed), k);
            std::optional<std::string> qtype;
            if (!q.qtype.empty()) qtype = q.qtype;
            r = agent_rrf(a, b, lookup, q.ts_ms, qtype, cfg.fusion);
            r.sort_and_truncate(k);
        } else if (mode == "soft") {
            auto decision = classify(router, query_text(q));
            std::map<std::string, RankedList> per_system;
            per_system["bm25"] =
                flat.bm25_topk_maxscore(q.terms, k, cfg.bm25, &ss);
            per_system["dense"] = dense_topk(
                emb, hash_embed(query_text(q), dense_dim, embed_seed), k);
            r = route_soft(decision, per_system, cfg.fusion.k_rrf);
            r.sort_and_truncate(k);
        } else if (mode == "cascade") {
            RetrieveFn bm25_fn = [&](std::size_t kk) {
                return flat.bm25_topk_maxscore(q.terms, kk, cfg.bm25, &ss);
            };
            RetrieveFn dense_fn = [&](std::size_t kk) {
                return dense_topk(emb, hash_embed(query_text(q), dense_dim,
                                                  embed_seed), kk);
            };
            QtypeFn qtype_fn = nullptr;
            if (cfg.cascade.use_qtype_classifier) {
                qtype_fn = [&]() {
                    QtypePrediction p;
                    if (has_router) {
                        auto d = classify(router, query_text(q));
                        p.qtype = d.predicted_qtype;
                        p.best_system = d.chosen_system;
                    } else {
                        p.qtype = q.qtype;
                        auto it = cfg.best_system.find(q.qtype);
                        p.best_system =
                            it != cfg.best_system.end() ? it->second : "bm25";
                    }
                    return p;
                };
            }
            auto d = cascade_retrieve(k, cfg.cascade, bm25_fn, dense_fn,
                                      lookup, q.ts_ms, cfg.fusion, qtype_fn);
            r = std::move(d.results);
            escalated = d.escalated;
        } else {
            throw std::runtime_error("unknown search mode: " + mode);
        }
        if (record) {
            results[i] = std::move(r);
            stats[i] = {mode == "temporal" ? ts.postings_touched
                                           : ss.postings_touched,
                        ts.partitions_searched, escalated};
        }
    };

    // warm-up pass (discarded), then the measured pass
    for (std::size_t i = 0; i < std::min<std::size_t>(queries.size(), 32); ++i)
        run_one(i, false);
    std::vector<double> lat(queries.size());
    parallel_for(queries.size(), workers, [&](std::size_t i) {
        double t0 = now_ms();
        run_one(i, true);
        lat[i] = now_ms() - t0;
    });
    report_latency(lat);

    std::vector<std::pair<std::string, RankedList>> run;
    run.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i)
        run.emplace_back("q" + std::to_string(i + 1), results[i]);
    save_run_trec(run, tag.empty() ? mode : tag, out);
    if (!stats_out.empty()) {
        auto csv = open_csv(stats_out, cfg,
                            "qid,postings_touched,partitions_searched,"
                            "escalated");
        for (std::size_t i = 0; i < queries.size(); ++i)
            csv << 'q' << i + 1 << ',' << stats[i].postings << ','
                << stats[i].partitions << ',' << (stats[i].escalated ? 1 : 0)
                << '\n';
    }
    return 0;
}

int cmd_bench_scaling(const RunConfig& cfg,
                      const std::vector<std::uint64_t>& sizes,
                      std::uint64_t n_queries, const std::string& out,
                      bool wall_clock) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw std::runtime_error("--sizes must be strictly ascending");
    std::string cols =
        "size,seq_postings,maxscore_postings,temporal_postings,"
        "temporal_searched_pct";
    if (wall_clock) cols += ",seq_ms,maxscore_ms,temporal_ms";
    auto csv = open_csv(out, cfg, cols);
    for (std::uint64_t n : sizes) {
        WorkloadSpec ws = cfg.workload;
        ws.n_records = n;
        // constant arrival rate: the span grows with the corpus so partition
        // sizes stay bounded (the regime the partition budget assumes)
        ws.time_span_ms = static_cast<std::int64_t>(
            static_cast<double>(cfg.workload.time_span_ms) *
            static_cast<double>(n) /
            static_cast<double>(std::max<std::uint64_t>(1,
                                                        cfg.workload.n_records)));
        auto corpus = gen_corpus(ws);
        QuerySpec qs = cfg.query;
        qs.n_queries = n_queries;
        auto queries = gen_queries(corpus, qs, ws);
        std::vector<std::pair<DocId, std::string>> docs;
        docs.reserve(corpus.size());
        for (const auto& r : corpus) docs.emplace_back(r.id, r.text);
        auto flat = build_index(docs, cfg.tok_mode, 50000, cfg.bm25);
        auto temporal =
            build_temporal_index(corpus, cfg.temporal, cfg.tok_mode, cfg.bm25);
        std::uint64_t seq = 0, ms = 0, tp = 0;
        double seq_ms = 0, ms_ms = 0, tp_ms = 0;
        for (const auto& q : queries) {
            SearchStats s1, s2;
            TemporalStats s3;
            double t0 = now_ms();
            flat.bm25_topk(q.terms, 10, cfg.bm25, &s1);
            double t1 = now_ms();
            flat.bm25_topk_maxscore(q.terms, 10, cfg.bm25, &s2);
            double t2 = now_ms();
            temporal.topk(q.terms, 10, cfg.bm25, &s3);
            double t3 = now_ms();
            seq += s1.postings_touched;
            ms += s2.postings_touched;
            tp += s3.postings_touched;
            seq_ms += t1 - t0;
            ms_ms += t2 - t1;
            tp_ms += t3 - t2;
        }
        double nq = static_cast<double>(queries.size());
        double pct = seq ? 100.0 * static_cast<double>(tp) /
                               static_cast<double>(seq)
                         : 0.0;
        csv << n << ',' << seq << ',' << ms << ',' << tp << ',' << fmt(pct);
        if (wall_clock)
            csv << ',' << fmt(seq_ms / nq) << ',' << fmt(ms_ms / nq) << ','
                << fmt(tp_ms / nq);
        csv << '\n';
        std::fprintf(stderr, "N=%llu done\n",
                     static_cast<unsigned long long>(n));
    }
    return 0;
}

int cmd_bench_cascade(const RunConfig& cfg, const std::string& corpus_path,
                      const std::string& queries_path,
                      const std::vector<double>& grid, std::size_t k,
                      std::uint32_t dense_dim, std::uint64_t embed_seed,
                      const std::string& out) {
    auto corpus = load_corpus_jsonl(corpus_path);
    auto queries = load_queries_tsv(queries_path);
    std::unordered_map<DocId, const MemoryRecord*> by_id;
    for (const auto& r : corpus) by_id[r.id] = &r;
    RecordLookup lookup = [&](DocId d) -> const MemoryRecord* {
        auto it = by_id.find(d);
        return it == by_id.end() ? nullptr : it->second;
    };
    auto emb = embed_corpus(corpus, dense_dim, embed_seed);
    std::vector<std::pair<DocId, std::string>> docs;
    docs.reserve(corpus.size());
    for (const auto& r : corpus) docs.emplace_back(r.id, r.text);
    auto flat = build_index(docs, cfg.tok_mode, 50000, cfg.bm25);

    std::vector<PreparedQuery> prepared;
    prepared.reserve(queries.size());
    for (const auto& q : queries) {
        PreparedQuery p;
        auto sparse = flat.bm25_topk_maxscore(q.terms, k, cfg.bm25);
        auto densel = dense_topk(
            emb, hash_embed(query_text(q), dense_dim, embed_seed), k);
        std::vector<double> scores;
        for (const auto& [_, s] : sparse.entries) scores.push_back(s);
        p.skip_results = sparse;
        std::optional<std::string> qtype;
        if (!q.qtype.empty()) qtype = q.qtype;
        p.escalate_results =
            agent_rrf(sparse, densel, lookup, q.ts_ms, qtype, cfg.fusion);
        p.escalate_results.sort_and_truncate(k);
        p.confidence =
            confidence(scores, cfg.cascade.proxy, cfg.cascade.epsilon_guard);
        p.gold = q.gold;
        p.qtype = q.qtype;
        prepared.push_back(std::move(p));
    }
    QualityMetric metric = [k](const RankedList& r,
                               const std::set<DocId>& gold) {
        double v = mrr_at_k(r, gold, k);
        return v < 0 ? 0.0 : v;
    };
    auto rows = sweep_thresholds(prepared, grid, metric,
                                 cfg.cascade.skip_cost_ms,
                                 cfg.cascade.escalate_cost_ms);
    auto csv = open_csv(out, cfg, "tau_c,skip_rate,amortized_ms,metric");
    for (const auto& r : rows)
        csv << fmt(r.tau_c) << ',' << fmt(r.skip_rate) << ','
            << fmt(r.amortized_ms) << ',' << fmt(r.quality) << '\n';
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& run_path,
             const std::string& qrels_path, std::size_t k,
             const std::string& baseline_path, std::uint32_t resamples,
             std::uint64_t seed, const std::string& out) {
    auto run = load_run_trec(run_path);
    auto qrels_raw = load_qrels_trec(qrels_path);
    Qrels qrels;
    for (const auto& [qid, docs] : qrels_raw)
        for (const auto& [doc, rel] : docs)
            qrels[qid][doc] = static_cast<std::uint32_t>(rel);

    for (const auto& [qid, _] : run)
        if (!qrels.count(qid))
            std::fprintf(stderr, "warning: %s has no qrels\n", qid.c_str());
    for (const auto& [qid, _] : qrels)
        if (!run.count(qid))
            std::fprintf(stderr, "warning: %s missing from run\n", qid.c_str());

    auto metrics_for = [&](const std::map<std::string, RankedList>& r,
                           const std::string& qid) {
        static const std::map<DocId, std::uint32_t> kEmpty;
        auto qit = qrels.find(qid);
        const auto& rels = qit == qrels.end() ? kEmpty : qit->second;
        std::set<DocId> gold;
        for (const auto& [doc, rel] : rels)
            if (rel > 0) gold.insert(doc);
        auto rit = r.find(qid);
        static const RankedList kEmptyList;
        const RankedList& list = rit == r.end() ? kEmptyList : rit->second;
        return std::array<double, 4>{ndcg_at_k(list, rels, k),
                                     recall_at_k(list, gold, k),
                                     mrr_at_k(list, gold, k),
                                     hit_at_k(list, gold, k)};
    };

    auto csv = open_csv(out, cfg, "qid,ndcg,recall,mrr,hit");
    std::vector<double> ndcgs;
    std::array<std::vector<double>, 4> per_metric;
    for (const auto& [qid, _] : run) {
        auto m = metrics_for(run, qid);
        csv << qid;
        for (std::size_t i = 0; i < 4; ++i) {
            csv << ',' << fmt(m[i]);
            per_metric[i].push_back(m[i]);
        }
        csv << '\n';
        ndcgs.push_back(m[0]);
    }
    csv << "aggregate";
    for (std::size_t i = 0; i < 4; ++i) {
        auto agg = aggregate(per_metric[i]);
        csv << ',' << fmt(agg.mean);
        if (i == 0)
            std::fprintf(stderr, "ndcg@%zu mean=%.4f (%zu excluded)\n", k,
                         agg.mean, agg.excluded);
    }
    csv << '\n';

    if (!baseline_path.empty()) {
        auto base = load_run_trec(baseline_path);
        std::vector<double> a, b;
        for (const auto& [qid, _] : run) {
            if (!base.count(qid) || !qrels.count(qid)) continue;
            double va = metrics_for(run, qid)[0];
            double vb = metrics_for(base, qid)[0];
            if (va < 0 || vb < 0) continue;
            a.push_back(va);
            b.push_back(vb);
        }
        auto bs = paired_bootstrap(a, b, resamples, seed);
        csv << "bootstrap_delta," << fmt(bs.delta_mean) << ','
            << fmt(bs.ci_low) << ',' << fmt(bs.ci_high) << ','
            << fmt(bs.p_value) << '\n';
        std::fprintf(stderr,
                     "delta=%.4f ci=[%.4f,%.4f] p=%.4f (capped %.4f)\n",
                     bs.delta_mean, bs.ci_low, bs.ci_high, bs.p_value,
                     bs.p_value_capped);
    }
    return 0;
}

int cmd_train_router(const RunConfig& cfg, const std::string& data_path,
                     const std::string& out) {
    std::ifstream in(data_path);
    if (!in) throw std::runtime_error("cannot open " + data_path);
    std::vector<std::pair<std::string, std::string>> labeled;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(data_path + ":" + std::to_string(lineno) +
                                     ": expected query\\tqtype");
        labeled.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    auto best = default_best_system(labeled, cfg.best_system);
    std::vector<double> losses;
    auto model = train_router(labeled, cfg.router, best, &losses);
    std::ofstream mout(out, std::ios::trunc);
    if (!mout) throw std::runtime_error("cannot write " + out);
    mout << model.to_json();
    std::fprintf(stderr, "trained on %zu examples, final loss %.6f\n",
                 labeled.size(), losses.empty() ? 0.0 : losses.back());
    return 0;
}

int cmd_simulate_session(const RunConfig& cfg, std::uint64_t seed,
                         const std::string& bench_csv,
                         const std::string& out) {
    std::map<std::string, LatencyCurve> curves;
    if (!bench_csv.empty()) {
        // wall-clock bench-scaling rows: log-log interpolation per strategy
        std::ifstream in(bench_csv);
        if (!in) throw std::runtime_error("cannot open " + bench_csv);
        std::string line;
        std::vector<std::array<double, 4>> rows;  // size, seq, ms, temporal
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("size", 0) == 0)
                continue;
            std::array<double, 8> c{};
            std::istringstream ss(line);
            std::string cell;
            std::size_t i = 0;
            while (std::getline(ss, cell, ',') && i < 8) c[i++] = std::stod(cell);
            if (i < 8)
                throw std::runtime_error(
                    "bench CSV lacks wall-clock columns; re-run "
                    "bench-scaling with --wall-clock");
            rows.push_back({c[0], c[5], c[6], c[7]});
        }
        if (rows.size() < 2)
            throw std::runtime_error("bench CSV needs at least two sizes");
        auto interp = [rows](std::size_t col) {
            return [rows, col](std::uint64_t n) {
                double x = std::log(static_cast<double>(std::max<std::uint64_t>(n, 1)));
                std::size_t i = 1;
                while (i + 1 < rows.size() && rows[i][0] < static_cast<double>(n))
                    ++i;
                double x0 = std::log(rows[i - 1][0]), x1 = std::log(rows[i][0]);
                double y0 = std::log(std::max(rows[i - 1][col], 1e-9));
                double y1 = std::log(std::max(rows[i][col], 1e-9));
                double t = (x - x0) / (x1 - x0);
                return std::exp(y0 + t * (y1 - y0));
            };
        };
        curves["sequential"] = interp(1);
        curves["maxscore"] = interp(2);
        curves["temporal"] = interp(3);
    } else {
        // analytic desk-scale stand-ins: linear scans grow with N, the
        // partition-bounded path stays near-flat
        curves["sequential"] = [](std::uint64_t n) { return 5e-5 * static_cast<double>(n); };
        curves["maxscore"] = [](std::uint64_t n) { return 1.5e-5 * static_cast<double>(n); };
        curves["temporal"] = [](std::uint64_t n) {
            return 0.4 + 0.03 * std::log2(static_cast<double>(n) + 1.0);
        };
    }
    auto results = simulate_session_strategies(cfg.session, curves, seed);
    auto csv = open_csv(out, cfg,
                        "strategy,cumulative_s,p99_ms_per_step,"
                        "pct_over_budget,p99_us_per_q");
    for (const auto& [name, r] : results)
        csv << name << ',' << fmt(r.cumulative_s) << ','
            << fmt(r.p99_ms_per_step) << ',' << fmt(r.pct_over_budget) << ','
            << fmt(r.p99_us_per_q) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workload-adaptive hybrid retrieval for agent memory"};
    app.require_subcommand(1);

    std::string config_path, corpus, queries, index_path, out, qrels, stats_out;
    std::string mode = "bm25", router_path, baseline, tag, bench_csv;
    std::size_t k = 10, chunk = 50000;
    unsigned workers = 1;
    bool temporal = false, wall_clock = false;
    std::uint64_t seed_opt = 0, n_records = 0, n_queries = 0;
    bool seed_set = false;
    std::uint32_t dense_dim = 64, resamples = 10000;
    std::uint64_t embed_seed = 42;
    std::vector<std::uint64_t> sizes;
    std::vector<double> grid;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t v) { seed_opt = v; seed_set = true; },
        "override every module seed");

    auto* gc = app.add_subcommand("gen-corpus", "synthetic JSONL corpus");
    gc->add_option("--n", n_records, "record count");
    gc->add_option("--out", out)->required();

    auto* gq = app.add_subcommand("gen-queries", "recency-biased query TSV");
    gq->add_option("--corpus", corpus)->required();
    gq->add_option("--n", n_queries, "query count");
    double paraphrase = -1.0;
    gq->add_option("--paraphrase", paraphrase, "paraphrase probability");
    gq->add_option("--qrels", qrels, "also emit TREC qrels");
    gq->add_option("--out", out)->required();

    auto* bld = app.add_subcommand("build", "build and persist an index");
    bld->add_option("--corpus", corpus)->required();
    bld->add_flag("--temporal", temporal, "partitioned temporal index");
    bld->add_option("--chunk-size", chunk);
    bld->add_option("--out", out)->required();

    auto* se = app.add_subcommand("search", "query an index, emit a TREC run");
    se->add_option("--index", index_path)->required();
    se->add_option("--corpus", corpus, "needed by dense/fusion/cascade modes");
    se->add_option("--queries", queries)->required();
    se->add_option("--mode", mode,
                   "bm25|maxscore|temporal|dense|rrf|agent_rrf|soft|cascade");
    se->add_option("--k", k);
    se->add_option("--router", router_path, "router model JSON");
    se->add_option("--workers", workers);
    se->add_option("--dense-dim", dense_dim);
    se->add_option("--embed-seed", embed_seed);
    se->add_option("--tag", tag, "run tag (defaults to the mode)");
    se->add_option("--stats", stats_out, "per-query stats sidecar CSV");
    se->add_option("--out", out)->required();

    auto* bs = app.add_subcommand("bench-scaling", "postings/latency vs N");
    bs->add_option("--sizes", sizes, "ascending corpus sizes")->required();
    std::uint64_t bench_queries = 200;
    bs->add_option("--queries-per-size", bench_queries);
    bs->add_flag("--wall-clock", wall_clock, "add measured latency columns");
    bs->add_option("--out", out)->required();

    auto* bc = app.add_subcommand("bench-cascade", "threshold sweep CSV");
    bc->add_option("--corpus", corpus)->required();
    bc->add_option("--queries", queries)->required();
    bc->add_option("--grid", grid, "threshold grid")->required();
    bc->add_option("--k", k);
    bc->add_option("--dense-dim", dense_dim);
    bc->add_option("--embed-seed", embed_seed);
    bc->add_option("--out", out)->required();

    auto* ev = app.add_subcommand("eval", "metrics over a TREC run");
    ev->add_option("--run", index_path)->required();
    ev->add_option("--qrels", qrels)->required();
    ev->add_option("--k", k);
    ev->add_option("--baseline", baseline, "second run for paired bootstrap");
    ev->add_option("--resamples", resamples);
    ev->add_option("--out", out)->required();

    auto* tr = app.add_subcommand("train-router", "fit the qtype classifier");
    tr->add_option("--data", corpus, "TSV: query \\t qtype")->required();
    tr->add_option("--out", out)->required();

    auto* sim = app.add_subcommand("simulate-session", "agent session model");
    sim->add_option("--bench", bench_csv,
                    "wall-clock bench-scaling CSV to fit curves from");
    sim->add_option("--out", out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        apply_env_overrides(cfg);
        if (seed_set) {
            cfg.workload.seed = seed_opt;
            cfg.query.seed = seed_opt;
            cfg.router.seed = seed_opt;
        }
        if (gc->parsed()) {
            if (n_records) cfg.workload.n_records = n_records;
            return cmd_gen_corpus(cfg, out);
        }
        if (gq->parsed()) {
            if (n_queries) cfg.query.n_queries = n_queries;
            if (paraphrase >= 0.0) cfg.query.paraphrase_noise = paraphrase;
            return cmd_gen_queries(cfg, corpus, out, qrels);
        }
        if (bld->parsed())
            return cmd_build(cfg, corpus, out, temporal, chunk);
        if (se->parsed())
            return cmd_search(cfg, index_path, corpus, queries, mode, k, out,
                              stats_out, router_path, workers, dense_dim,
                              embed_seed, tag);
        if (bs->parsed())
            return cmd_bench_scaling(cfg, sizes, bench_queries, out,
                                     wall_clock);
        if (bc->parsed())
            return cmd_bench_cascade(cfg, corpus, queries, grid, k, dense_dim,
                                     embed_seed, out);
        if (ev->parsed())
            return cmd_eval(cfg, index_path, qrels, k, baseline, resamples,
                            seed_set ? seed_opt : 42, out);
        if (tr->parsed()) return cmd_train_router(cfg, corpus, out);
        if (sim->parsed())
            return cmd_simulate_session(cfg, seed_set ? seed_opt : 42,
                                        bench_csv, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
