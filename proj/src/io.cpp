#include "hybrid/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hybrid {

using nlohmann::json;

namespace {

// ---- little-endian primitives ------------------------------------------

void put_u8(std::ostream& os, std::uint8_t v) {
    os.put(static_cast<char>(v));
}

void put_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::ostream& os, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_i64(std::ostream& os, std::int64_t v) {
    put_u64(os, static_cast<std::uint64_t>(v));
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

[[noreturn]] void truncated(const std::string& what) {
    throw std::runtime_error("index file truncated reading " + what);
}

std::uint8_t get_u8(std::istream& is, const char* what) {
    int c = is.get();
    if (c == EOF) truncated(what);
    return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(get_u8(is, what)) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is, const char* what) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(get_u8(is, what)) << (8 * i);
    return v;
}

std::int64_t get_i64(std::istream& is, const char* what) {
    return static_cast<std::int64_t>(get_u64(is, what));
}

double get_f64(std::istream& is, const char* what) {
    std::uint64_t bits = get_u64(is, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string get_str(std::istream& is, const char* what) {
    std::uint32_t n = get_u32(is, what);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (static_cast<std::uint32_t>(is.gcount()) != n) truncated(what);
    return s;
}

// ---- HIDX body (shared by flat and temporal containers) ----------------

void write_index_body(std::ostream& os, const CsrIndex& idx) {
    os.write("HIDX", 4);
    put_u32(os, 1);  // version
    put_u8(os, static_cast<std::uint8_t>(idx.mode));
    put_u8(os, static_cast<std::uint8_t>(idx.tok_mode));
    put_f64(os, idx.build_params.k1);
    put_f64(os, idx.build_params.b);
    put_str(os, kIdfConvention);
    put_f64(os, idx.avgdl);
    put_u32(os, static_cast<std::uint32_t>(idx.terms.size()));
    put_u32(os, idx.num_docs());
    put_u64(os, idx.num_postings());
    for (const auto& t : idx.terms) put_str(os, t);
    for (auto v : idx.term_offsets) put_u64(os, v);
    for (auto v : idx.posting_rows) put_u32(os, v);
    for (auto v : idx.posting_weights) put_f64(os, v);
    for (auto v : idx.term_idfs) put_f64(os, v);
    for (auto v : idx.term_maxscores) put_f64(os, v);
    for (auto v : idx.term_order_keys) put_f64(os, v);
    for (auto v : idx.doc_lens) put_u32(os, v);
    for (auto v : idx.doc_ids) put_u64(os, v);
}

CsrIndex read_index_body(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, "HIDX", 4) != 0)
        throw std::runtime_error("not an index file (bad magic)");
    std::uint32_t version = get_u32(is, "version");
    if (version != 1)
        throw std::runtime_error("unsupported index version " +
                                 std::to_string(version));
    CsrIndex idx;
    idx.mode = static_cast<IndexMode>(get_u8(is, "mode"));
    idx.tok_mode = static_cast<TokenizerMode>(get_u8(is, "tokenizer mode"));
    idx.build_params.k1 = get_f64(is, "k1");
    idx.build_params.b = get_f64(is, "b");
    std::string conv = get_str(is, "idf convention");
    if (conv != kIdfConvention)
        throw std::runtime_error("unsupported idf convention: " + conv);
    idx.avgdl = get_f64(is, "avgdl");
    std::uint32_t nterms = get_u32(is, "term count");
    std::uint32_t ndocs = get_u32(is, "doc count");
    std::uint64_t nposts = get_u64(is, "posting count");
    idx.terms.reserve(nterms);
    for (std::uint32_t i = 0; i < nterms; ++i) {
        idx.terms.push_back(get_str(is, "term"));
        idx.vocab[idx.terms.back()] = i;
    }
    idx.term_offsets.resize(nterms + 1);
    for (auto& v : idx.term_offsets) v = get_u64(is, "term offsets");
    idx.posting_rows.resize(nposts);
    for (auto& v : idx.posting_rows) v = get_u32(is, "posting rows");
    idx.posting_weights.resize(nposts);
    for (auto& v : idx.posting_weights) v = get_f64(is, "posting weights");
    idx.term_idfs.resize(nterms);
    for (auto& v : idx.term_idfs) v = get_f64(is, "idfs");
    idx.term_maxscores.resize(nterms);
    for (auto& v : idx.term_maxscores) v = get_f64(is, "maxscores");
    idx.term_order_keys.resize(nterms);
    for (auto& v : idx.term_order_keys) v = get_f64(is, "order keys");
    idx.doc_lens.resize(ndocs);
    for (auto& v : idx.doc_lens) v = get_u32(is, "doc lens");
    idx.doc_ids.resize(ndocs);
    for (auto& v : idx.doc_ids) v = get_u64(is, "doc ids");
    return idx;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

// 1970-01-01-based day number (Gregorian, proleptic).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    int era = (y >= 0 ? y : y - 399) / 400;
    int yoe = y - era * 400;
    int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097LL + doe - 719468;
}

std::int64_t civil_ms(int y, int mo, int d, int h, int mi) {
    return ((days_from_civil(y, mo, d) * 24 + h) * 60 + mi) * 60000LL;
}

// "2023/05/20 (Sat) 02:21" or a "YYYY/MM/DD" prefix.
std::int64_t parse_lme_date(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    if (std::sscanf(s.c_str(), "%d/%d/%d", &y, &mo, &d) != 3) return 0;
    auto colon = s.find(':');
    if (colon != std::string::npos && colon >= 2)
        std::sscanf(s.c_str() + colon - 2, "%d:%d", &h, &mi);
    return civil_ms(y, mo, d, h, mi);
}

int month_from_name(const std::string& name) {
    static const char* kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                    "jul", "aug", "sep", "oct", "nov", "dec"};
    std::string low;
    for (char c : name)
        low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (int i = 0; i < 12; ++i)
        if (low.rfind(kMonths[i], 0) == 0) return i + 1;
    return 0;
}

// "1:56 pm on 8 May, 2023" (the LoCoMo session_*_date_time shape).
std::int64_t parse_locomo_date(const std::string& s) {
    int h = 0, mi = 0, d = 0, y = 0;
    char ampm[3] = {0};
    char month[16] = {0};
    if (std::sscanf(s.c_str(), "%d:%d %2s on %d %15[^,], %d", &h, &mi, ampm,
                    &d, month, &y) != 6)
        return 0;
    if ((ampm[0] == 'p' || ampm[0] == 'P') && h != 12) h += 12;
    if ((ampm[0] == 'a' || ampm[0] == 'A') && h == 12) h = 0;
    int mo = month_from_name(month);
    if (mo == 0) return 0;
    return civil_ms(y, mo, d, h, mi);
}

}  // namespace

void save_index(const CsrIndex& idx, const std::string& path) {
    auto out = open_out(path);
    write_index_body(out, idx);
    if (!out) throw std::runtime_error("write failed: " + path);
}

CsrIndex load_index(const std::string& path) {
    auto in = open_in(path);
    return read_index_body(in);
}

void save_temporal_index(const TemporalIndex& idx, const std::string& path) {
    auto out = open_out(path);
    out.write("HTIX", 4);
    put_u32(out, 1);
    put_i64(out, idx.params.window_ms);
    put_f64(out, idx.params.epsilon);
    put_f64(out, idx.params.lambda_hat);
    put_u32(out, idx.params.k_max_partitions);
    put_u64(out, idx.total_docs);
    put_f64(out, idx.shared.avgdl);
    // shared maps in sorted key order so the file is deterministic
    std::map<std::string, double> idf(idx.shared.idf.begin(),
                                      idx.shared.idf.end());
    std::map<std::string, double> ord(idx.shared.order_key.begin(),
                                      idx.shared.order_key.end());
    put_u64(out, idf.size());
    for (const auto& [t, v] : idf) { put_str(out, t); put_f64(out, v); }
    put_u64(out, ord.size());
    for (const auto& [t, v] : ord) { put_str(out, t); put_f64(out, v); }
    put_u32(out, idx.num_partitions());
    // partition directory: window bounds + blob sizes, then the blobs
    std::vector<std::string> blobs;
    blobs.reserve(idx.partitions.size());
    for (const auto& p : idx.partitions) {
        std::ostringstream ss(std::ios::binary);
        write_index_body(ss, p.index);
        blobs.push_back(ss.str());
        put_i64(out, p.window_start);
        put_i64(out, p.window_end);
        put_u64(out, blobs.back().size());
    }
    for (const auto& b : blobs)
        out.write(b.data(), static_cast<std::streamsize>(b.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

TemporalIndex load_temporal_index(const std::string& path) {
    auto in = open_in(path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "HTIX", 4) != 0)
        throw std::runtime_error("not a temporal index file (bad magic)");
    std::uint32_t version = get_u32(in, "version");
    if (version != 1)
        throw std::runtime_error("unsupported temporal index version " +
                                 std::to_string(version));
    TemporalIndex idx;
    idx.params.window_ms = get_i64(in, "window");
    idx.params.epsilon = get_f64(in, "epsilon");
    idx.params.lambda_hat = get_f64(in, "lambda");
    idx.params.k_max_partitions = get_u32(in, "k_max");
    idx.total_docs = get_u64(in, "total docs");
    idx.shared.avgdl = get_f64(in, "avgdl");
    std::uint64_t n = get_u64(in, "idf count");
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string t = get_str(in, "idf term");
        idx.shared.idf[t] = get_f64(in, "idf value");
    }
    n = get_u64(in, "order-key count");
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string t = get_str(in, "order-key term");
        idx.shared.order_key[t] = get_f64(in, "order-key value");
    }
    std::uint32_t nparts = get_u32(in, "partition count");
    struct Dir { std::int64_t start, end; std::uint64_t size; };
    std::vector<Dir> dir(nparts);
    for (auto& d : dir) {
        d.start = get_i64(in, "window start");
        d.end = get_i64(in, "window end");
        d.size = get_u64(in, "partition size");
    }
    for (const auto& d : dir) {
        TemporalIndex::Partition p;
        p.window_start = d.start;
        p.window_end = d.end;
        std::string blob(d.size, '\0');
        in.read(blob.data(), static_cast<std::streamsize>(d.size));
        if (static_cast<std::uint64_t>(in.gcount()) != d.size)
            truncated("partition blob");
        std::istringstream ss(blob, std::ios::binary);
        p.index = read_index_body(ss);
        idx.partitions.push_back(std::move(p));
    }
    return idx;
}

std::vector<MemoryRecord> load_corpus_jsonl(const std::string& path) {
    auto in = open_in(path);
    std::vector<MemoryRecord> out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            MemoryRecord r;
            r.id = j.at("id").get<DocId>();
            r.text = j.at("text").get<std::string>();
            r.role = role_from_name(j.value("role", "user"));
            r.session = j.value("session", "");
            r.agent = j.value("agent", "");
            r.tool_type = j.value("tool_type", "");
            r.ts_ms = j.value("ts_ms", std::int64_t{0});
            r.weight = j.value("weight", 0.0);
            if (j.contains("embedding"))
                r.embedding = j["embedding"].get<std::vector<float>>();
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": " + e.what());
        }
    }
    return out;
}

void save_corpus_jsonl(const std::vector<MemoryRecord>& records,
                       const std::string& path) {
    auto out = open_out(path);
    for (const auto& r : records) {
        json j;
        j["id"] = r.id;
        j["text"] = r.text;
        j["role"] = role_name(r.role);
        j["session"] = r.session;
        j["agent"] = r.agent;
        if (!r.tool_type.empty()) j["tool_type"] = r.tool_type;
        j["ts_ms"] = r.ts_ms;
        j["weight"] = r.weight;
        if (!r.embedding.empty()) j["embedding"] = r.embedding;
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<GeneratedQuery> load_queries_tsv(const std::string& path) {
    auto in = open_in(path);
    std::vector<GeneratedQuery> out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            std::size_t tab = line.find('\t', pos);
            cols.push_back(line.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (cols.size() < 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected at least 3 tab columns");
        GeneratedQuery q;
        std::istringstream terms(cols[0]);
        std::string term;
        while (terms >> term) q.terms.push_back(term);
        std::istringstream gold(cols[1]);
        std::string id;
        while (std::getline(gold, id, ','))
            if (!id.empty()) q.gold.insert(std::stoull(id));
        q.ts_ms = std::stoll(cols[2]);
        if (cols.size() > 3) q.qtype = cols[3];
        out.push_back(std::move(q));
    }
    return out;
}

void save_queries_tsv(const std::vector<GeneratedQuery>& queries,
                      const std::string& path) {
    auto out = open_out(path);
    for (const auto& q : queries) {
        for (std::size_t i = 0; i < q.terms.size(); ++i) {
            if (i) out << ' ';
            out << q.terms[i];
        }
        out << '\t';
        bool first = true;
        for (DocId d : q.gold) {
            if (!first) out << ',';
            out << d;
            first = false;
        }
        out << '\t' << q.ts_ms << '\t' << q.qtype << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, std::map<DocId, double>> load_qrels_trec(
    const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, std::map<DocId, double>> out;
    std::string qid, iter, docid;
    double rel;
    while (in >> qid >> iter >> docid >> rel) out[qid][std::stoull(docid)] = rel;
    return out;
}

void save_qrels_trec(
    const std::map<std::string, std::map<DocId, double>>& qrels,
    const std::string& path) {
    auto out = open_out(path);
    for (const auto& [qid, docs] : qrels)
        for (const auto& [doc, rel] : docs)
            out << qid << " 0 " << doc << ' ' << rel << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, RankedList> load_run_trec(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, RankedList> out;
    std::string qid, q0, docid, tag;
    std::uint64_t rank;
    double score;
    while (in >> qid >> q0 >> docid >> rank >> score >> tag)
        out[qid].entries.emplace_back(std::stoull(docid), score);
    return out;
}

void save_run_trec(const std::vector<std::pair<std::string, RankedList>>& run,
                   const std::string& tag, const std::string& path) {
    auto out = open_out(path);
    char buf[64];
    for (const auto& [qid, list] : run) {
        std::uint64_t rank = 1;
        for (const auto& [doc, score] : list.entries) {
            // %.17g round-trips doubles, keeping re-runs byte comparable
            std::snprintf(buf, sizeof buf, "%.17g", score);
            out << qid << " Q0 " << doc << ' ' << rank++ << ' ' << buf << ' '
                << tag << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<MemoryRecord> load_longmemeval_json(const std::string& path) {
    auto in = open_in(path);
    json doc = json::parse(in);
    if (doc.is_object()) doc = json::array({doc});
    std::vector<MemoryRecord> out;
    DocId next_id = 0;
    for (const auto& item : doc) {
        std::string qid = item.value("question_id", "q");
        const auto& sessions = item.at("haystack_sessions");
        const auto dates = item.value("haystack_dates", json::array());
        const auto sess_ids = item.value("haystack_session_ids", json::array());
        for (std::size_t s = 0; s < sessions.size(); ++s) {
            std::int64_t ts = 0;
            if (s < dates.size() && dates[s].is_string())
                ts = parse_lme_date(dates[s].get<std::string>());
            std::string session = s < sess_ids.size() && sess_ids[s].is_string()
                                      ? sess_ids[s].get<std::string>()
                                      : qid + "_s" + std::to_string(s);
            for (const auto& turn : sessions[s]) {
                MemoryRecord r;
                r.id = next_id++;
                r.text = turn.value("content", "");
                r.role = role_from_name(turn.value("role", "user"));
                r.session = session;
                r.agent = qid;
                r.ts_ms = ts;
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

std::vector<MemoryRecord> load_locomo_json(const std::string& path) {
    auto in = open_in(path);
    json doc = json::parse(in);
    if (doc.is_object()) doc = json::array({doc});
    std::vector<MemoryRecord> out;
    DocId next_id = 0;
    std::size_t sample_i = 0;
    for (const auto& item : doc) {
        const json& conv =
            item.contains("conversation") ? item["conversation"] : item;
        std::string speaker_a = conv.value("speaker_a", "");
        for (int s = 1;; ++s) {
            std::string key = "session_" + std::to_string(s);
            if (!conv.contains(key)) break;
            std::int64_t ts = 0;
            std::string date_key = key + "_date_time";
            if (conv.contains(date_key) && conv[date_key].is_string())
                ts = parse_locomo_date(conv[date_key].get<std::string>());
            for (const auto& turn : conv[key]) {
                MemoryRecord r;
                r.id = next_id++;
                r.text = turn.value("text", "");
                std::string speaker = turn.value("speaker", "");
                r.role = speaker == speaker_a ? Role::User : Role::Assistant;
                r.agent = speaker;
                r.session = "locomo_" + std::to_string(sample_i) + "_" + key;
                r.ts_ms = ts;
                out.push_back(std::move(r));
            }
        }
        ++sample_i;
    }
    return out;
}

}  // namespace hybrid
