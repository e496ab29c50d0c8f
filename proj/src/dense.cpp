#include "hybrid/dense.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "hybrid/tokenizer.hpp"

namespace hybrid {

namespace {

constexpr char kMagic[4] = {'H', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void normalize(std::vector<float>& v) {
    double n = 0.0;
    for (float x : v) n += static_cast<double>(x) * x;
    n = std::sqrt(n);
    if (n > 0.0)
        for (float& x : v) x = static_cast<float>(x / n);
}

[[noreturn]] void malformed(const std::string& path, std::uint64_t offset,
                            const char* what) {
    throw std::runtime_error(path + ": malformed embedding file at byte " +
                             std::to_string(offset) + " (" + what + ")");
}

}  // namespace

void EmbeddingMatrix::add(DocId id, const std::vector<float>& v) {
    if (dim == 0) dim = static_cast<std::uint32_t>(v.size());
    if (v.size() != dim)
        throw std::invalid_argument("embedding dimension mismatch");
    doc_ids.push_back(id);
    data.insert(data.end(), v.begin(), v.end());
}

std::vector<float> hash_embed(std::string_view text, std::uint32_t dim,
                              std::uint64_t seed) {
    if (dim < 8) throw std::invalid_argument("dim must be >= 8");
    std::vector<float> v(dim, 0.0f);
    // Synonym-aware test embedder: the "syn_" marker is erased before
    // tokenization (the tokenizer would otherwise split on '_'), so a
    // paraphrased query embeds identically to its original.
    std::string cleaned(text);
    for (std::size_t pos = cleaned.find("syn_"); pos != std::string::npos;
         pos = cleaned.find("syn_", pos))
        cleaned.erase(pos, 4);
    auto tokens = tokenize(cleaned, TokenizerMode::Minimal);
    bool any = false;
    for (const auto& tok : tokens) {
        std::string_view t = tok;
        std::uint64_t h = fnv1a(t, seed);
        std::uint32_t slot = static_cast<std::uint32_t>(h % dim);
        float sign = (h >> 63) ? -1.0f : 1.0f;
        v[slot] += sign;
        any = true;
    }
    if (!any) {
        v[0] = 1.0f;  // documented degenerate for empty input
        return v;
    }
    normalize(v);
    // cancellation can zero the vector; fall back to the same degenerate
    double n = 0.0;
    for (float x : v) n += static_cast<double>(x) * x;
    if (n == 0.0) v[0] = 1.0f;
    return v;
}

RankedList dense_topk(const EmbeddingMatrix& matrix,
                      const std::vector<float>& query_vec, std::size_t k) {
    if (query_vec.size() != matrix.dim)
        throw std::invalid_argument("query dimension mismatch");
    RankedList out;
    out.entries.reserve(matrix.count());
    for (std::size_t i = 0; i < matrix.count(); ++i) {
        const float* r = matrix.row(i);
        double dot = 0.0;
        for (std::uint32_t j = 0; j < matrix.dim; ++j)
            dot += static_cast<double>(r[j]) * query_vec[j];
        out.entries.emplace_back(matrix.doc_ids[i], dot);
    }
    out.sort_and_truncate(k);
    return out;
}

void save_embeddings(const EmbeddingMatrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write(kMagic, 4);
    std::uint32_t version = kVersion, dim = m.dim;
    std::uint64_t count = m.count();
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&dim), 4);
    f.write(reinterpret_cast<const char*>(&count), 8);
    for (std::size_t i = 0; i < m.count(); ++i) {
        f.write(reinterpret_cast<const char*>(&m.doc_ids[i]), 8);
        f.write(reinterpret_cast<const char*>(m.row(i)),
                static_cast<std::streamsize>(m.dim * sizeof(float)));
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

EmbeddingMatrix load_embeddings(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        malformed(path, 0, "bad magic");
    std::uint32_t version = 0, dim = 0;
    std::uint64_t count = 0;
    if (!f.read(reinterpret_cast<char*>(&version), 4))
        malformed(path, 4, "truncated header");
    if (version != kVersion) malformed(path, 4, "unsupported version");
    if (!f.read(reinterpret_cast<char*>(&dim), 4))
        malformed(path, 8, "truncated header");
    if (!f.read(reinterpret_cast<char*>(&count), 8))
        malformed(path, 12, "truncated header");

    EmbeddingMatrix m;
    m.dim = dim;
    m.doc_ids.reserve(count);
    m.data.reserve(count * dim);
    std::uint64_t offset = 20;
    std::size_t warned = 0;
    std::vector<float> row(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        DocId id = 0;
        if (!f.read(reinterpret_cast<char*>(&id), 8))
            malformed(path, offset, "truncated row");
        offset += 8;
        if (!f.read(reinterpret_cast<char*>(row.data()),
                    static_cast<std::streamsize>(dim * sizeof(float))))
            malformed(path, offset, "truncated row");
        offset += dim * sizeof(float);
        double n = 0.0;
        for (float x : row) n += static_cast<double>(x) * x;
        n = std::sqrt(n);
        if (n <= 0.0) malformed(path, offset, "zero-norm row");
        if (std::abs(n - 1.0) > 1e-3) ++warned;
        if (std::abs(n - 1.0) > 1e-6) normalize(row);
        m.doc_ids.push_back(id);
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    if (warned > 0)
        std::fprintf(stderr,
                     "warning: %zu embedding rows in %s re-normalized "
                     "(norm drift > 1e-3)\n",
                     warned, path.c_str());
    return m;
}

EmbeddingMatrix load_embeddings_jsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    EmbeddingMatrix m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": " + e.what());
        }
        std::vector<float> v = j.at("vector").get<std::vector<float>>();
        normalize(v);
        m.add(j.at("doc_id").get<DocId>(), v);
    }
    return m;
}

}  // namespace hybrid
