#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hybrid/csr_index.hpp"
#include "hybrid/temporal_index.hpp"
#include "hybrid/types.hpp"
#include "hybrid/workload.hpp"

namespace hybrid {

/// Versioned little-endian index container ("HIDX" v1). The header records
/// index mode, tokenizer mode, Bm25Params and the idf convention so a loaded
/// index can refuse incompatible queries. save/load round-trip byte-exactly.
void save_index(const CsrIndex& idx, const std::string& path);
CsrIndex load_index(const std::string& path);

/// Temporal container ("HTIX" v1): params + shared stats + a partition
/// directory of embedded HIDX blobs.
void save_temporal_index(const TemporalIndex& idx, const std::string& path);
TemporalIndex load_temporal_index(const std::string& path);

/// JSONL corpus, one record per line:
/// {id, text, role, session, agent, tool_type, ts_ms, weight}.
/// Parse errors carry the 1-based line number.
std::vector<MemoryRecord> load_corpus_jsonl(const std::string& path);
void save_corpus_jsonl(const std::vector<MemoryRecord>& records,
                       const std::string& path);

/// Query TSV: terms (space separated) \t gold doc ids (comma separated)
/// \t ts_ms \t qtype. The qtype column is optional on read.
std::vector<GeneratedQuery> load_queries_tsv(const std::string& path);
void save_queries_tsv(const std::vector<GeneratedQuery>& queries,
                      const std::string& path);

/// TREC 4-column qrels: qid iter docid rel.
std::map<std::string, std::map<DocId, double>> load_qrels_trec(
    const std::string& path);
void save_qrels_trec(
    const std::map<std::string, std::map<DocId, double>>& qrels,
    const std::string& path);

/// TREC 6-column run: qid Q0 docid rank score tag.
std::map<std::string, RankedList> load_run_trec(const std::string& path);
void save_run_trec(const std::vector<std::pair<std::string, RankedList>>& run,
                   const std::string& tag, const std::string& path);

/// Published benchmark layouts mapped into MemoryRecords; only the format is
/// supported here, no data ships with the repository.
std::vector<MemoryRecord> load_longmemeval_json(const std::string& path);
std::vector<MemoryRecord> load_locomo_json(const std::string& path);

}  // namespace hybrid
