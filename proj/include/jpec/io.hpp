#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "jpec/evalkit.hpp"
#include "jpec/graph.hpp"
#include "jpec/model.hpp"

namespace jpec::io {

namespace fs = std::filesystem;

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);

// ---------------------------------------------------------------------------
// Graph TSV files
//
//   nodes:       id <TAB> f1 <TAB> ... <TAB> fd
//   supply:      src_id <TAB> dst_id
//   competitors: id_a <TAB> id_b
//
// Lines starting with '#' and blank lines are skipped. With `header` the first
// remaining line of every file is ignored.

struct TsvOptions {
  bool header = false;
};

struct LoadedGraph {
  CompanyGraph graph;
  // Set when the node file had no attribute columns and degree-bucket
  // features were substituted.
  bool fallback_features = false;
};

LoadedGraph load_graph(const fs::path& nodes, const fs::path& supply, const fs::path& competitors,
                       const TsvOptions& options = {});
void save_graph(const CompanyGraph& g, const fs::path& nodes, const fs::path& supply, const fs::path& competitors);

// Competitor edge list only, resolved against an existing id mapping.
std::vector<NodePair> load_competitors(const fs::path& path, const std::map<std::string, std::size_t>& ids,
                                       const TsvOptions& options = {});
void save_pairs(const std::vector<NodePair>& pairs, const CompanyGraph& g, const fs::path& path);
std::map<std::string, std::size_t> id_index(const CompanyGraph& g);

// queries file: query_id <TAB> comma-separated held-out ids
void save_queries(const QuerySet& queries, const CompanyGraph& g, const fs::path& path);
QuerySet load_queries(const fs::path& path, const std::map<std::string, std::size_t>& ids);

// ---------------------------------------------------------------------------
// Embedding container: "JPECEMB\0", u16 major, u16 minor, u64 rows, u64 cols,
// u64 seed, per-row (u32 length, id bytes), then rows·cols little-endian
// doubles. All integers little-endian.

inline constexpr std::uint16_t kEmbeddingMajor = 1;
inline constexpr std::uint16_t kEmbeddingMinor = 0;

struct EmbeddingFile {
  DenseMatrix embeddings;
  std::vector<std::string> ids;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

void save_embeddings(const DenseMatrix& y, const std::vector<std::string>& ids, std::uint64_t seed,
                     const fs::path& path, std::uint16_t minor_version = kEmbeddingMinor);
EmbeddingFile load_embeddings(const fs::path& path);
void export_embeddings_tsv(const DenseMatrix& y, const std::vector<std::string>& ids, const fs::path& path);

// ---------------------------------------------------------------------------
// Model container: "JPECMDL\0", u16 major, u16 minor, u64 seed, u64 config
// length + key=value config text, u32 matrix count, then per matrix u64 rows,
// u64 cols and the row-major doubles. Encoder matrices precede decoder ones.

inline constexpr std::uint16_t kModelMajor = 1;
inline constexpr std::uint16_t kModelMinor = 0;

void save_model(const JpecModel& model, const fs::path& path);
JpecModel load_model(const fs::path& path);

// ---------------------------------------------------------------------------
// Flat key=value config, one entry per line, '#' comments.

std::string format_config(const JpecConfig& cfg);
JpecConfig parse_config(std::string_view text, JpecConfig base = {});
JpecConfig load_config(const fs::path& path, JpecConfig base = {});
void apply_config_entry(JpecConfig& cfg, const std::string& key, const std::string& value);

// ---------------------------------------------------------------------------
// Reports

void save_train_report(const TrainReport& report, const fs::path& path);
void save_metric_report(const MetricReport& report, const fs::path& path);
void save_per_query(const MetricReport& report, const CompanyGraph& g, const fs::path& path);
std::string metric_summary(const MetricReport& report);
void save_ranked(const std::vector<RankedList>& lists, const std::vector<std::string>& ids, std::size_t top_k,
                 const fs::path& path);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

}  // namespace jpec::io
