#include "jpec/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "jpec/error.hpp"

namespace jpec::io {
namespace {

constexpr std::string_view kEmbeddingMagic{"JPECEMB\0", 8};
constexpr std::string_view kModelMagic{"JPECMDL\0", 8};

std::vector<std::string_view> split_view(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct TsvLine {
  std::size_t number;  // 1-based line number in the file
  std::vector<std::string_view> fields;
};

// Reads non-comment, non-blank lines of a TSV file. The string owns the
// buffer the views point into.
struct TsvFile {
  std::string text;
  std::vector<TsvLine> lines;
};

TsvFile read_tsv(const fs::path& path, const TsvOptions& options) {
  TsvFile file{read_file(path), {}};
  std::string_view rest = file.text;
  std::size_t number = 0;
  bool header_pending = options.header;
  while (!rest.empty()) {
    const std::size_t eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    file.lines.push_back({number, split_view(line, '\t')});
  }
  return file;
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::size_t resolve(const std::map<std::string, std::size_t>& ids, std::string_view id, const fs::path& path,
                    std::size_t line) {
  const auto it = ids.find(std::string(id));
  if (it == ids.end()) parse_fail(path, line, "unknown node id '" + std::string(id) + "'");
  return it->second;
}

class ByteWriter {
 public:
  void raw(std::string_view bytes) { out_.append(bytes); }
  void u16(std::uint16_t v) { unsigned_le(v, 2); }
  void u32(std::uint32_t v) { unsigned_le(v, 4); }
  void u64(std::uint64_t v) { unsigned_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s);
  }
  const std::string& bytes() const { return out_; }

 private:
  void unsigned_le(std::uint64_t v, int width) {
    for (int b = 0; b < width; ++b) out_.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
  }
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  std::string_view raw(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw Error(source_ + ": truncated file (needed " + std::to_string(n) + " bytes at offset " +
                  std::to_string(pos_) + ")");
    }
    const std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(unsigned_le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(unsigned_le(4)); }
  std::uint64_t u64() { return unsigned_le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(raw(n));
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& source() const { return source_; }

 private:
  std::uint64_t unsigned_le(int width) {
    const std::string_view b = raw(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::string source_;
};

void write_matrix(ByteWriter& w, const DenseMatrix& m) {
  w.u64(m.rows());
  w.u64(m.cols());
  for (double v : m.values()) w.f64(v);
}

DenseMatrix read_matrix(ByteReader& r) {
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  if (cols != 0 && rows > r.remaining() / 8 / cols) {
    throw Error(r.source() + ": matrix header " + std::to_string(rows) + "x" + std::to_string(cols) +
                " exceeds the remaining payload");
  }
  std::vector<double> data(rows * cols);
  for (double& v : data) v = r.f64();
  return DenseMatrix(rows, cols, std::move(data));
}

template <typename T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

std::size_t parse_count(std::string_view text, const std::string& key) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("config: '" + key + "' expects a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::map<std::string, std::size_t> id_index(const CompanyGraph& g) {
  std::map<std::string, std::size_t> ids;
  for (std::size_t v = 0; v < g.n; ++v) ids.emplace(g.label(v), v);
  return ids;
}

LoadedGraph load_graph(const fs::path& nodes, const fs::path& supply, const fs::path& competitors,
                       const TsvOptions& options) {
  LoadedGraph out;
  CompanyGraph& g = out.graph;
  std::map<std::string, std::size_t> ids;
  {
    const TsvFile file = read_tsv(nodes, options);
    std::size_t width = 0;
    std::vector<double> data;
    for (const auto& line : file.lines) {
      const std::string id(trim(line.fields[0]));
      if (id.empty()) parse_fail(nodes, line.number, "empty node id");
      if (!ids.emplace(id, g.n).second) parse_fail(nodes, line.number, "duplicate node id '" + id + "'");
      const std::size_t features = line.fields.size() - 1;
      if (g.n == 0) {
        width = features;
      } else if (features != width) {
        parse_fail(nodes, line.number,
                   "expected " + std::to_string(width) + " attributes, found " + std::to_string(features));
      }
      for (std::size_t f = 1; f < line.fields.size(); ++f) {
        try {
          data.push_back(parse_double(line.fields[f]));
        } catch (const Error& e) {
          parse_fail(nodes, line.number, e.what());
        }
      }
      g.node_labels.push_back(id);
      ++g.n;
    }
    g.attributes = DenseMatrix(g.n, width, std::move(data));
  }
  {
    const TsvFile file = read_tsv(supply, options);
    for (const auto& line : file.lines) {
      if (line.fields.size() != 2) parse_fail(supply, line.number, "expected 2 columns");
      const std::size_t src = resolve(ids, trim(line.fields[0]), supply, line.number);
      const std::size_t dst = resolve(ids, trim(line.fields[1]), supply, line.number);
      if (src == dst) parse_fail(supply, line.number, "self-loop on '" + std::string(line.fields[0]) + "'");
      g.supply_edges.push_back({src, dst});
    }
  }
  g.competitor_edges = load_competitors(competitors, ids, options);
  if (g.attributes.cols() == 0 && g.n > 0) {
    g.attributes = degree_bucket_features(g.n, g.supply_edges);
    out.fallback_features = true;
  }
  require_valid(g);
  return out;
}

std::vector<NodePair> load_competitors(const fs::path& path, const std::map<std::string, std::size_t>& ids,
                                       const TsvOptions& options) {
  const TsvFile file = read_tsv(path, options);
  std::set<NodePair> edges;
  for (const auto& line : file.lines) {
    if (line.fields.size() != 2) parse_fail(path, line.number, "expected 2 columns");
    const std::size_t a = resolve(ids, trim(line.fields[0]), path, line.number);
    const std::size_t b = resolve(ids, trim(line.fields[1]), path, line.number);
    if (a == b) parse_fail(path, line.number, "self-loop on '" + std::string(line.fields[0]) + "'");
    edges.insert(canonical(a, b));
  }
  return {edges.begin(), edges.end()};
}

void save_graph(const CompanyGraph& g, const fs::path& nodes, const fs::path& supply, const fs::path& competitors) {
  require_valid(g);
  std::string text;
  for (std::size_t v = 0; v < g.n; ++v) {
    text += g.label(v);
    for (double x : g.attributes.row(v)) {
      text += '\t';
      text += format_double(x);
    }
    text += '\n';
  }
  write_file(nodes, text);
  save_pairs(g.supply_edges, g, supply);
  save_pairs(g.competitor_edges, g, competitors);
}

void save_pairs(const std::vector<NodePair>& pairs, const CompanyGraph& g, const fs::path& path) {
  std::string text;
  for (const auto& e : pairs) text += g.label(e.first) + '\t' + g.label(e.second) + '\n';
  write_file(path, text);
}

void save_queries(const QuerySet& queries, const CompanyGraph& g, const fs::path& path) {
  std::string text = "# query_id\theld_out_ids\n";
  for (const auto& q : queries) {
    text += g.label(q.node) + '\t';
    for (std::size_t i = 0; i < q.held_out.size(); ++i) {
      if (i) text += ',';
      text += g.label(q.held_out[i]);
    }
    text += '\n';
  }
  write_file(path, text);
}

QuerySet load_queries(const fs::path& path, const std::map<std::string, std::size_t>& ids) {
  const TsvFile file = read_tsv(path, {});
  QuerySet out;
  for (const auto& line : file.lines) {
    if (line.fields.size() != 2) parse_fail(path, line.number, "expected query id and held-out list");
    Query q;
    q.node = resolve(ids, trim(line.fields[0]), path, line.number);
    for (std::string_view id : split_view(line.fields[1], ',')) {
      q.held_out.push_back(resolve(ids, trim(id), path, line.number));
    }
    std::sort(q.held_out.begin(), q.held_out.end());
    q.held_out.erase(std::unique(q.held_out.begin(), q.held_out.end()), q.held_out.end());
    out.push_back(std::move(q));
  }
  return out;
}

void save_embeddings(const DenseMatrix& y, const std::vector<std::string>& ids, std::uint64_t seed,
                     const fs::path& path, std::uint16_t minor_version) {
  if (ids.size() != y.rows()) {
    throw Error("save_embeddings: " + std::to_string(ids.size()) + " ids for " + std::to_string(y.rows()) + " rows");
  }
  ByteWriter w;
  w.raw(kEmbeddingMagic);
  w.u16(kEmbeddingMajor);
  w.u16(minor_version);
  w.u64(y.rows());
  w.u64(y.cols());
  w.u64(seed);
  for (const auto& id : ids) w.str(id);
  for (double v : y.values()) w.f64(v);
  write_file(path, w.bytes());
}

EmbeddingFile load_embeddings(const fs::path& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes, path.string());
  if (r.raw(kEmbeddingMagic.size()) != kEmbeddingMagic) throw Error(path.string() + ": not an embedding file");
  EmbeddingFile out;
  const std::uint16_t major = r.u16();
  const std::uint16_t minor = r.u16();
  if (major != kEmbeddingMajor) {
    throw Error(path.string() + ": unsupported embedding format version " + std::to_string(major) + "." +
                std::to_string(minor));
  }
  if (minor > kEmbeddingMinor) {
    out.warnings.push_back(path.string() + ": embedding format minor version " + std::to_string(minor) +
                           " is newer than " + std::to_string(kEmbeddingMinor) + "; loaded as " +
                           std::to_string(kEmbeddingMajor) + "." + std::to_string(kEmbeddingMinor));
  }
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  out.seed = r.u64();
  if (rows > r.remaining() / 4) throw Error(path.string() + ": header row count exceeds file size");
  out.ids.reserve(rows);
  for (std::uint64_t i = 0; i < rows; ++i) out.ids.push_back(r.str());
  if (cols != 0 && r.remaining() / 8 / cols != rows) {
    throw Error(path.string() + ": header says " + std::to_string(rows) + "x" + std::to_string(cols) +
                " but payload holds " + std::to_string(r.remaining()) + " bytes");
  }
  if (r.remaining() != rows * cols * 8) {
    throw Error(path.string() + ": payload length " + std::to_string(r.remaining()) + " does not match header " +
                std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::vector<double> data(rows * cols);
  for (double& v : data) v = r.f64();
  out.embeddings = DenseMatrix(rows, cols, std::move(data));
  return out;
}

void export_embeddings_tsv(const DenseMatrix& y, const std::vector<std::string>& ids, const fs::path& path) {
  std::string text;
  for (std::size_t r = 0; r < y.rows(); ++r) {
    text += ids.at(r);
    for (double v : y.row(r)) {
      text += '\t';
      text += format_double(v);
    }
    text += '\n';
  }
  write_file(path, text);
}

void save_model(const JpecModel& model, const fs::path& path) {
  ByteWriter w;
  w.raw(kModelMagic);
  w.u16(kModelMajor);
  w.u16(kModelMinor);
  w.u64(model.config.seed);
  const std::string cfg = format_config(model.config);
  w.u64(cfg.size());
  w.raw(cfg);
  w.u32(static_cast<std::uint32_t>(model.encoder_weights.size() + model.decoder_weights.size()));
  for (const auto& m : model.encoder_weights) write_matrix(w, m);
  for (const auto& m : model.decoder_weights) write_matrix(w, m);
  write_file(path, w.bytes());
}

JpecModel load_model(const fs::path& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes, path.string());
  if (r.raw(kModelMagic.size()) != kModelMagic) throw Error(path.string() + ": not a model file");
  const std::uint16_t major = r.u16();
  r.u16();
  if (major != kModelMajor) throw Error(path.string() + ": unsupported model format version " + std::to_string(major));
  const std::uint64_t seed = r.u64();
  const std::uint64_t cfg_len = r.u64();
  if (cfg_len > r.remaining()) throw Error(path.string() + ": truncated file (config block)");
  JpecModel model;
  model.config = parse_config(r.raw(cfg_len));
  if (model.config.seed != seed) throw Error(path.string() + ": seed field disagrees with config block");
  validate_config(model.config);
  const std::uint32_t count = r.u32();
  const std::size_t layers = model.config.layers();
  if (count != 2 * layers) {
    throw Error(path.string() + ": expected " + std::to_string(2 * layers) + " weight matrices, found " +
                std::to_string(count));
  }
  const auto enc = model.config.encoder_dims;
  const auto dec = model.config.decoder_dims();
  for (std::size_t l = 0; l < count; ++l) {
    DenseMatrix m = read_matrix(r);
    const auto& dims = l < layers ? enc : dec;
    const std::size_t layer = l % layers;
    if (m.rows() != dims[layer] || m.cols() != dims[layer + 1]) {
      throw Error(path.string() + ": weight matrix " + std::to_string(l) + " has shape " + m.shape() +
                  ", expected " + std::to_string(dims[layer]) + "x" + std::to_string(dims[layer + 1]));
    }
    if (!m.all_finite()) throw Error(path.string() + ": non-finite weight in matrix " + std::to_string(l));
    (l < layers ? model.encoder_weights : model.decoder_weights).push_back(std::move(m));
  }
  if (r.remaining() != 0) throw Error(path.string() + ": trailing bytes after weights");
  return model;
}

std::string format_config(const JpecConfig& cfg) {
  const auto acts = [](const std::vector<Activation>& a) {
    return join<Activation>(a, [](const Activation& x) { return to_string(x); });
  };
  std::ostringstream out;
  out << "encoder_dims=" << join<std::size_t>(cfg.encoder_dims, [](const std::size_t& d) { return std::to_string(d); })
      << '\n'
      << "encoder_activations=" << acts(cfg.encoder_activations) << '\n'
      << "decoder_activations=" << acts(cfg.decoder_activations) << '\n'
      << "margin=" << format_double(cfg.margin) << '\n'
      << "beta=" << format_double(cfg.beta) << '\n'
      << "lambda=" << format_double(cfg.lambda) << '\n'
      << "learning_rate=" << format_double(cfg.learning_rate) << '\n'
      << "grad_clip=" << format_double(cfg.grad_clip) << '\n'
      << "epochs=" << cfg.epochs << '\n'
      << "seed=" << cfg.seed << '\n'
      << "norm_mode=" << to_string(cfg.norm_mode) << '\n'
      << "negative_ratio=" << format_double(cfg.negative_ratio) << '\n';
  return out.str();
}

void apply_config_entry(JpecConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value(trim(raw));
  const auto number = [&] {
    try {
      return parse_double(value);
    } catch (const Error&) {
      throw Error("config: '" + key + "' expects a number, got '" + value + "'");
    }
  };
  const auto activations = [&] {
    std::vector<Activation> out;
    if (value.empty()) return out;
    for (std::string_view part : split_view(value, ',')) out.push_back(parse_activation(std::string(trim(part))));
    return out;
  };
  if (key == "encoder_dims") {
    cfg.encoder_dims.clear();
    if (!value.empty()) {
      for (std::string_view part : split_view(value, ',')) cfg.encoder_dims.push_back(parse_count(trim(part), key));
    }
  } else if (key == "encoder_activations") {
    cfg.encoder_activations = activations();
  } else if (key == "decoder_activations") {
    cfg.decoder_activations = activations();
  } else if (key == "margin") {
    cfg.margin = number();
  } else if (key == "beta") {
    cfg.beta = number();
  } else if (key == "lambda") {
    cfg.lambda = number();
  } else if (key == "learning_rate") {
    cfg.learning_rate = number();
  } else if (key == "grad_clip") {
    cfg.grad_clip = number();
  } else if (key == "epochs") {
    cfg.epochs = parse_count(value, key);
  } else if (key == "seed") {
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw Error("config: 'seed' expects an unsigned 64-bit integer, got '" + value + "'");
    }
    cfg.seed = seed;
  } else if (key == "norm_mode") {
    cfg.norm_mode = parse_norm_mode(value);
  } else if (key == "negative_ratio") {
    cfg.negative_ratio = number();
  } else {
    throw Error("config: unknown key '" + key + "'");
  }
}

JpecConfig parse_config(std::string_view text, JpecConfig base) {
  std::size_t number = 0;
  for (std::string_view line : split_view(text, '\n')) {
    ++number;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error("config line " + std::to_string(number) + ": expected key=value");
    }
    try {
      apply_config_entry(base, std::string(trim(line.substr(0, eq))), std::string(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

JpecConfig load_config(const fs::path& path, JpecConfig base) {
  try {
    return parse_config(read_file(path), std::move(base));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_train_report(const TrainReport& report, const fs::path& path) {
  std::string text = "epoch\tl_pos\tl_neg\tl_1st\tl_2nd\tweight_sq\ttotal\n";
  const auto row = [&text](const std::string& label, const LossBreakdown& l) {
    text += label + '\t' + format_double(l.pos) + '\t' + format_double(l.neg) + '\t' + format_double(l.first_order) +
            '\t' + format_double(l.second_order) + '\t' + format_double(l.regularizer) + '\t' +
            format_double(l.total) + '\n';
  };
  for (const auto& e : report.epochs) row(std::to_string(e.epoch), e.loss);
  if (report.final_loss) row("final", *report.final_loss);
  write_file(path, text);
}

void save_metric_report(const MetricReport& report, const fs::path& path) {
  std::string text = "metric\tvalue\n";
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    text += "hits@" + std::to_string(report.ks[i]) + '\t' + format_double(report.hits_at_k[i]) + '\n';
  }
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    text += "hits_over_k@" + std::to_string(report.ks[i]) + '\t' + format_double(report.hits_at_k_over_k[i]) + '\n';
  }
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    text += "chance_hits@" + std::to_string(report.ks[i]) + '\t' + format_double(report.chance_hits_at_k[i]) + '\n';
  }
  text += "mrr\t" + format_double(report.mrr) + '\n';
  text += "map\t" + format_double(report.map) + '\n';
  text += "queries\t" + std::to_string(report.per_query.size()) + '\n';
  write_file(path, text);
}

void save_per_query(const MetricReport& report, const CompanyGraph& g, const fs::path& path) {
  std::string text = "query\trelevant\tpool";
  for (std::size_t k : report.ks) text += "\thits@" + std::to_string(k);
  text += "\trr\tap\n";
  for (const auto& m : report.per_query) {
    text += g.label(m.query) + '\t' + std::to_string(m.relevant) + '\t' + std::to_string(m.pool);
    for (double h : m.hits) text += '\t' + format_double(h);
    text += '\t' + format_double(m.reciprocal_rank) + '\t' + format_double(m.average_precision) + '\n';
  }
  write_file(path, text);
}

std::string metric_summary(const MetricReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "queries: " << report.per_query.size() << '\n';
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    out << "Hits@" << report.ks[i] << ": " << report.hits_at_k[i] << "  (/K: " << report.hits_at_k_over_k[i]
        << ", chance: " << report.chance_hits_at_k[i] << ")\n";
  }
  out << "MRR: " << report.mrr << '\n' << "MAP: " << report.map << '\n';
  return out.str();
}

void save_ranked(const std::vector<RankedList>& lists, const std::vector<std::string>& ids, std::size_t top_k,
                 const fs::path& path) {
  std::string text = "query\trank\tcandidate\tscore\n";
  for (const auto& list : lists) {
    const std::size_t limit = std::min(top_k, list.candidates.size());
    for (std::size_t r = 0; r < limit; ++r) {
      text += ids.at(list.query) + '\t' + std::to_string(r + 1) + '\t' + ids.at(list.candidates[r]) + '\t' +
              format_double(list.scores[r]) + '\n';
    }
  }
  write_file(path, text);
}

}  // namespace jpec::io
