#include "jpec/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <unordered_set>

#include "jpec/error.hpp"
#include "jpec/parallel.hpp"

namespace jpec {
namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::size_t rounded_count(double fraction, std::size_t total) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
}

void check_fraction(double fraction, const char* name) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(std::string(name) + ": fraction must lie strictly between 0 and 1");
  }
}

std::size_t count_relevant_hits(const RankedList& ranked, const std::unordered_set<std::size_t>& relevant,
                                std::size_t k) {
  const std::size_t limit = std::min(k, ranked.candidates.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < limit; ++r) hits += relevant.contains(ranked.candidates[r]) ? 1 : 0;
  return hits;
}

std::unordered_set<std::size_t> relevant_set(const std::vector<std::size_t>& relevant, const char* name) {
  if (relevant.empty()) throw Error(std::string(name) + ": relevant set is empty");
  return {relevant.begin(), relevant.end()};
}

}  // namespace

std::string to_string(SplitKind kind) { return kind == SplitKind::regular ? "regular" : "zero_shot"; }

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::neg_sq_euclidean ? "neg_sq_euclidean" : "cosine";
}

SplitKind parse_split_kind(const std::string& text) {
  if (text == "regular") return SplitKind::regular;
  if (text == "zero_shot" || text == "zero-shot") return SplitKind::zero_shot;
  throw Error("unknown split kind '" + text + "' (expected regular or zero_shot)");
}

ScoreMode parse_score_mode(const std::string& text) {
  if (text == "neg_sq_euclidean" || text == "euclidean") return ScoreMode::neg_sq_euclidean;
  if (text == "cosine") return ScoreMode::cosine;
  throw Error("unknown score mode '" + text + "' (expected neg_sq_euclidean or cosine)");
}

SplitResult make_zero_shot_split(const CompanyGraph& g, double node_fraction, std::size_t min_competitors,
                                 std::uint64_t seed) {
  require_valid(g);
  check_fraction(node_fraction, "make_zero_shot_split");
  const auto neighbors = competitor_neighbors(g);
  std::vector<std::size_t> labeled;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (!neighbors[v].empty()) labeled.push_back(v);
  }
  const std::size_t count = rounded_count(node_fraction, labeled.size());
  if (count == 0) throw Error("make_zero_shot_split: no node selected (too few nodes with competitors)");

  const auto order = shuffled_indices(labeled.size(), seed);
  std::vector<bool> selected(g.n, false);
  for (std::size_t k = 0; k < count; ++k) selected[labeled[order[k]]] = true;

  SplitResult out;
  out.kind = SplitKind::zero_shot;
  out.seed = seed;
  out.min_competitors = min_competitors;
  out.train_graph = g;
  out.train_graph.competitor_edges.clear();
  for (const auto& e : g.competitor_edges) {
    if (selected[e.first] || selected[e.second]) {
      out.removed_edges.push_back(e);
    } else {
      out.train_graph.competitor_edges.push_back(e);
    }
  }
  for (std::size_t v = 0; v < g.n; ++v) {
    if (selected[v] && neighbors[v].size() >= min_competitors) out.queries.push_back({v, neighbors[v]});
  }
  if (out.queries.empty()) {
    throw Error("make_zero_shot_split: no selected node has >= " + std::to_string(min_competitors) +
                " competitors");
  }
  return out;
}

SplitResult make_regular_split(const CompanyGraph& g, double edge_fraction, std::size_t min_competitors,
                               std::uint64_t seed) {
  require_valid(g);
  check_fraction(edge_fraction, "make_regular_split");
  const std::size_t target = rounded_count(edge_fraction, g.competitor_edges.size());
  if (target == 0) throw Error("make_regular_split: fraction removes no edges, query set would be empty");

  std::vector<std::size_t> degree(g.n, 0);
  for (const auto& e : g.competitor_edges) {
    ++degree[e.first];
    ++degree[e.second];
  }
  const auto order = shuffled_indices(g.competitor_edges.size(), seed);
  std::vector<bool> removed(g.competitor_edges.size(), false);
  std::size_t taken = 0;
  for (std::size_t k = 0; k < order.size() && taken < target; ++k) {
    const auto& e = g.competitor_edges[order[k]];
    // Keep every node visible in the training competitor data.
    if (degree[e.first] < 2 || degree[e.second] < 2) continue;
    --degree[e.first];
    --degree[e.second];
    removed[order[k]] = true;
    ++taken;
  }
  if (taken < target) {
    throw Error("make_regular_split: only " + std::to_string(taken) + " of " + std::to_string(target) +
                " edges removable without stripping a node of all competitors");
  }

  SplitResult out;
  out.kind = SplitKind::regular;
  out.seed = seed;
  out.min_competitors = min_competitors;
  out.train_graph = g;
  out.train_graph.competitor_edges.clear();
  std::vector<std::vector<std::size_t>> held_out(g.n);
  for (std::size_t k = 0; k < g.competitor_edges.size(); ++k) {
    const auto& e = g.competitor_edges[k];
    if (removed[k]) {
      out.removed_edges.push_back(e);
      held_out[e.first].push_back(e.second);
      held_out[e.second].push_back(e.first);
    } else {
      out.train_graph.competitor_edges.push_back(e);
    }
  }
  std::sort(out.removed_edges.begin(), out.removed_edges.end());
  for (std::size_t v = 0; v < g.n; ++v) {
    if (!held_out[v].empty() && held_out[v].size() >= min_competitors) {
      std::sort(held_out[v].begin(), held_out[v].end());
      out.queries.push_back({v, std::move(held_out[v])});
    }
  }
  if (out.queries.empty()) {
    throw Error("make_regular_split: no node has >= " + std::to_string(min_competitors) + " held-out competitors");
  }
  return out;
}

std::optional<std::string> check_split(const CompanyGraph& original, const SplitResult& split) {
  const CompanyGraph& train = split.train_graph;
  if (auto problem = validate(train)) return "train graph invalid: " + *problem;
  if (train.n != original.n || !(train.attributes == original.attributes) ||
      train.supply_edges != original.supply_edges) {
    return std::string("train graph changed nodes, attributes or supply edges");
  }
  const std::set<NodePair> before(original.competitor_edges.begin(), original.competitor_edges.end());
  const std::set<NodePair> after(train.competitor_edges.begin(), train.competitor_edges.end());
  const std::set<NodePair> removed(split.removed_edges.begin(), split.removed_edges.end());
  for (const auto& e : after) {
    if (!before.contains(e)) return "train edge not in original graph";
    if (removed.contains(e)) return "removed edge still present in train graph";
  }
  if (after.size() + removed.size() != before.size()) return std::string("train and removed edges do not partition C");

  const auto train_nb = competitor_neighbors(train);
  const auto orig_nb = competitor_neighbors(original);
  std::set<std::size_t> query_nodes;
  for (const auto& q : split.queries) {
    const std::string who = "query " + std::to_string(q.node);
    if (!query_nodes.insert(q.node).second) return who + " repeated";
    if (q.held_out.empty()) return who + " has an empty held-out set";
    if (q.held_out.size() < split.min_competitors) return who + " below min_competitors";
    for (std::size_t c : q.held_out) {
      if (!removed.contains(canonical(q.node, c))) return who + " held-out competitor not a removed edge";
    }
    if (split.kind == SplitKind::zero_shot) {
      if (!train_nb[q.node].empty()) return who + " keeps training competitor edges";
      if (q.held_out != orig_nb[q.node]) return who + " held-out set is not its full competitor list";
    }
  }
  if (split.kind == SplitKind::regular) {
    for (std::size_t v = 0; v < original.n; ++v) {
      if (!orig_nb[v].empty() && train_nb[v].empty()) {
        return "node " + std::to_string(v) + " lost all competitor edges in a regular split";
      }
    }
  }
  return std::nullopt;
}

RankedList rank_candidates(const DenseMatrix& y, std::size_t query, const std::vector<std::size_t>& pool,
                           ScoreMode score, const std::vector<std::size_t>& filter) {
  if (query >= y.rows()) {
    throw Error("rank_candidates: query " + std::to_string(query) + " out of range for " +
                std::to_string(y.rows()) + " embeddings");
  }
  std::vector<bool> excluded(y.rows(), false);
  excluded[query] = true;
  for (std::size_t f : filter) {
    if (f < y.rows()) excluded[f] = true;
  }
  std::vector<std::size_t> members;
  if (pool.empty()) {
    members.resize(y.rows());
    std::iota(members.begin(), members.end(), 0);
  } else {
    members = pool;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty() && members.back() >= y.rows()) {
      throw Error("rank_candidates: pool member " + std::to_string(members.back()) + " out of range");
    }
  }
  std::erase_if(members, [&](std::size_t c) { return excluded[c]; });
  if (members.empty()) throw Error("rank_candidates: empty candidate pool for query " + std::to_string(query));

  const auto q = y.row(query);
  double q_norm = 0.0;
  for (double v : q) q_norm += v * v;
  q_norm = std::sqrt(q_norm);

  std::vector<double> value(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto c = y.row(members[m]);
    if (score == ScoreMode::neg_sq_euclidean) {
      double dist = 0.0;
      for (std::size_t d = 0; d < q.size(); ++d) {
        const double diff = q[d] - c[d];
        dist += diff * diff;
      }
      value[m] = -dist;
    } else {
      double dot = 0.0;
      double c_norm = 0.0;
      for (std::size_t d = 0; d < q.size(); ++d) {
        dot += q[d] * c[d];
        c_norm += c[d] * c[d];
      }
      const double denom = q_norm * std::sqrt(c_norm);
      value[m] = denom > 0.0 ? dot / denom : 0.0;
    }
  }

  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (value[a] != value[b]) return value[a] > value[b];
    return members[a] < members[b];
  });
  RankedList out;
  out.query = query;
  out.candidates.reserve(order.size());
  out.scores.reserve(order.size());
  for (std::size_t idx : order) {
    out.candidates.push_back(members[idx]);
    out.scores.push_back(value[idx]);
  }
  return out;
}

double hits_at_k(const RankedList& ranked, const std::vector<std::size_t>& relevant, std::size_t k) {
  if (k == 0) throw Error("hits_at_k: k must be >= 1");
  const auto rel = relevant_set(relevant, "hits_at_k");
  return static_cast<double>(count_relevant_hits(ranked, rel, k)) /
         static_cast<double>(std::min(k, rel.size()));
}

double hits_at_k_over_k(const RankedList& ranked, const std::vector<std::size_t>& relevant, std::size_t k) {
  if (k == 0) throw Error("hits_at_k_over_k: k must be >= 1");
  const auto rel = relevant_set(relevant, "hits_at_k_over_k");
  return static_cast<double>(count_relevant_hits(ranked, rel, k)) / static_cast<double>(k);
}

double reciprocal_rank(const RankedList& ranked, const std::vector<std::size_t>& relevant) {
  const auto rel = relevant_set(relevant, "reciprocal_rank");
  for (std::size_t r = 0; r < ranked.candidates.size(); ++r) {
    if (rel.contains(ranked.candidates[r])) return 1.0 / static_cast<double>(r + 1);
  }
  return 0.0;
}

double average_precision(const RankedList& ranked, const std::vector<std::size_t>& relevant) {
  const auto rel = relevant_set(relevant, "average_precision");
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t r = 0; r < ranked.candidates.size(); ++r) {
    if (rel.contains(ranked.candidates[r])) {
      ++found;
      sum += static_cast<double>(found) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(rel.size());
}

double mrr(const std::vector<RankedList>& ranked, const std::vector<std::vector<std::size_t>>& relevant) {
  if (ranked.size() != relevant.size() || ranked.empty()) {
    throw Error("mrr: need one non-empty relevant set per ranked list");
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < ranked.size(); ++q) sum += reciprocal_rank(ranked[q], relevant[q]);
  return sum / static_cast<double>(ranked.size());
}

double mean_average_precision(const std::vector<RankedList>& ranked,
                              const std::vector<std::vector<std::size_t>>& relevant) {
  if (ranked.size() != relevant.size() || ranked.empty()) {
    throw Error("mean_average_precision: need one non-empty relevant set per ranked list");
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < ranked.size(); ++q) sum += average_precision(ranked[q], relevant[q]);
  return sum / static_cast<double>(ranked.size());
}

double chance_hits_at_k(std::size_t pool, std::size_t relevant, std::size_t k) {
  if (pool == 0 || relevant == 0 || k == 0) return 0.0;
  const double draws = static_cast<double>(std::min(k, pool));
  const double expected = draws * static_cast<double>(relevant) / static_cast<double>(pool);
  return expected / static_cast<double>(std::min(k, relevant));
}

double chance_hits_at_k_stddev(std::size_t pool, std::size_t relevant, std::size_t k) {
  if (pool <= 1 || relevant == 0 || k == 0) return 0.0;
  const double n = static_cast<double>(pool);
  const double draws = static_cast<double>(std::min(k, pool));
  const double p = static_cast<double>(relevant) / n;
  const double variance = draws * p * (1.0 - p) * (n - draws) / (n - 1.0);
  return std::sqrt(variance) / static_cast<double>(std::min(k, relevant));
}

double MetricReport::hits(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return hits_at_k[i];
  }
  throw Error("MetricReport: Hits@" + std::to_string(k) + " was not computed");
}

double MetricReport::chance(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return chance_hits_at_k[i];
  }
  throw Error("MetricReport: Hits@" + std::to_string(k) + " was not computed");
}

MetricReport evaluate(const DenseMatrix& embeddings, const SplitResult& split, const std::vector<std::size_t>& ks,
                      ScoreMode score, bool filtered) {
  if (embeddings.rows() != split.train_graph.n) {
    throw Error("evaluate: " + std::to_string(embeddings.rows()) + " embeddings for " +
                std::to_string(split.train_graph.n) + " nodes");
  }
  return evaluate(embeddings, split.train_graph.competitor_edges, split.queries, ks, score, filtered);
}

MetricReport evaluate(const DenseMatrix& embeddings, const std::vector<NodePair>& train_competitors,
                      const QuerySet& queries, const std::vector<std::size_t>& ks, ScoreMode score, bool filtered) {
  if (queries.empty()) throw Error("evaluate: no queries");
  if (ks.empty()) throw Error("evaluate: no K values requested");
  for (std::size_t k : ks) {
    if (k == 0) throw Error("evaluate: K must be >= 1");
  }
  if (!embeddings.all_finite()) throw Error("evaluate: embeddings contain non-finite values");

  std::vector<std::vector<std::size_t>> train_nb(embeddings.rows());
  for (const auto& e : train_competitors) {
    if (e.first >= embeddings.rows() || e.second >= embeddings.rows()) {
      throw Error("evaluate: training competitor edge out of range");
    }
    train_nb[e.first].push_back(e.second);
    train_nb[e.second].push_back(e.first);
  }
  for (const auto& q : queries) {
    if (q.node >= embeddings.rows()) throw Error("evaluate: query node " + std::to_string(q.node) + " out of range");
    if (q.held_out.empty()) throw Error("evaluate: query " + std::to_string(q.node) + " has no relevant items");
  }

  MetricReport report;
  report.ks = ks;
  report.per_query.resize(queries.size());
  parallel_rows(queries.size(), 1 << 16, embeddings.rows() * embeddings.cols(),
                [&](std::size_t begin, std::size_t end) {
                  for (std::size_t i = begin; i < end; ++i) {
                    const Query& q = queries[i];
                    const std::vector<std::size_t> none;
                    const RankedList ranked =
                        rank_candidates(embeddings, q.node, {}, score, filtered ? train_nb[q.node] : none);
                    const std::unordered_set<std::size_t> pool(ranked.candidates.begin(), ranked.candidates.end());
                    std::size_t in_pool = 0;
                    for (std::size_t c : q.held_out) in_pool += pool.contains(c) ? 1 : 0;

                    QueryMetrics& m = report.per_query[i];
                    m.query = q.node;
                    m.relevant = q.held_out.size();
                    m.pool = ranked.candidates.size();
                    for (std::size_t k : ks) {
                      m.hits.push_back(hits_at_k(ranked, q.held_out, k));
                      m.hits_over_k.push_back(hits_at_k_over_k(ranked, q.held_out, k));
                      // Relevant items filtered out of the pool can never be hit.
                      m.chance_hits.push_back(chance_hits_at_k(m.pool, in_pool, k) *
                                              static_cast<double>(std::min(k, in_pool)) /
                                              static_cast<double>(std::min(k, m.relevant)));
                    }
                    m.reciprocal_rank = reciprocal_rank(ranked, q.held_out);
                    m.average_precision = average_precision(ranked, q.held_out);
                  }
                });

  // Serial reduction in ascending query-node order so that the aggregates do
  // not depend on the order the queries were given in.
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(queries[a].node, queries[a].held_out) < std::tie(queries[b].node, queries[b].held_out);
  });
  const double count = static_cast<double>(queries.size());
  report.hits_at_k.assign(ks.size(), 0.0);
  report.hits_at_k_over_k.assign(ks.size(), 0.0);
  report.chance_hits_at_k.assign(ks.size(), 0.0);
  for (std::size_t idx : order) {
    const QueryMetrics& m = report.per_query[idx];
    for (std::size_t i = 0; i < ks.size(); ++i) {
      report.hits_at_k[i] += m.hits[i];
      report.hits_at_k_over_k[i] += m.hits_over_k[i];
      report.chance_hits_at_k[i] += m.chance_hits[i];
    }
    report.mrr += m.reciprocal_rank;
    report.map += m.average_precision;
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    report.hits_at_k[i] /= count;
    report.hits_at_k_over_k[i] /= count;
    report.chance_hits_at_k[i] /= count;
  }
  report.mrr /= count;
  report.map /= count;
  return report;
}

}  // namespace jpec
