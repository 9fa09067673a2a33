#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jpec/graph.hpp"
#include "jpec/linalg.hpp"

namespace jpec {

enum class SplitKind { regular, zero_shot };
enum class ScoreMode { neg_sq_euclidean, cosine };

std::string to_string(SplitKind kind);
std::string to_string(ScoreMode mode);
SplitKind parse_split_kind(const std::string& text);
ScoreMode parse_score_mode(const std::string& text);

struct SplitResult {
  CompanyGraph train_graph;
  QuerySet queries;
  std::vector<NodePair> removed_edges;  // canonical, sorted
  SplitKind kind = SplitKind::regular;
  std::uint64_t seed = 0;
  std::size_t min_competitors = 1;
};

// Strips every competitor edge of round(node_fraction·|labeled nodes|) randomly
// chosen nodes. Supply edges are kept.
SplitResult make_zero_shot_split(const CompanyGraph& g, double node_fraction, std::size_t min_competitors,
                                 std::uint64_t seed);

// Removes round(edge_fraction·|C|) random competitor edges without ever
// removing a node's last competitor edge.
SplitResult make_regular_split(const CompanyGraph& g, double edge_fraction, std::size_t min_competitors,
                               std::uint64_t seed);

// Checks every split invariant against the source graph; nullopt when all hold.
std::optional<std::string> check_split(const CompanyGraph& original, const SplitResult& split);

struct RankedList {
  std::size_t query = 0;
  std::vector<std::size_t> candidates;
  std::vector<double> scores;  // non-increasing; ties ordered by node index
};

// Scores every pool member except the query and filtered nodes. An empty
// `pool` means all rows of `y`.
RankedList rank_candidates(const DenseMatrix& y, std::size_t query, const std::vector<std::size_t>& pool,
                           ScoreMode score, const std::vector<std::size_t>& filter);

// |top-k ∩ relevant| / min(k, |relevant|).
double hits_at_k(const RankedList& ranked, const std::vector<std::size_t>& relevant, std::size_t k);
// |top-k ∩ relevant| / k.
double hits_at_k_over_k(const RankedList& ranked, const std::vector<std::size_t>& relevant, std::size_t k);
double reciprocal_rank(const RankedList& ranked, const std::vector<std::size_t>& relevant);
// Mean of precision@rank over relevant items; unretrieved items add 0.
double average_precision(const RankedList& ranked, const std::vector<std::size_t>& relevant);

double mrr(const std::vector<RankedList>& ranked, const std::vector<std::vector<std::size_t>>& relevant);
double mean_average_precision(const std::vector<RankedList>& ranked,
                              const std::vector<std::vector<std::size_t>>& relevant);

// Expected hits_at_k (min denominator) for a uniformly random ranking of
// `pool` candidates containing `relevant` hits, and its standard deviation.
double chance_hits_at_k(std::size_t pool, std::size_t relevant, std::size_t k);
double chance_hits_at_k_stddev(std::size_t pool, std::size_t relevant, std::size_t k);

struct QueryMetrics {
  std::size_t query = 0;
  std::size_t relevant = 0;
  std::size_t pool = 0;
  std::vector<double> hits;         // per k, min(k, |relevant|) denominator
  std::vector<double> hits_over_k;  // per k, k denominator
  std::vector<double> chance_hits;  // per k, random-ranking expectation
  double reciprocal_rank = 0.0;
  double average_precision = 0.0;
};

struct MetricReport {
  std::vector<std::size_t> ks;
  std::vector<double> hits_at_k;
  std::vector<double> hits_at_k_over_k;
  std::vector<double> chance_hits_at_k;
  double mrr = 0.0;
  double map = 0.0;
  std::vector<QueryMetrics> per_query;

  double hits(std::size_t k) const;
  double chance(std::size_t k) const;
};

// Ranks each query over the full node pool. With `filtered` the query's
// training competitors are removed from its pool.
MetricReport evaluate(const DenseMatrix& embeddings, const SplitResult& split, const std::vector<std::size_t>& ks,
                      ScoreMode score, bool filtered);

// Same, for callers holding only the training competitor edges and queries.
MetricReport evaluate(const DenseMatrix& embeddings, const std::vector<NodePair>& train_competitors,
                      const QuerySet& queries, const std::vector<std::size_t>& ks, ScoreMode score, bool filtered);

}  // namespace jpec
