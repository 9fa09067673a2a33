#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jpec/linalg.hpp"

namespace jpec {

// Ordered node pair. Supply edges keep (src, dst); competitor edges are
// stored canonically with first < second.
struct NodePair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

inline NodePair canonical(std::size_t a, std::size_t b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

// Competitor (+1) or sampled non-competitor (-1) pair, i < j.
struct LabeledPair {
  std::size_t i = 0;
  std::size_t j = 0;
  int w = 1;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

// Company knowledge graph: attributes X, directed supply edges S and
// undirected competitor edges C over n nodes.
struct CompanyGraph {
  std::size_t n = 0;
  DenseMatrix attributes;
  std::vector<NodePair> supply_edges;
  std::vector<NodePair> competitor_edges;
  std::vector<std::string> node_labels;  // empty, or one external id per node

  std::string label(std::size_t node) const;
};

struct Query {
  std::size_t node = 0;
  std::vector<std::size_t> held_out;  // sorted ascending
};

using QuerySet = std::vector<Query>;

// First violated invariant with the offending indices, or nullopt.
std::optional<std::string> validate(const CompanyGraph& g);
void require_valid(const CompanyGraph& g);

// n×n 0/1 matrix with (src, dst) set for each supply edge; not symmetrized.
SparseMatrix supply_adjacency(const CompanyGraph& g);

struct PairSets {
  std::vector<LabeledPair> pos;
  std::vector<LabeledPair> neg;
};

PairSets competitor_pair_sets(const CompanyGraph& g, const std::vector<LabeledPair>& negatives);

// Sorted competitor neighbour list per node.
std::vector<std::vector<std::size_t>> competitor_neighbors(const CompanyGraph& g);

// One-hot log2-spaced buckets of total supply degree (in + out); used when a
// node file carries no attribute columns.
inline constexpr std::size_t kDegreeBuckets = 16;
DenseMatrix degree_bucket_features(std::size_t n, const std::vector<NodePair>& supply_edges);

}  // namespace jpec
