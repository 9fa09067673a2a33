#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jpec/graph.hpp"

namespace jpec {

// Planted-industry graph: competitors only inside an industry, supply edges
// mostly from each industry to one downstream industry, attributes drawn around
// per-industry one-hot centroids.
struct SynthSpec {
  std::size_t n = 120;
  std::size_t industries = 4;
  std::size_t attr_dim = 16;
  double attr_noise = 0.5;
  double intra_competitor_prob = 0.5;
  // Probability of src→dst along the main downstream flow; background flows scale it down.
  double supply_edge_prob = 0.1;
  std::uint64_t seed = 0;
};

struct SynthGraph {
  CompanyGraph graph;
  std::vector<std::size_t> industry;  // ground truth per node
  DenseMatrix flow;                   // industries × industries, entries in [0, 1]
};

// Nodes go round-robin to industries. Node labels are "c<index>".
SynthGraph generate(const SynthSpec& spec);

// One-hot industry embeddings; the best possible geometry for the planted truth.
DenseMatrix oracle_embeddings(const std::vector<std::size_t>& industry, std::size_t industries);

}  // namespace jpec
