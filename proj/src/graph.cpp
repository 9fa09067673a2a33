#include "jpec/graph.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "jpec/error.hpp"

namespace jpec {
namespace {

std::string pair_text(const NodePair& p) {
  return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

}  // namespace

std::string CompanyGraph::label(std::size_t node) const {
  return node_labels.empty() ? std::to_string(node) : node_labels.at(node);
}

std::optional<std::string> validate(const CompanyGraph& g) {
  if (g.attributes.rows() != g.n) {
    return "attribute rows " + std::to_string(g.attributes.rows()) + " != node count " + std::to_string(g.n);
  }
  if (!g.attributes.all_finite()) return std::string("non-finite attribute value");
  if (!g.node_labels.empty() && g.node_labels.size() != g.n) {
    return "node label count " + std::to_string(g.node_labels.size()) + " != node count " + std::to_string(g.n);
  }
  for (const auto& e : g.supply_edges) {
    if (e.first >= g.n || e.second >= g.n) return "supply edge " + pair_text(e) + " index out of range";
    if (e.first == e.second) return "supply edge " + pair_text(e) + " is a self-loop";
  }
  std::set<NodePair> seen;
  for (const auto& e : g.competitor_edges) {
    if (e.first >= g.n || e.second >= g.n) return "competitor edge " + pair_text(e) + " index out of range";
    if (e.first == e.second) return "competitor edge " + pair_text(e) + " is a self-loop";
    if (e.first > e.second) return "competitor edge " + pair_text(e) + " has non-canonical order";
    if (!seen.insert(e).second) return "competitor edge " + pair_text(e) + " is duplicated";
  }
  return std::nullopt;
}

void require_valid(const CompanyGraph& g) {
  if (auto problem = validate(g)) throw Error("invalid graph: " + *problem);
}

SparseMatrix supply_adjacency(const CompanyGraph& g) {
  require_valid(g);
  std::vector<NodePair> edges = g.supply_edges;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<Triplet> entries;
  entries.reserve(edges.size());
  for (const auto& e : edges) entries.push_back({e.first, e.second, 1.0});
  return SparseMatrix::from_triplets(g.n, g.n, std::move(entries));
}

PairSets competitor_pair_sets(const CompanyGraph& g, const std::vector<LabeledPair>& negatives) {
  const std::set<NodePair> competitors(g.competitor_edges.begin(), g.competitor_edges.end());
  PairSets out;
  out.pos.reserve(g.competitor_edges.size());
  for (const auto& e : g.competitor_edges) out.pos.push_back({e.first, e.second, +1});
  out.neg.reserve(negatives.size());
  for (const auto& p : negatives) {
    if (p.w != -1) {
      throw Error("negative pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") has weight " +
                  std::to_string(p.w) + ", expected -1");
    }
    if (competitors.contains(canonical(p.i, p.j))) {
      throw Error("negative pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                  ") is also a competitor edge");
    }
    out.neg.push_back(p);
  }
  return out;
}

std::vector<std::vector<std::size_t>> competitor_neighbors(const CompanyGraph& g) {
  std::vector<std::vector<std::size_t>> out(g.n);
  for (const auto& e : g.competitor_edges) {
    out[e.first].push_back(e.second);
    out[e.second].push_back(e.first);
  }
  for (auto& list : out) std::sort(list.begin(), list.end());
  return out;
}

DenseMatrix degree_bucket_features(std::size_t n, const std::vector<NodePair>& supply_edges) {
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : supply_edges) {
    ++degree.at(e.first);
    ++degree.at(e.second);
  }
  DenseMatrix out(n, kDegreeBuckets);
  for (std::size_t v = 0; v < n; ++v) {
    // bucket b holds degrees in [2^b - 1, 2^{b+1} - 1)
    const std::size_t bucket = std::bit_width(degree[v] + 1) - 1;
    out(v, std::min(bucket, kDegreeBuckets - 1)) = 1.0;
  }
  return out;
}

}  // namespace jpec
