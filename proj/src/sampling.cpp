#include "jpec/sampling.hpp"

#include <cmath>
#include <random>
#include <set>

#include "jpec/error.hpp"

namespace jpec {

std::vector<LabeledPair> sample_negatives(const CompanyGraph& g, const NegativeSampleSpec& spec) {
  require_valid(g);
  if (!(spec.ratio > 0.0)) throw Error("sample_negatives: ratio must be > 0");

  const std::set<NodePair> competitors(g.competitor_edges.begin(), g.competitor_edges.end());
  const auto target = static_cast<std::size_t>(std::llround(spec.ratio * static_cast<double>(competitors.size())));
  if (target == 0) return {};

  std::vector<std::size_t> eligible;
  if (spec.restrict_to_labeled) {
    std::vector<bool> labeled(g.n, false);
    for (const auto& e : competitors) labeled[e.first] = labeled[e.second] = true;
    for (std::size_t v = 0; v < g.n; ++v) {
      if (labeled[v]) eligible.push_back(v);
    }
  } else {
    eligible.resize(g.n);
    for (std::size_t v = 0; v < g.n; ++v) eligible[v] = v;
  }

  const std::size_t m = eligible.size();
  const std::size_t all_pairs = m < 2 ? 0 : m * (m - 1) / 2;
  // Every competitor edge lies inside the eligible set in both modes.
  const std::size_t available = all_pairs - competitors.size();
  if (available < target) {
    throw Error("sample_negatives: infeasible, " + std::to_string(target) + " negatives requested but only " +
                std::to_string(available) + " non-competitor pairs exist");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::set<NodePair> chosen;
  std::vector<LabeledPair> out;
  out.reserve(target);
  const std::size_t max_attempts = 100 * target;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < target; ++attempt) {
    const std::size_t a = eligible[pick(rng)];
    const std::size_t b = eligible[pick(rng)];
    if (a == b) continue;
    const NodePair p = canonical(a, b);
    if (competitors.contains(p) || !chosen.insert(p).second) continue;
    out.push_back({p.first, p.second, -1});
  }
  if (out.size() < target) {
    throw Error("sample_negatives: only " + std::to_string(out.size()) + " of " + std::to_string(target) +
                " negatives found after " + std::to_string(max_attempts) + " attempts");
  }
  return out;
}

}  // namespace jpec
