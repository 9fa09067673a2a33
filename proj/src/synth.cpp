#include "jpec/synth.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "jpec/error.hpp"

namespace jpec {
namespace {

constexpr double kBackgroundFlow = 0.1;

// Independent streams so that changing one probability leaves the other
// components of the graph untouched.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string("synth: ") + name + " must lie in [0,1]");
}

}  // namespace

SynthGraph generate(const SynthSpec& spec) {
  if (spec.industries == 0) throw Error("synth: industries must be >= 1");
  if (spec.industries > spec.n) throw Error("synth: more industries than nodes");
  if (spec.attr_dim < spec.industries) throw Error("synth: attr_dim must be >= industries");
  if (!(spec.attr_noise >= 0.0)) throw Error("synth: attr_noise must be >= 0");
  check_probability(spec.intra_competitor_prob, "intra_competitor_prob");
  check_probability(spec.supply_edge_prob, "supply_edge_prob");

  const std::size_t n = spec.n;
  const std::size_t k = spec.industries;
  SynthGraph out;
  out.industry.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.industry[v] = v % k;

  {
    // Each industry sells mainly to one downstream industry (a derangement
    // when k > 1) plus weak background flow everywhere else.
    auto rng = stream(spec.seed, 1);
    std::vector<std::size_t> downstream(k);
    std::iota(downstream.begin(), downstream.end(), 0);
    if (k > 1) {
      const auto has_fixed_point = [&] {
        for (std::size_t a = 0; a < k; ++a) {
          if (downstream[a] == a) return true;
        }
        return false;
      };
      do {
        std::shuffle(downstream.begin(), downstream.end(), rng);
      } while (has_fixed_point());
    }
    std::uniform_real_distribution<double> background(0.0, kBackgroundFlow);
    out.flow = DenseMatrix(k, k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) out.flow(a, b) = b == downstream[a] ? 1.0 : background(rng);
    }
  }

  CompanyGraph& g = out.graph;
  g.n = n;
  g.node_labels.reserve(n);
  for (std::size_t v = 0; v < n; ++v) g.node_labels.push_back("c" + std::to_string(v));

  {
    auto rng = stream(spec.seed, 2);
    std::bernoulli_distribution coin(spec.intra_competitor_prob);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + k; b < n; b += k) {
        if (coin(rng)) g.competitor_edges.push_back({a, b});
      }
    }
  }

  {
    auto rng = stream(spec.seed, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t src = 0; src < n; ++src) {
      for (std::size_t dst = 0; dst < n; ++dst) {
        if (src == dst) continue;
        const double p = spec.supply_edge_prob * out.flow(out.industry[src], out.industry[dst]);
        if (unit(rng) < p) g.supply_edges.push_back({src, dst});
      }
    }
  }

  {
    auto rng = stream(spec.seed, 4);
    std::normal_distribution<double> noise(0.0, spec.attr_noise > 0.0 ? spec.attr_noise : 1.0);
    const std::size_t block = spec.attr_dim / k;
    g.attributes = DenseMatrix(n, spec.attr_dim);
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t begin = out.industry[v] * block;
      for (std::size_t c = begin; c < begin + block; ++c) g.attributes(v, c) = 1.0;
      if (spec.attr_noise > 0.0) {
        for (double& x : g.attributes.row(v)) x += noise(rng);
      }
    }
  }

  std::sort(g.competitor_edges.begin(), g.competitor_edges.end());
  require_valid(g);
  return out;
}

DenseMatrix oracle_embeddings(const std::vector<std::size_t>& industry, std::size_t industries) {
  DenseMatrix y(industry.size(), industries);
  for (std::size_t v = 0; v < industry.size(); ++v) y(v, industry.at(v)) = 1.0;
  return y;
}

}  // namespace jpec
