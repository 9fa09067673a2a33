#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "jpec/error.hpp"
#include "jpec/evalkit.hpp"
#include "jpec/sampling.hpp"
#include "jpec/synth.hpp"
#include "oracles.hpp"

using namespace jpec;

namespace {

RankedList listed(std::vector<std::size_t> candidates) {
  RankedList r;
  r.candidates = std::move(candidates);
  r.scores.assign(r.candidates.size(), 0.0);
  for (std::size_t i = 0; i < r.scores.size(); ++i) r.scores[i] = -static_cast<double>(i);
  return r;
}

SynthGraph planted(std::uint64_t seed, std::size_t n = 300, std::size_t industries = 6, double p = 0.9) {
  SynthSpec spec;
  spec.n = n;
  spec.industries = industries;
  spec.attr_dim = 4 * industries;
  spec.intra_competitor_prob = p;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST_CASE("rank_candidates examples") {
  const auto y = DenseMatrix::from_rows({{0}, {0.1}, {5}});
  const auto r = rank_candidates(y, 0, {}, ScoreMode::neg_sq_euclidean, {});
  CHECK(r.candidates == std::vector<std::size_t>{1, 2});
  CHECK(r.query == 0);
  CHECK(r.scores[0] == doctest::Approx(-0.01));
  CHECK(r.scores[1] == -25.0);

  const auto filtered = rank_candidates(y, 0, {}, ScoreMode::neg_sq_euclidean, {1});
  CHECK(filtered.candidates == std::vector<std::size_t>{2});

  const DenseMatrix same(5, 3, 1.5);
  CHECK(rank_candidates(same, 2, {}, ScoreMode::neg_sq_euclidean, {}).candidates ==
        std::vector<std::size_t>{0, 1, 3, 4});
  CHECK(rank_candidates(same, 2, {4, 0, 3}, ScoreMode::cosine, {}).candidates == std::vector<std::size_t>{0, 3, 4});
}

TEST_CASE("rank_candidates cosine and errors") {
  const auto y = DenseMatrix::from_rows({{1, 0}, {0, 0}, {10, 1}, {-1, 0}});
  const auto r = rank_candidates(y, 0, {}, ScoreMode::cosine, {});
  CHECK(r.candidates == std::vector<std::size_t>{2, 1, 3});
  CHECK(r.scores[1] == 0.0);
  CHECK(r.scores[2] == -1.0);
  CHECK_THROWS_AS(rank_candidates(y, 4, {}, ScoreMode::cosine, {}), Error);
  CHECK_THROWS_AS(rank_candidates(y, 0, {0}, ScoreMode::cosine, {}), Error);
  CHECK_THROWS_AS(rank_candidates(y, 0, {}, ScoreMode::cosine, {1, 2, 3}), Error);
}

TEST_CASE("rank_candidates is invariant under strictly increasing score transforms") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> coord(-6, 6);
  for (int trial = 0; trial < 50; ++trial) {
    DenseMatrix y(40, 1);
    for (double& v : y.values()) v = std::abs(coord(rng));
    y(0, 0) = 0.0;  // query at the origin so scores are −y²
    const auto base = rank_candidates(y, 0, {}, ScoreMode::neg_sq_euclidean, {});

    DenseMatrix cubed = y;
    for (double& v : cubed.values()) v = v * v * v;  // scores become s³
    DenseMatrix scaled = y;
    for (double& v : scaled.values()) v *= 2.0;  // scores become 4s
    CHECK(rank_candidates(cubed, 0, {}, ScoreMode::neg_sq_euclidean, {}).candidates == base.candidates);
    CHECK(rank_candidates(scaled, 0, {}, ScoreMode::neg_sq_euclidean, {}).candidates == base.candidates);
  }
}

TEST_CASE("hits_at_k examples") {
  CHECK(hits_at_k(listed({5, 6, 1, 2}), {5, 6}, 10) == 1.0);
  std::vector<std::size_t> eleven(11);
  std::iota(eleven.begin(), eleven.end(), 100);
  CHECK(hits_at_k(listed(eleven), {110}, 10) == 0.0);
  CHECK(hits_at_k(listed({1, 2, 3, 4, 5}), {1, 4, 9}, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(hits_at_k_over_k(listed({1, 2, 3, 4, 5}), {1, 4, 9}, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(hits_at_k_over_k(listed({5, 6, 1, 2}), {5, 6}, 10) == 0.2);
  CHECK_THROWS_AS(hits_at_k(listed({1}), {}, 1), Error);
  CHECK_THROWS_AS(hits_at_k(listed({1}), {1}, 0), Error);
}

TEST_CASE("mrr examples") {
  CHECK(mrr({listed({3, 4})}, {{3}}) == 1.0);
  CHECK(mrr({listed({3, 4, 5})}, {{5}}) == doctest::Approx(1.0 / 3.0));
  CHECK(mrr({listed({10, 11, 12, 13}), listed({10, 11, 12, 13})}, {{11}, {13}}) == 0.375);
  CHECK_THROWS_AS(mrr({listed({1})}, {{}}), Error);
}

TEST_CASE("map examples") {
  CHECK(mean_average_precision({listed({7, 8, 9, 1})}, {{7, 8, 9}}) == 1.0);
  CHECK(mean_average_precision({listed({10, 11, 12, 13})}, {{10, 12}}) == doctest::Approx(5.0 / 6.0));
  // Item 99 never appears in the list and adds precision 0.
  CHECK(average_precision(listed({10, 11}), {10, 99}) == 0.5);
  CHECK_THROWS_AS(mean_average_precision({listed({1})}, {{}}), Error);
}

TEST_CASE("metrics match a brute-force reimplementation") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    std::uniform_int_distribution<std::size_t> size(5, 60);
    const std::size_t n = size(rng);
    std::uniform_int_distribution<int> coord(0, 4);  // small integer grid forces ties
    DenseMatrix y(n, 2);
    for (double& v : y.values()) v = coord(rng);
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    const std::size_t query = node(rng);

    std::set<std::size_t> filter;
    for (int f = 0; f < 3; ++f) filter.insert(node(rng));
    std::set<std::size_t> relevant;
    const std::size_t want = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(10, n - 1))(rng);
    while (relevant.size() < want) relevant.insert(node(rng));
    relevant.erase(query);
    if (relevant.empty()) relevant.insert((query + 1) % n);
    filter.erase(query);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 15)(rng);

    std::vector<std::size_t> filt(filter.begin(), filter.end());
    RankedList ranked;
    try {
      ranked = rank_candidates(y, query, {}, ScoreMode::neg_sq_euclidean, filt);
    } catch (const Error&) {
      continue;  // every candidate filtered
    }

    std::vector<std::size_t> cand;
    std::vector<double> scores;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == query || filter.count(c)) continue;
      const double dx = y(query, 0) - y(c, 0), dy = y(query, 1) - y(c, 1);
      cand.push_back(c);
      scores.push_back(-(dx * dx + dy * dy));
    }
    const auto ranks = oracle::ranks(cand, scores);
    std::vector<std::size_t> expected_order(cand.size());
    for (std::size_t a = 0; a < cand.size(); ++a) expected_order[ranks[a] - 1] = cand[a];
    CHECK(ranked.candidates == expected_order);

    const auto want_metrics = oracle::metrics(cand, scores, relevant, k);
    const std::vector<std::size_t> rel(relevant.begin(), relevant.end());
    CHECK(hits_at_k(ranked, rel, k) == want_metrics.hits);
    CHECK(hits_at_k_over_k(ranked, rel, k) == want_metrics.hits_over_k);
    CHECK(reciprocal_rank(ranked, rel) == want_metrics.rr);
    CHECK(average_precision(ranked, rel) == want_metrics.ap);
  }
}

TEST_CASE("chance level matches the hypergeometric formula") {
  for (std::size_t pool : {10u, 50u, 999u}) {
    for (std::size_t rel : {1u, 5u, 9u}) {
      for (std::size_t k : {1u, 5u, 10u}) {
        const double denom = static_cast<double>(std::min(k, rel));
        const double p = static_cast<double>(pool), r = static_cast<double>(rel), kk = static_cast<double>(k);
        CHECK(chance_hits_at_k(pool, rel, k) ==
              doctest::Approx(oracle::hypergeometric_mean(p, r, kk) / denom).epsilon(1e-12));
        CHECK(chance_hits_at_k_stddev(pool, rel, k) ==
              doctest::Approx(std::sqrt(oracle::hypergeometric_variance(p, r, kk)) / denom).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("random embeddings score at chance level") {
  const std::size_t n = 1000, k = 10, rel_count = 5, seeds = 50;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    std::mt19937_64 rng(seed);
    const DenseMatrix y = oracle::random_dense(n, 8, rng);
    std::vector<std::size_t> others(n - 1);
    std::iota(others.begin(), others.end(), 1);
    std::shuffle(others.begin(), others.end(), rng);
    std::vector<std::size_t> rel(others.begin(), others.begin() + rel_count);
    std::sort(rel.begin(), rel.end());
    const auto report = evaluate(y, {}, {{0, rel}}, {k}, ScoreMode::neg_sq_euclidean, false);
    total += report.hits(k);
    CHECK(report.chance(k) == doctest::Approx(chance_hits_at_k(n - 1, rel_count, k)));
  }
  const double mean = total / static_cast<double>(seeds);
  const double pool = static_cast<double>(n - 1);
  const double expected = oracle::hypergeometric_mean(pool, 5, 10) / 5.0;
  const double sigma = std::sqrt(oracle::hypergeometric_variance(pool, 5, 10)) / 5.0 / std::sqrt(double(seeds));
  CAPTURE(mean);
  CAPTURE(expected);
  CHECK(std::abs(mean - expected) <= 3.0 * sigma);
}

TEST_CASE("oracle embeddings reach Hits@10 of one on planted splits") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto sg = planted(seed, 300, 6, 1.0);
    const auto y = oracle_embeddings(sg.industry, 6);
    const auto regular = make_regular_split(sg.graph, 0.2, 5, seed);
    const auto zero = make_zero_shot_split(sg.graph, 0.2, 5, seed);
    CHECK(evaluate(y, regular, {10}, ScoreMode::neg_sq_euclidean, true).hits(10) == 1.0);
    CHECK(evaluate(y, zero, {10}, ScoreMode::neg_sq_euclidean, true).hits(10) == 1.0);
    CHECK(evaluate(y, zero, {10}, ScoreMode::cosine, false).hits(10) == 1.0);
  }
}

TEST_CASE("aggregates do not depend on query order") {
  const auto sg = planted(4);
  const auto split = make_regular_split(sg.graph, 0.2, 3, 4);
  std::mt19937_64 rng(4);
  const DenseMatrix y = oracle::random_dense(sg.graph.n, 6, rng);
  const auto base = evaluate(y, split, {1, 5, 10}, ScoreMode::neg_sq_euclidean, true);
  for (int trial = 0; trial < 10; ++trial) {
    auto shuffled = split;
    std::shuffle(shuffled.queries.begin(), shuffled.queries.end(), rng);
    const auto other = evaluate(y, shuffled, {1, 5, 10}, ScoreMode::neg_sq_euclidean, true);
    CHECK(other.hits_at_k == base.hits_at_k);
    CHECK(other.hits_at_k_over_k == base.hits_at_k_over_k);
    CHECK(other.chance_hits_at_k == base.chance_hits_at_k);
    CHECK(other.mrr == base.mrr);
    CHECK(other.map == base.map);
  }
}

TEST_CASE("evaluate aggregates are per-query means") {
  const auto sg = planted(6);
  const auto split = make_zero_shot_split(sg.graph, 0.2, 5, 6);
  std::mt19937_64 rng(6);
  const DenseMatrix y = oracle::random_dense(sg.graph.n, 4, rng);
  const auto report = evaluate(y, split, {10}, ScoreMode::neg_sq_euclidean, true);
  REQUIRE(report.per_query.size() == split.queries.size());
  double rr = 0.0;
  for (const auto& q : report.per_query) {
    rr += q.reciprocal_rank;
    CHECK(q.pool == sg.graph.n - 1);
    CHECK(q.hits[0] >= 0.0);
    CHECK(q.hits[0] <= 1.0);
  }
  CHECK(report.mrr == doctest::Approx(rr / static_cast<double>(report.per_query.size())));
  CHECK_THROWS_AS(report.hits(5), Error);
  CHECK_THROWS_AS(evaluate(DenseMatrix(3, 2), split, {10}, ScoreMode::cosine, true), Error);
}

TEST_CASE("filtered evaluation removes training competitors from the pool") {
  const auto sg = planted(7);
  const auto split = make_regular_split(sg.graph, 0.2, 5, 7);
  const auto y = oracle_embeddings(sg.industry, 6);
  const auto nb = competitor_neighbors(split.train_graph);
  const auto report = evaluate(y, split, {10}, ScoreMode::neg_sq_euclidean, true);
  for (const auto& q : report.per_query) CHECK(q.pool == sg.graph.n - 1 - nb[q.query].size());
  const auto unfiltered = evaluate(y, split, {10}, ScoreMode::neg_sq_euclidean, false);
  for (const auto& q : unfiltered.per_query) CHECK(q.pool == sg.graph.n - 1);
}

TEST_CASE("zero-shot split examples") {
  CompanyGraph g;
  g.n = 2;
  g.attributes = DenseMatrix(2, 1);
  g.competitor_edges = {{0, 1}};
  const auto split = make_zero_shot_split(g, 0.5, 1, 3);
  REQUIRE(split.queries.size() == 1);
  CHECK(split.queries[0].held_out.size() == 1);
  CHECK(split.train_graph.competitor_edges.empty());
  CHECK_FALSE(check_split(g, split).has_value());

  CHECK_THROWS_AS(make_zero_shot_split(g, 0.5, 2, 3), Error);
  CHECK_THROWS_AS(make_zero_shot_split(g, 0.0, 1, 3), Error);
  CHECK_THROWS_AS(make_zero_shot_split(g, 1.0, 1, 3), Error);
}

TEST_CASE("regular split examples") {
  CompanyGraph matching;
  matching.n = 8;
  matching.attributes = DenseMatrix(8, 1);
  matching.competitor_edges = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  CHECK_THROWS_AS(make_regular_split(matching, 0.5, 1, 1), Error);

  CompanyGraph tiny = matching;
  tiny.competitor_edges = {{0, 1}, {0, 2}, {1, 2}};
  CHECK_THROWS_AS(make_regular_split(tiny, 0.1, 1, 1), Error);

  const auto sg = planted(2);
  const auto split = make_regular_split(sg.graph, 0.2, 5, 2);
  CHECK(split.removed_edges.size() ==
        static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(sg.graph.competitor_edges.size()))));
  const auto before = competitor_neighbors(sg.graph);
  const auto after = competitor_neighbors(split.train_graph);
  for (std::size_t v = 0; v < sg.graph.n; ++v) {
    if (!before[v].empty()) CHECK_FALSE(after[v].empty());
  }
}

TEST_CASE("split invariants hold over a 100-seed sweep") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    const std::size_t industries = 3 + seed % 4;
    const auto sg = planted(seed, 60 + 5 * (seed % 20), industries, 0.5 + 0.05 * static_cast<double>(seed % 9));
    const std::size_t min_comp = 1 + seed % 5;

    const auto regular = make_regular_split(sg.graph, 0.2, min_comp, seed);
    CHECK_FALSE(check_split(sg.graph, regular).has_value());
    const auto zero = make_zero_shot_split(sg.graph, 0.2, min_comp, seed);
    CHECK_FALSE(check_split(sg.graph, zero).has_value());

    // Training pairs for a zero-shot split never mention a query node.
    std::set<std::size_t> queries;
    for (const auto& q : zero.queries) queries.insert(q.node);
    const auto neg = sample_negatives(zero.train_graph, {1.0, seed, true});
    const auto sets = competitor_pair_sets(zero.train_graph, neg);
    for (const auto* list : {&sets.pos, &sets.neg}) {
      for (const auto& p : *list) {
        CHECK_FALSE(queries.count(p.i));
        CHECK_FALSE(queries.count(p.j));
      }
    }
  }
}

TEST_CASE("check_split detects violations") {
  const auto sg = planted(3);
  auto split = make_regular_split(sg.graph, 0.2, 5, 3);
  auto broken = split;
  broken.train_graph.competitor_edges.push_back(split.removed_edges.front());
  std::sort(broken.train_graph.competitor_edges.begin(), broken.train_graph.competitor_edges.end());
  CHECK(check_split(sg.graph, broken).has_value());

  broken = split;
  broken.train_graph.supply_edges.pop_back();
  CHECK(check_split(sg.graph, broken).has_value());

  broken = split;
  broken.min_competitors = 1000;
  CHECK(check_split(sg.graph, broken).has_value());

  auto zero = make_zero_shot_split(sg.graph, 0.2, 5, 3);
  const auto& q = zero.queries.front();
  zero.train_graph.competitor_edges.push_back(canonical(q.node, q.held_out.front()));
  std::sort(zero.train_graph.competitor_edges.begin(), zero.train_graph.competitor_edges.end());
  CHECK(check_split(sg.graph, zero).has_value());
}

TEST_CASE("splits are deterministic under the seed") {
  const auto sg = planted(5);
  const auto a = make_regular_split(sg.graph, 0.2, 5, 8);
  const auto b = make_regular_split(sg.graph, 0.2, 5, 8);
  CHECK(a.removed_edges == b.removed_edges);
  const auto za = make_zero_shot_split(sg.graph, 0.2, 5, 8);
  const auto zb = make_zero_shot_split(sg.graph, 0.2, 5, 8);
  CHECK(za.removed_edges == zb.removed_edges);
  CHECK_FALSE(make_regular_split(sg.graph, 0.2, 5, 9).removed_edges == a.removed_edges);
}
