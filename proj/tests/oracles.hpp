#pragma once

// Brute-force reference implementations used as test oracles. They work on
// plain nested vectors and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "jpec/linalg.hpp"

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const jpec::DenseMatrix& m) {
  Grid g(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  }
  return g;
}

inline Grid to_grid(const jpec::SparseMatrix& m) {
  Grid g(m.rows(), std::vector<double>(m.cols(), 0.0));
  const auto ptr = m.row_ptr();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t p = ptr[r]; p < ptr[r + 1]; ++p) g[r][m.col_idx()[p]] += m.values()[p];
  }
  return g;
}

inline Grid multiply(const Grid& a, const Grid& b) {
  const std::size_t n = a.size(), inner = b.size(), m = b.empty() ? 0 : b[0].size();
  Grid out(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < inner; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline double max_abs_diff(const Grid& a, const Grid& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

// Σ over the ordered double sum i,j of w_ij·‖y_i − y_j‖², where every
// unordered pair contributes to both (i,j) and (j,i).
inline double ordered_pair_loss(const Grid& y, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                double weight) {
  Grid w(y.size(), std::vector<double>(y.size(), 0.0));
  for (auto [i, j] : pairs) {
    w[i][j] += weight;
    w[j][i] += weight;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < y[i].size(); ++c) d += (y[i][c] - y[j][c]) * (y[i][c] - y[j][c]);
      total += w[i][j] * d;
    }
  }
  return total;
}

// 1-based rank of every candidate: one plus the number of candidates that
// beat it (higher score, or equal score and smaller index).
inline std::vector<std::size_t> ranks(const std::vector<std::size_t>& candidates, const std::vector<double>& scores) {
  std::vector<std::size_t> out(candidates.size(), 1);
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    for (std::size_t b = 0; b < candidates.size(); ++b) {
      if (scores[b] > scores[a] || (scores[b] == scores[a] && candidates[b] < candidates[a])) ++out[a];
    }
  }
  return out;
}

struct Metrics {
  double hits = 0.0;
  double hits_over_k = 0.0;
  double rr = 0.0;
  double ap = 0.0;
};

inline Metrics metrics(const std::vector<std::size_t>& candidates, const std::vector<double>& scores,
                       const std::set<std::size_t>& relevant, std::size_t k) {
  const auto r = ranks(candidates, scores);
  std::vector<std::size_t> hit_ranks;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    if (relevant.count(candidates[a])) hit_ranks.push_back(r[a]);
  }
  std::sort(hit_ranks.begin(), hit_ranks.end());
  Metrics m;
  std::size_t in_top = 0;
  for (std::size_t h : hit_ranks) in_top += h <= k ? 1 : 0;
  m.hits = static_cast<double>(in_top) / static_cast<double>(std::min(k, relevant.size()));
  m.hits_over_k = static_cast<double>(in_top) / static_cast<double>(k);
  m.rr = hit_ranks.empty() ? 0.0 : 1.0 / static_cast<double>(hit_ranks.front());
  double precision_sum = 0.0;
  for (std::size_t idx = 0; idx < hit_ranks.size(); ++idx) {
    precision_sum += static_cast<double>(idx + 1) / static_cast<double>(hit_ranks[idx]);
  }
  m.ap = precision_sum / static_cast<double>(relevant.size());
  return m;
}

// Hypergeometric mean and variance of |top-k ∩ relevant| for a uniformly
// random ordering of `pool` items with `relevant` hits.
inline double hypergeometric_mean(double pool, double relevant, double k) { return k * relevant / pool; }

inline double hypergeometric_variance(double pool, double relevant, double k) {
  if (pool <= 1.0) return 0.0;
  return k * (relevant / pool) * ((pool - relevant) / pool) * ((pool - k) / (pool - 1.0));
}

inline jpec::DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                                      double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  jpec::DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = dist(rng);
  return m;
}

}  // namespace oracle
