#include <doctest.h>

#include <atomic>
#include <random>
#include <stdexcept>

#include "jpec/linalg.hpp"
#include "jpec/parallel.hpp"
#include "oracles.hpp"

using namespace jpec;

TEST_CASE("parallel_rows covers every row exactly once") {
  set_worker_count(4);
  std::vector<int> seen(1000, 0);
  parallel_rows(seen.size(), 0, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) ++seen[i];
  });
  for (int v : seen) CHECK(v == 1);
  set_worker_count(0);
}

TEST_CASE("parallel_rows rethrows worker exceptions") {
  set_worker_count(4);
  CHECK_THROWS_AS(parallel_rows(100, 0, 1,
                                [](std::size_t begin, std::size_t) {
                                  if (begin > 0) throw std::runtime_error("boom");
                                }),
                  std::runtime_error);
  set_worker_count(0);
}

TEST_CASE("kernels are bitwise identical across worker counts") {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution keep(0.1);
  DenseMatrix a = oracle::random_dense(300, 300, rng);
  for (double& v : a.values()) {
    if (!keep(rng)) v = 0.0;
  }
  const auto sa = SparseMatrix::from_dense(a);
  const DenseMatrix b = oracle::random_dense(300, 64, rng);
  const DenseMatrix c = oracle::random_dense(64, 48, rng);

  set_worker_count(1);
  const auto s1 = spmm(sa, b);
  const auto m1 = matmul(b, c);
  const auto t1 = matmul_tn(b, b);
  const auto n1 = matmul_nt(b, b);
  for (std::size_t workers : {2u, 3u, 8u}) {
    set_worker_count(workers);
    CHECK(spmm(sa, b) == s1);
    CHECK(matmul(b, c) == m1);
    CHECK(matmul_tn(b, b) == t1);
    CHECK(matmul_nt(b, b) == n1);
  }
  set_worker_count(0);
}
