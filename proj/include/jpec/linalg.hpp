#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace jpec {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;
  std::string shape() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row; explicit zeros are allowed but never produced by the builders.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  static SparseMatrix zeros(std::size_t rows, std::size_t cols);
  static SparseMatrix identity(std::size_t n);
  // Duplicate coordinates are summed; entries that sum to exactly zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool square() const { return rows_ == cols_; }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t r, std::size_t c) const;
  double row_sum(std::size_t r) const;
  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  std::string shape() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

// Undirected weighted pair used to assemble graph Laplacians.
struct WeightedPair {
  std::size_t i;
  std::size_t j;
  double weight;
};

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// aᵀ·b without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a·bᵀ without materializing the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix scale(const SparseMatrix& a, double factor);
// Every stored nonzero becomes 1.
SparseMatrix binarize(const SparseMatrix& a);

SparseMatrix add_self_loops(const SparseMatrix& a);
// D⁻¹A with D the diagonal of row sums.
SparseMatrix row_normalize(const SparseMatrix& a);
// D^{-1/2} A D^{-1/2}; the input must already be symmetric.
SparseMatrix sym_normalize(const SparseMatrix& a);
bool is_symmetric(const SparseMatrix& a, double tol = 0.0);

// L = D − W. Weights must be strictly positive; duplicates are summed.
SparseMatrix laplacian_from_pairs(std::span<const WeightedPair> pairs, std::size_t n);

double frobenius_sq(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
// tr(aᵀ b) for equally shaped matrices.
double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b);

// Central-difference gradient of a scalar function, one entry at a time.
DenseMatrix finite_diff_gradient(const std::function<double(const DenseMatrix&)>& f,
                                 const DenseMatrix& at, double eps);

}  // namespace jpec
