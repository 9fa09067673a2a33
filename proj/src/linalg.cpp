#include "jpec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jpec/error.hpp"
#include "jpec/parallel.hpp"

namespace jpec {
namespace {

constexpr std::size_t kParallelMinWork = 1 << 16;

std::string shape_string(std::size_t rows, std::size_t cols) {
  std::ostringstream out;
  out << rows << "x" << cols;
  return out.str();
}

void require_square(const SparseMatrix& a, const char* op) {
  if (!a.square()) {
    throw Error(std::string(op) + ": expected a square matrix, got " + a.shape());
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error("DenseMatrix: payload length " + std::to_string(data_.size()) +
                " does not match shape " + shape_string(rows, cols));
  }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string DenseMatrix::shape() const { return shape_string(rows_, cols_); }

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0) {
    throw Error("SparseMatrix: row_ptr must have rows+1 entries starting at 0");
  }
  if (row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
    throw Error("SparseMatrix: row_ptr[rows], col_idx and values lengths disagree");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) {
      throw Error("SparseMatrix: row_ptr decreases at row " + std::to_string(r));
    }
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] >= cols_) {
        throw Error("SparseMatrix: column " + std::to_string(col_idx_[k]) + " out of range in row " +
                    std::to_string(r));
      }
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1]) {
        throw Error("SparseMatrix: columns not strictly increasing in row " + std::to_string(r));
      }
    }
  }
}

SparseMatrix SparseMatrix::zeros(std::size_t rows, std::size_t cols) {
  return SparseMatrix(rows, cols, std::vector<std::size_t>(rows + 1, 0), {}, {});
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> ptr(n + 1);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    ptr[i + 1] = i + 1;
    idx[i] = i;
  }
  return SparseMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw Error("SparseMatrix::from_triplets: entry (" + std::to_string(t.row) + "," +
                  std::to_string(t.col) + ") outside " + shape_string(rows, cols));
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> ptr(rows + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> vals;
  for (std::size_t k = 0; k < entries.size();) {
    const std::size_t r = entries[k].row;
    const std::size_t c = entries[k].col;
    double sum = 0.0;
    for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k) sum += entries[k].value;
    if (sum == 0.0) continue;
    idx.push_back(c);
    vals.push_back(sum);
    ++ptr[r + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) ptr[r + 1] += ptr[r];
  return SparseMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<Triplet> entries;
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) entries.push_back({r, c, dense(r, c)});
    }
  }
  return from_triplets(dense.rows(), dense.cols(), std::move(entries));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double SparseMatrix::row_sum(std::size_t r) const {
  double sum = 0.0;
  for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += values_[k];
  return sum;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> ptr(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++ptr[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) ptr[c + 1] += ptr[c];
  std::vector<std::size_t> cursor(ptr.begin(), ptr.end() - 1);
  std::vector<std::size_t> idx(nnz());
  std::vector<double> vals(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t dst = cursor[col_idx_[k]]++;
      idx[dst] = r;
      vals[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(ptr), std::move(idx), std::move(vals));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out(r, col_idx_[k]) = values_[k];
  }
  return out;
}

std::string SparseMatrix::shape() const { return shape_string(rows_, cols_); }

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error("spmm: dimension mismatch, sparse " + a.shape() + " times dense " + b.shape());
  }
  DenseMatrix out(a.rows(), b.cols());
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto vals = a.values();
  const std::size_t width = b.cols();
  const std::size_t avg_nnz = a.rows() == 0 ? 0 : a.nnz() / a.rows() + 1;
  parallel_rows(a.rows(), kParallelMinWork, avg_nnz * width, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto dst = out.row(r);
      for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) {
        const double w = vals[k];
        const auto src = b.row(idx[k]);
        for (std::size_t c = 0; c < width; ++c) dst[c] += w * src[c];
      }
    }
  });
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error("matmul: dimension mismatch, " + a.shape() + " times " + b.shape());
  }
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t width = b.cols();
  parallel_rows(a.rows(), kParallelMinWork, inner * width, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto dst = out.row(r);
      for (std::size_t k = 0; k < inner; ++k) {
        const double w = a(r, k);
        if (w == 0.0) continue;
        const auto src = b.row(k);
        for (std::size_t c = 0; c < width; ++c) dst[c] += w * src[c];
      }
    }
  });
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw Error("matmul_tn: dimension mismatch, transpose of " + a.shape() + " times " + b.shape());
  }
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t shared = a.rows();
  const std::size_t width = b.cols();
  // Output row r accumulates over the shared dimension in ascending order.
  parallel_rows(a.cols(), kParallelMinWork, shared * width, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = 0; k < shared; ++k) {
      const auto src = b.row(k);
      for (std::size_t r = begin; r < end; ++r) {
        const double w = a(k, r);
        if (w == 0.0) continue;
        auto dst = out.row(r);
        for (std::size_t c = 0; c < width; ++c) dst[c] += w * src[c];
      }
    }
  });
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw Error("matmul_nt: dimension mismatch, " + a.shape() + " times transpose of " + b.shape());
  }
  DenseMatrix out(a.rows(), b.rows());
  const std::size_t inner = a.cols();
  parallel_rows(a.rows(), kParallelMinWork, inner * b.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto lhs = a.row(r);
      for (std::size_t c = 0; c < b.rows(); ++c) {
        const auto rhs = b.row(c);
        double sum = 0.0;
        for (std::size_t k = 0; k < inner; ++k) sum += lhs[k] * rhs[k];
        out(r, c) = sum;
      }
    }
  });
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  }
  return out;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("add: shape mismatch " + a.shape() + " vs " + b.shape());
  }
  std::vector<Triplet> entries;
  entries.reserve(a.nnz() + b.nnz());
  for (const SparseMatrix* m : {&a, &b}) {
    for (std::size_t r = 0; r < m->rows(); ++r) {
      for (std::size_t k = m->row_ptr()[r]; k < m->row_ptr()[r + 1]; ++k) {
        entries.push_back({r, m->col_idx()[k], m->values()[k]});
      }
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(entries));
}

SparseMatrix scale(const SparseMatrix& a, double factor) {
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (double& v : vals) v *= factor;
  return SparseMatrix(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                      {a.col_idx().begin(), a.col_idx().end()}, std::move(vals));
}

SparseMatrix binarize(const SparseMatrix& a) {
  return SparseMatrix(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                      {a.col_idx().begin(), a.col_idx().end()}, std::vector<double>(a.nnz(), 1.0));
}

SparseMatrix add_self_loops(const SparseMatrix& a) {
  require_square(a, "add_self_loops");
  return add(a, SparseMatrix::identity(a.rows()));
}

SparseMatrix row_normalize(const SparseMatrix& a) {
  require_square(a, "row_normalize");
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double sum = a.row_sum(r);
    if (!(sum > 0.0)) {
      throw Error("row_normalize: row " + std::to_string(r) + " has non-positive sum");
    }
    for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) vals[k] /= sum;
  }
  return SparseMatrix(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                      {a.col_idx().begin(), a.col_idx().end()}, std::move(vals));
}

bool is_symmetric(const SparseMatrix& a, double tol) {
  if (!a.square()) return false;
  const SparseMatrix t = a.transpose();
  if (t.row_ptr().size() != a.row_ptr().size()) return false;
  if (!std::equal(t.row_ptr().begin(), t.row_ptr().end(), a.row_ptr().begin()) ||
      !std::equal(t.col_idx().begin(), t.col_idx().end(), a.col_idx().begin())) {
    return false;
  }
  for (std::size_t k = 0; k < a.nnz(); ++k) {
    if (std::abs(a.values()[k] - t.values()[k]) > tol) return false;
  }
  return true;
}

SparseMatrix sym_normalize(const SparseMatrix& a) {
  require_square(a, "sym_normalize");
  if (!is_symmetric(a, 1e-12)) {
    throw Error("sym_normalize: input is not symmetric; symmetrize it first");
  }
  std::vector<double> degree(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    degree[r] = a.row_sum(r);
    if (!(degree[r] > 0.0)) {
      throw Error("sym_normalize: row " + std::to_string(r) + " has non-positive sum");
    }
  }
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      vals[k] /= std::sqrt(degree[r] * degree[a.col_idx()[k]]);
    }
  }
  return SparseMatrix(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                      {a.col_idx().begin(), a.col_idx().end()}, std::move(vals));
}

SparseMatrix laplacian_from_pairs(std::span<const WeightedPair> pairs, std::size_t n) {
  std::vector<Triplet> entries;
  entries.reserve(pairs.size() * 4);
  for (const auto& p : pairs) {
    if (p.i >= n || p.j >= n) {
      throw Error("laplacian_from_pairs: pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                  ") out of range for n=" + std::to_string(n));
    }
    if (p.i == p.j) {
      throw Error("laplacian_from_pairs: self-pair at node " + std::to_string(p.i));
    }
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
      throw Error("laplacian_from_pairs: non-positive weight on pair (" + std::to_string(p.i) + "," +
                  std::to_string(p.j) + ")");
    }
    entries.push_back({p.i, p.j, -p.weight});
    entries.push_back({p.j, p.i, -p.weight});
    entries.push_back({p.i, p.i, p.weight});
    entries.push_back({p.j, p.j, p.weight});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

double frobenius_sq(const DenseMatrix& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return sum;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("max_abs_diff: shape mismatch " + a.shape() + " vs " + b.shape());
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.values()[k] - b.values()[k]));
  }
  return worst;
}

double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("frobenius_dot: shape mismatch " + a.shape() + " vs " + b.shape());
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a.values()[k] * b.values()[k];
  return sum;
}

DenseMatrix finite_diff_gradient(const std::function<double(const DenseMatrix&)>& f, const DenseMatrix& at,
                                 double eps) {
  if (!(eps > 0.0)) throw Error("finite_diff_gradient: eps must be positive");
  DenseMatrix probe = at;
  DenseMatrix grad(at.rows(), at.cols());
  for (std::size_t k = 0; k < at.size(); ++k) {
    const double original = probe.values()[k];
    probe.values()[k] = original + eps;
    const double up = f(probe);
    probe.values()[k] = original - eps;
    const double down = f(probe);
    probe.values()[k] = original;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error("finite_diff_gradient: non-finite evaluation at entry " + std::to_string(k));
    }
    grad.values()[k] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace jpec
