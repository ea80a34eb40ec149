#pragma once

// Row-wise sparse matrices over an arbitrary scalar ring. The exact code uses
// GaussRational; the numeric code reuses the same assembly with complex<double>.

#include "tautsig/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tautsig {

template <class T>
class SparseMatrix {
 public:
  using Row = std::map<std::size_t, T>;

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i].emplace(i, T(1));
    return m;
  }

  static SparseMatrix diagonal(const std::vector<T>& d) {
    SparseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
  }

  std::size_t rows() const { return data_.size(); }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows() == cols_; }

  const Row& row(std::size_t i) const { return data_.at(i); }

  T at(std::size_t i, std::size_t j) const {
    const auto& r = data_.at(i);
    auto it = r.find(j);
    return it == r.end() ? T(0) : it->second;
  }

  void set(std::size_t i, std::size_t j, const T& v) {
    check_index(i, j);
    if (is_zero_scalar(v)) {
      data_[i].erase(j);
    } else {
      data_[i][j] = v;
    }
  }

  void add(std::size_t i, std::size_t j, const T& v) {
    check_index(i, j);
    auto& r = data_[i];
    auto [it, inserted] = r.emplace(j, v);
    if (!inserted) {
      it->second += v;
      if (is_zero_scalar(it->second)) r.erase(it);
    } else if (is_zero_scalar(v)) {
      r.erase(it);
    }
  }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.size();
    return n;
  }

  bool is_zero() const { return nnz() == 0; }

  SparseMatrix& operator+=(const SparseMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [j, v] : o.data_[i]) add(i, j, v);
    return *this;
  }
  SparseMatrix& operator-=(const SparseMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [j, v] : o.data_[i]) add(i, j, -v);
    return *this;
  }
  SparseMatrix& operator*=(const T& s) {
    if (is_zero_scalar(s)) {
      for (auto& r : data_) r.clear();
      return *this;
    }
    for (auto& r : data_)
      for (auto& [j, v] : r) v *= s;
    return *this;
  }

  friend SparseMatrix operator+(SparseMatrix a, const SparseMatrix& b) { return a += b; }
  friend SparseMatrix operator-(SparseMatrix a, const SparseMatrix& b) { return a -= b; }
  friend SparseMatrix operator-(SparseMatrix a) { return a *= T(-1); }
  friend SparseMatrix operator*(const T& s, SparseMatrix a) { return a *= s; }
  friend SparseMatrix operator*(SparseMatrix a, const T& s) { return a *= s; }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows())
      throw std::invalid_argument("matrix product shape mismatch");
    SparseMatrix out(a.rows(), b.cols_);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      auto& acc = out.data_[i];
      for (const auto& [k, x] : a.data_[i]) {
        for (const auto& [j, y] : b.data_[k]) {
          auto [it, inserted] = acc.emplace(j, x * y);
          if (!inserted) it->second += x * y;
        }
      }
      for (auto it = acc.begin(); it != acc.end();) {
        it = is_zero_scalar(it->second) ? acc.erase(it) : std::next(it);
      }
    }
    return out;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows() == b.rows() && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const SparseMatrix& a, const SparseMatrix& b) { return !(a == b); }

  /// Conjugate transpose.
  SparseMatrix adjoint() const {
    SparseMatrix out(cols_, rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [j, v] : data_[i]) out.data_[j].emplace(i, conj_scalar(v));
    return out;
  }

  SparseMatrix transpose() const {
    SparseMatrix out(cols_, rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [j, v] : data_[i]) out.data_[j].emplace(i, v);
    return out;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<T> y(rows(), T(0));
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [j, v] : data_[i]) y[i] += v * x[j];
    return y;
  }

  /// Submatrix with the given row and column index lists.
  SparseMatrix restrict_to(const std::vector<std::size_t>& row_idx,
                           const std::vector<std::size_t>& col_idx) const {
    std::map<std::size_t, std::size_t> col_pos;
    for (std::size_t c = 0; c < col_idx.size(); ++c) col_pos.emplace(col_idx[c], c);
    SparseMatrix out(row_idx.size(), col_idx.size());
    for (std::size_t r = 0; r < row_idx.size(); ++r)
      for (const auto& [j, v] : data_.at(row_idx[r]))
        if (auto it = col_pos.find(j); it != col_pos.end()) out.data_[r].emplace(it->second, v);
    return out;
  }

  SparseMatrix transform(auto&& fn) const {
    SparseMatrix out(rows(), cols_);
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [j, v] : data_[i]) out.set(i, j, fn(v));
    return out;
  }

 private:
  void check_index(std::size_t i, std::size_t j) const {
    if (i >= rows() || j >= cols_) throw std::out_of_range("matrix index out of range");
  }
  void check_same_shape(const SparseMatrix& o) const {
    if (rows() != o.rows() || cols_ != o.cols_)
      throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t cols_ = 0;
  std::vector<Row> data_;
};

template <class T>
SparseMatrix<T> kron(const SparseMatrix<T>& a, const SparseMatrix<T>& b) {
  SparseMatrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (const auto& [j, x] : a.row(i))
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (const auto& [l, y] : b.row(k)) out.set(i * b.rows() + k, j * b.cols() + l, x * y);
  return out;
}

template <class T>
SparseMatrix<T> commutator(const SparseMatrix<T>& a, const SparseMatrix<T>& b) {
  return a * b - b * a;
}

template <class T>
SparseMatrix<T> anticommutator(const SparseMatrix<T>& a, const SparseMatrix<T>& b) {
  return a * b + b * a;
}

/// Location of the first entry where a and b differ, for diagnostics.
template <class T>
struct EntryMismatch {
  std::size_t row = 0;
  std::size_t col = 0;
  T lhs{};
  T rhs{};

  std::string describe() const {
    std::ostringstream os;
    os << "entry (" << row << "," << col << "): " << lhs << " vs " << rhs;
    return os.str();
  }
};

template <class T>
std::optional<EntryMismatch<T>> first_mismatch(const SparseMatrix<T>& a, const SparseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix shape mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a.row(i) == b.row(i)) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      T x = a.at(i, j);
      T y = b.at(i, j);
      if (x != y) return EntryMismatch<T>{i, j, x, y};
    }
  }
  return std::nullopt;
}

using ExactMatrix = SparseMatrix<GaussRational>;
using ComplexSparse = SparseMatrix<std::complex<double>>;

inline ComplexSparse to_complex(const ExactMatrix& m) {
  ComplexSparse out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i)) out.set(i, j, v.to_complex());
  return out;
}

}  // namespace tautsig
