#pragma once

// Dense Gaussian elimination over an exact field (Q or Q(i)).

#include "tautsig/sparse_matrix.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tautsig::linalg {

template <class T>
using Vec = std::vector<T>;

template <class T>
using Dense = std::vector<std::vector<T>>;

template <class T>
Dense<T> to_dense(const SparseMatrix<T>& m) {
  Dense<T> out(m.rows(), std::vector<T>(m.cols(), T(0)));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i)) out[i][j] = v;
  return out;
}

/// Reduces `a` in place to reduced row echelon form; returns the pivot columns.
template <class T>
std::vector<std::size_t> rref(Dense<T>& a) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && is_zero_scalar(a[p][c])) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    T inv = T(1) / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero_scalar(a[i][c])) continue;
      T f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) {
        if (!is_zero_scalar(a[r][j])) a[i][j] -= f * a[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
std::size_t rank(const SparseMatrix<T>& m) {
  auto d = to_dense(m);
  return rref(d).size();
}

/// Basis of {x : m x = 0}.
template <class T>
std::vector<Vec<T>> nullspace(const SparseMatrix<T>& m) {
  auto a = to_dense(m);
  auto pivots = rref(a);
  const std::size_t cols = m.cols();
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Vec<T>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vec<T> v(cols, T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Matrix whose columns are the given vectors.
template <class T>
SparseMatrix<T> columns(const std::vector<Vec<T>>& vs, std::size_t dim) {
  SparseMatrix<T> out(dim, vs.size());
  for (std::size_t c = 0; c < vs.size(); ++c) {
    if (vs[c].size() != dim) throw std::invalid_argument("column length mismatch");
    for (std::size_t r = 0; r < dim; ++r) out.set(r, c, vs[c][r]);
  }
  return out;
}

/// Matrix of `op` restricted to the invariant subspace spanned by `basis`,
/// in the coordinates of that basis. Throws if the subspace is not invariant.
template <class T>
SparseMatrix<T> restrict_operator(const SparseMatrix<T>& op, const std::vector<Vec<T>>& basis) {
  const std::size_t dim = op.rows();
  const std::size_t k = basis.size();
  SparseMatrix<T> out(k, k);
  if (k == 0) return out;
  // Solve [basis | op*basis] by elimination on the augmented system.
  Dense<T> aug(dim, std::vector<T>(2 * k, T(0)));
  for (std::size_t c = 0; c < k; ++c) {
    auto image = op.apply(basis[c]);
    for (std::size_t r = 0; r < dim; ++r) {
      aug[r][c] = basis[c][r];
      aug[r][k + c] = image[r];
    }
  }
  auto pivots = rref(aug);
  if (pivots.size() != k || pivots.back() >= k)
    throw std::domain_error("subspace is not invariant under the operator");
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) out.set(r, c, aug[r][k + c]);
  return out;
}

}  // namespace tautsig::linalg
