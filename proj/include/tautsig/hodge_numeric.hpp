#pragma once

// Twisted de Rham operators D_V = d + d^* on the flat torus R^n / Z^n with
// coefficients in a flat bundle with commuting monodromies M_1..M_n preserving
// a hermitian form eta.
//
// Sections are written in the frame f(x) = exp(2 pi sum_j x_j Theta_j) g(x),
// Theta_j = log(M_j) / (2 pi), with g periodic. In that frame the connection is
// d + 2 pi Theta_j dx_j, and on the Fourier mode exp(2 pi i k.x) it acts by
// B_j = 2 pi (i k_j + Theta_j). The operator is block diagonal in k; the
// blocks act on Lambda^* R^n (x) C^r with basis index (form mask) * r + a.

#include "tautsig/clifford.hpp"
#include "tautsig/compatible_pair.hpp"
#include "tautsig/expression.hpp"
#include "tautsig/sparse_matrix.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tautsig::hodge {

using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

class HodgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndeterminateKernel : public HodgeError {
 public:
  using HodgeError::HodgeError;
};

inline constexpr int kDefaultCutoff = 8;
inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr int kDefaultGrid = 64;
inline constexpr int kDefaultRefinementDepth = 12;
inline constexpr double kStructureTolerance = 1e-10;
inline constexpr int kMaxTorusDimension = 4;

using ExprMatrix = std::vector<std::vector<expr::Expression>>;

inline ExprMatrix expr_matrix(const std::vector<std::vector<std::string>>& entries) {
  ExprMatrix out;
  for (const auto& row : entries) {
    std::vector<expr::Expression> r;
    for (const auto& e : row) r.emplace_back(e);
    out.push_back(std::move(r));
  }
  return out;
}

inline ExprMatrix diagonal_expr(const std::vector<std::string>& entries) {
  ExprMatrix out(entries.size(), std::vector<expr::Expression>(entries.size()));
  for (std::size_t a = 0; a < entries.size(); ++a) out[a][a] = expr::Expression(entries[a]);
  return out;
}

/// Flat U(p,q)-bundle on T^n, possibly varying with a parameter t in [0, 1].
struct MonodromyBundle {
  std::string name;
  int n = 1;
  int p = 1;
  int q = 0;
  ExprMatrix eta;
  std::optional<ExprMatrix> h0;
  std::vector<ExprMatrix> monodromies;
  bool loop = false;
  bool fibrewise_flat = true;
  bool globally_flat = false;

  int rank() const { return p + q; }

  bool parameterized() const {
    auto depends = [](const ExprMatrix& m) {
      for (const auto& row : m)
        for (const auto& e : row)
          if (e.depends_on_parameter()) return true;
      return false;
    };
    if (depends(eta) || (h0 && depends(*h0))) return true;
    return std::any_of(monodromies.begin(), monodromies.end(), depends);
  }
};

inline CMatrix evaluate(const ExprMatrix& m, double t) {
  const auto r = static_cast<Eigen::Index>(m.size());
  CMatrix out(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    if (static_cast<Eigen::Index>(m[a].size()) != r) throw HodgeError("matrix is not square");
    for (Eigen::Index b = 0; b < r; ++b) out(a, b) = m[a][b].evaluate(t);
  }
  return out;
}

inline std::optional<ExactMatrix> evaluate_exact(const ExprMatrix& m, const Rational& t) {
  const auto r = m.size();
  ExactMatrix out(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      auto v = m[a][b].evaluate_exact(t);
      if (!v) return std::nullopt;
      auto x = v->pi_free();
      if (!x) return std::nullopt;
      out.set(a, b, *x);
    }
  return out;
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline CMatrix to_dense_complex(const ComplexSparse& m) {
  CMatrix out = CMatrix::Zero(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i)) out(i, j) = v;
  return out;
}

inline CMatrix to_dense_complex(const ExactMatrix& m) { return to_dense_complex(to_complex(m)); }

inline ComplexSparse to_sparse(const CMatrix& m) {
  ComplexSparse out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.set(i, j, m(i, j));
  return out;
}


/// Everything needed to assemble the operator at one parameter value.
struct FiberData {
  int n = 0;
  int r = 0;
  Rational t;
  CMatrix eta;
  CMatrix h;
  CMatrix sigma;
  std::vector<CMatrix> monodromy;
  std::vector<CMatrix> theta;  // log(M_j) / (2 pi)
  bool diagonal_logs = true;
  // Exact data, available for diagonal eta, standard h0 and pi-free logs.
  bool exact = false;
  std::vector<ExactMatrix> theta_exact;
  ExactMatrix h_exact;
  ExactMatrix sigma_exact;
};

namespace detail {

inline bool is_exact_identity(const std::optional<ExprMatrix>& h0, std::size_t r) {
  if (!h0) return true;
  auto x = evaluate_exact(*h0, Rational(0));
  return x && *x == ExactMatrix::identity(r);
}

}  // namespace detail

/// Evaluates and validates the bundle at parameter t.
inline FiberData fiber_data(const MonodromyBundle& b, const Rational& t) {
  if (b.n < 1 || b.n > kMaxTorusDimension) throw HodgeError("torus dimension must be in [1, 4]");
  if (b.p < 0 || b.q < 0 || b.rank() < 1) throw HodgeError("signature (p, q) must have p + q >= 1");
  if (static_cast<int>(b.monodromies.size()) != b.n) throw HodgeError("need one monodromy per circle factor");
  if (static_cast<int>(b.eta.size()) != b.rank()) throw HodgeError("eta has wrong size");
  const double td = t.get_d();
  const auto r = b.rank();
  FiberData f;
  f.n = b.n;
  f.r = r;
  f.t = t;
  f.eta = evaluate(b.eta, td);
  if (max_abs(f.eta - f.eta.adjoint()) > kStructureTolerance) throw HodgeError("eta is not hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> eta_eig(f.eta);
  int pos = 0;
  int neg = 0;
  for (auto v : eta_eig.eigenvalues()) {
    if (v > kStructureTolerance) ++pos;
    else if (v < -kStructureTolerance) ++neg;
  }
  if (pos + neg != r) throw HodgeError("eta is singular");
  if (pos != b.p || neg != b.q) throw HodgeError("eta does not have signature (p, q)");

  const CMatrix h0 = b.h0 ? evaluate(*b.h0, td) : CMatrix(CMatrix::Identity(r, r));
  auto eta_exact = evaluate_exact(b.eta, t);
  bool exact = eta_exact.has_value() && detail::is_exact_identity(b.h0, r);
  if (exact) {
    for (std::size_t a = 0; a < static_cast<std::size_t>(r); ++a)
      for (const auto& [c, v] : eta_exact->row(a))
        if (c != a || v.im() != 0) exact = false;
  }

  for (int j = 0; j < b.n; ++j) {
    const auto& expr_m = b.monodromies[j];
    if (static_cast<int>(expr_m.size()) != r) throw HodgeError("monodromy has wrong size");
    CMatrix m = evaluate(expr_m, td);
    if (max_abs(m.adjoint() * f.eta * m - f.eta) > kStructureTolerance * std::max(1.0, max_abs(f.eta)))
      throw HodgeError("monodromy " + std::to_string(j + 1) + " does not preserve eta");
    f.monodromy.push_back(m);
    bool diagonal = true;
    for (int a = 0; a < r; ++a)
      for (int c = 0; c < r; ++c)
        if (a != c && std::abs(m(a, c)) > 1e-14) diagonal = false;
    CMatrix theta = CMatrix::Zero(r, r);
    ExactMatrix theta_x(r, r);
    if (diagonal) {
      for (int a = 0; a < r; ++a) {
        const auto& e = expr_m[a][a];
        if (auto arg = e.exponent_argument()) {
          theta(a, a) = arg->evaluate(td) / (2 * std::numbers::pi);
          auto xa = arg->evaluate_exact(t);
          auto scaled = xa ? expr::PiPoly::divide(*xa, expr::PiPoly(GaussRational(2), 1)) : std::nullopt;
          auto v = scaled ? scaled->pi_free() : std::nullopt;
          if (v) theta_x.set(a, a, *v);
          else exact = false;
        } else {
          theta(a, a) = std::log(m(a, a)) / (2 * std::numbers::pi);
          auto v = e.evaluate_exact(t);
          auto one = v ? v->pi_free() : std::nullopt;
          if (!(one && *one == GaussRational(1))) exact = false;
        }
        for (int c = 0; c < r; ++c) {
          if (c == a) continue;
          auto z = expr_m[a][c].evaluate_exact(t);
          if (!z || !z->is_zero()) exact = false;
        }
      }
    } else {
      f.diagonal_logs = false;
      exact = false;
      theta = m.log() / (2 * std::numbers::pi);
    }
    CMatrix back = (2 * std::numbers::pi * theta).exp();
    if (max_abs(back - m) > 1e-9 * std::max(1.0, max_abs(m)))
      throw HodgeError("could not take a logarithm of monodromy " + std::to_string(j + 1));
    if (max_abs(theta.adjoint() * f.eta + f.eta * theta) > 1e-9 * std::max(1.0, max_abs(f.eta)))
      throw HodgeError("logarithm of monodromy " + std::to_string(j + 1) + " does not preserve eta");
    f.theta.push_back(theta);
    f.theta_exact.push_back(theta_x);
  }
  for (int j = 0; j < b.n; ++j)
    for (int k = j + 1; k < b.n; ++k) {
      if (max_abs(f.monodromy[j] * f.monodromy[k] - f.monodromy[k] * f.monodromy[j]) > kStructureTolerance)
        throw HodgeError("monodromies do not commute");
      if (max_abs(f.theta[j] * f.theta[k] - f.theta[k] * f.theta[j]) > 1e-9)
        throw HodgeError("monodromy logarithms do not commute");
    }

  f.exact = exact;
  if (exact) {
    std::vector<GaussRational> hd;
    std::vector<GaussRational> sd;
    for (int a = 0; a < r; ++a) {
      const Rational v = eta_exact->at(a, a).re();
      hd.emplace_back(Rational(abs(v)));
      sd.emplace_back(sgn(v) > 0 ? 1L : -1L);
    }
    f.h_exact = ExactMatrix::diagonal(hd);
    f.sigma_exact = ExactMatrix::diagonal(sd);
    f.h = to_dense_complex(f.h_exact);
    f.sigma = to_dense_complex(f.sigma_exact);
  } else {
    auto pair = clifford::compatible_pair(f.eta, h0);
    f.h = pair.h;
    f.sigma = pair.sigma;
  }
  return f;
}

// ------------------------------------------------------------ assembly

namespace detail {

template <class T>
T unit_i();
template <>
inline GaussRational unit_i<GaussRational>() {
  return GaussRational::i();
}
template <>
inline Complex unit_i<Complex>() {
  return {0.0, 1.0};
}

template <class T>
SparseMatrix<T> lift(const ExactMatrix& m);
template <>
inline ExactMatrix lift<GaussRational>(const ExactMatrix& m) {
  return m;
}
template <>
inline ComplexSparse lift<Complex>(const ExactMatrix& m) {
  return to_complex(m);
}

/// D_V / (2 pi) on the Fourier mode k.
template <class T>
SparseMatrix<T> mode_block(int n, const std::vector<int>& k, const std::vector<SparseMatrix<T>>& theta,
                           const SparseMatrix<T>& h, const SparseMatrix<T>& h_inv) {
  const auto r = h.rows();
  const auto dim = clifford::exterior_size(n) * r;
  const auto id = SparseMatrix<T>::identity(r);
  SparseMatrix<T> out(dim, dim);
  for (int j = 0; j < n; ++j) {
    SparseMatrix<T> b = theta[j] + (unit_i<T>() * T(static_cast<long>(k[j]))) * id;
    SparseMatrix<T> b_adj = h_inv * b.adjoint() * h;
    out += kron(lift<T>(clifford::ext(n, j)), b);
    out += kron(lift<T>(clifford::interior(n, j)), b_adj);
  }
  return out;
}

inline ExactMatrix exact_diagonal_inverse(const ExactMatrix& d) {
  ExactMatrix out(d.rows(), d.cols());
  for (std::size_t a = 0; a < d.rows(); ++a) {
    auto v = d.at(a, a);
    if (v.is_zero()) throw HodgeError("metric is singular");
    out.set(a, a, GaussRational(1) / v);
  }
  return out;
}

}  // namespace detail

/// Frequencies k in {-N..N}^n in lexicographic order.
inline std::vector<std::vector<int>> frequency_window(int n, int cutoff) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, -cutoff);
  for (;;) {
    out.push_back(k);
    int j = n - 1;
    while (j >= 0 && k[j] == cutoff) {
      k[j] = -cutoff;
      --j;
    }
    if (j < 0) break;
    ++k[j];
  }
  return out;
}

inline std::optional<std::size_t> frequency_index(const std::vector<int>& k, int cutoff) {
  std::size_t idx = 0;
  for (int v : k) {
    if (v < -cutoff || v > cutoff) return std::nullopt;
    idx = idx * (2 * cutoff + 1) + static_cast<std::size_t>(v + cutoff);
  }
  return idx;
}

/// Finite truncation of D_V; block m acts on Fourier mode modes[m].
struct TruncatedOperator {
  int n = 0;
  int r = 0;
  int cutoff = 0;
  Rational t;
  std::vector<std::vector<int>> modes;
  std::vector<CMatrix> blocks;  // D_V including the factor 2 pi
  CMatrix iota;                 // iota (x) 1
  CMatrix tau;                  // tau (x) sigma
  CMatrix metric;               // 1 (x) h
  CMatrix chol;                 // 1 (x) L, metric = chol chol^*
  CMatrix chol_inv_adj;         // chol^{-*}
  std::vector<int> degree;      // form degree of each basis vector of a block
  std::optional<std::vector<ExactMatrix>> exact_blocks;  // D_V / (2 pi)
  std::optional<ExactMatrix> exact_iota;
  std::optional<ExactMatrix> exact_tau;
  std::optional<ExactMatrix> exact_metric;

  std::size_t block_dim() const { return degree.size(); }
  std::size_t dim() const { return blocks.size() * block_dim(); }

  /// chol^* X chol^{-*}: hermitian whenever X is metric-self-adjoint.
  CMatrix hermitian(const CMatrix& x) const { return chol.adjoint() * x * chol_inv_adj; }
  CMatrix hermitian_block(std::size_t m) const { return hermitian(blocks[m]); }

  std::vector<std::size_t> indices_of_degree(int p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < degree.size(); ++i)
      if (degree[i] == p) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> even_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < degree.size(); ++i)
      if (degree[i] % 2 == 0) out.push_back(i);
    return out;
  }

  /// The whole operator as one sparse matrix.
  ComplexSparse full_matrix() const {
    const auto bd = block_dim();
    ComplexSparse out(dim(), dim());
    for (std::size_t m = 0; m < blocks.size(); ++m)
      for (std::size_t i = 0; i < bd; ++i)
        for (std::size_t j = 0; j < bd; ++j)
          if (blocks[m](i, j) != Complex(0)) out.set(m * bd + i, m * bd + j, blocks[m](i, j));
    return out;
  }
};

inline TruncatedOperator assemble(const FiberData& f, int cutoff) {
  if (cutoff < 1) throw HodgeError("cutoff must be >= 1");
  TruncatedOperator op;
  op.n = f.n;
  op.r = f.r;
  op.cutoff = cutoff;
  op.t = f.t;
  op.modes = frequency_window(f.n, cutoff);
  const auto ext_dim = clifford::exterior_size(f.n);
  for (std::size_t s = 0; s < ext_dim; ++s)
    for (int a = 0; a < f.r; ++a) op.degree.push_back(clifford::form_degree(s));

  const CMatrix id_forms = CMatrix::Identity(ext_dim, ext_dim);
  auto kron_dense = [](const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  op.iota = kron_dense(to_dense_complex(clifford::parity_grading(f.n)), CMatrix::Identity(f.r, f.r));
  op.tau = kron_dense(to_dense_complex(clifford::tau(f.n)), f.sigma);
  op.metric = kron_dense(id_forms, f.h);
  Eigen::LLT<CMatrix> llt(f.h);
  if (llt.info() != Eigen::Success) throw HodgeError("metric is not positive definite");
  const CMatrix l = llt.matrixL();
  op.chol = kron_dense(id_forms, l);
  op.chol_inv_adj = kron_dense(id_forms, CMatrix(l.inverse().adjoint()));

  const double two_pi = 2 * std::numbers::pi;
  if (f.exact) {
    std::vector<ExactMatrix> theta(f.theta_exact.begin(), f.theta_exact.end());
    auto h_inv = detail::exact_diagonal_inverse(f.h_exact);
    std::vector<ExactMatrix> exact_blocks;
    exact_blocks.reserve(op.modes.size());
    for (const auto& k : op.modes) {
      exact_blocks.push_back(detail::mode_block<GaussRational>(f.n, k, theta, f.h_exact, h_inv));
      op.blocks.push_back(two_pi * to_dense_complex(exact_blocks.back()));
    }
    op.exact_blocks = std::move(exact_blocks);
    op.exact_iota = kron(clifford::parity_grading(f.n), ExactMatrix::identity(f.r));
    op.exact_tau = kron(clifford::tau(f.n), f.sigma_exact);
    op.exact_metric = kron(ExactMatrix::identity(ext_dim), f.h_exact);
  } else {
    std::vector<ComplexSparse> theta;
    for (const auto& th : f.theta) theta.push_back(to_sparse(th));
    auto h = to_sparse(f.h);
    auto h_inv = to_sparse(CMatrix(f.h.inverse()));
    for (const auto& k : op.modes)
      op.blocks.push_back(two_pi * to_dense_complex(detail::mode_block<Complex>(f.n, k, theta, h, h_inv)));
  }
  return op;
}

inline TruncatedOperator assemble(const MonodromyBundle& b, const Rational& t, int cutoff) {
  return assemble(fiber_data(b, t), cutoff);
}

// ------------------------------------------------------------ contracts

struct ContractCheck {
  std::string name;
  std::string formula;
  bool exact = false;
  bool holds = false;
  double residual = 0;
  std::string detail;
};

/// D iota + iota D = 0, metric-self-adjointness, D tau = (-1)^{n+1} tau D and
/// the involution relations, exactly when exact data exists.
inline std::vector<ContractCheck> verify_contracts(const TruncatedOperator& op, double tol = kStructureTolerance) {
  std::vector<ContractCheck> out;
  const int sign_tau = minus_one_pow(op.n + 1);
  const std::string tau_formula = "D tau_V = (-1)^{n+1} tau_V D";
  if (op.exact_blocks) {
    const auto& io = *op.exact_iota;
    const auto& ta = *op.exact_tau;
    const auto& h = *op.exact_metric;
    const auto id = ExactMatrix::identity(io.rows());
    auto push = [&](std::string name, std::string formula, const ExactMatrix& a, const ExactMatrix& b) {
      auto mm = first_mismatch(a, b);
      out.push_back({std::move(name), std::move(formula), true, !mm.has_value(), 0, mm ? mm->describe() : ""});
      return !mm.has_value();
    };
    push("iota-involution", "iota_V^2 = 1", io * io, id);
    push("tau-involution", "tau_V^2 = 1", ta * ta, id);
    push("iota-tau", "iota_V tau_V = (-1)^n tau_V iota_V", io * ta, GaussRational(minus_one_pow(op.n)) * ta * io);
    const std::string names[3] = {"odd-operator", "self-adjoint", "tau-relation"};
    const std::string formulas[3] = {"D iota_V + iota_V D = 0", "h D = D^* h", tau_formula};
    bool ok[3] = {true, true, true};
    std::string detail[3];
    for (std::size_t m = 0; m < op.exact_blocks->size(); ++m) {
      const auto& d = (*op.exact_blocks)[m];
      const ExactMatrix lhs[3] = {d * io + io * d, h * d, d * ta};
      const ExactMatrix rhs[3] = {ExactMatrix(d.rows(), d.cols()), d.adjoint() * h,
                                  GaussRational(sign_tau) * ta * d};
      for (int c = 0; c < 3; ++c) {
        if (!ok[c]) continue;
        auto mm = first_mismatch(lhs[c], rhs[c]);
        if (mm) {
          ok[c] = false;
          std::ostringstream os;
          os << "mode " << m << ", " << mm->describe();
          detail[c] = os.str();
        }
      }
    }
    for (int c = 0; c < 3; ++c) out.push_back({names[c], formulas[c], true, ok[c], 0, detail[c]});
    return out;
  }
  const CMatrix id = CMatrix::Identity(op.iota.rows(), op.iota.cols());
  auto push = [&](std::string name, std::string formula, double residual) {
    out.push_back({std::move(name), std::move(formula), false, residual <= tol, residual, ""});
  };
  push("iota-involution", "iota_V^2 = 1", max_abs(op.iota * op.iota - id));
  push("tau-involution", "tau_V^2 = 1", max_abs(op.tau * op.tau - id));
  push("iota-tau", "iota_V tau_V = (-1)^n tau_V iota_V",
       max_abs(op.iota * op.tau - double(minus_one_pow(op.n)) * op.tau * op.iota));
  double r_odd = 0;
  double r_adj = 0;
  double r_tau = 0;
  for (const auto& d : op.blocks) {
    const double scale = std::max(1.0, max_abs(d));
    r_odd = std::max(r_odd, max_abs(d * op.iota + op.iota * d) / scale);
    r_adj = std::max(r_adj, max_abs(op.metric * d - d.adjoint() * op.metric) / scale);
    r_tau = std::max(r_tau, max_abs(d * op.tau - double(sign_tau) * op.tau * d) / scale);
  }
  push("odd-operator", "D iota_V + iota_V D = 0", r_odd);
  push("self-adjoint", "h D = D^* h", r_adj);
  push("tau-relation", tau_formula, r_tau);
  return out;
}

// ------------------------------------------------------------ spectra and kernels

inline std::vector<double> spectrum(const TruncatedOperator& op) {
  std::vector<double> out;
  out.reserve(op.dim());
  for (std::size_t m = 0; m < op.blocks.size(); ++m) {
    CMatrix a = op.hermitian_block(m);
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
    for (auto v : eig.eigenvalues()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline void classify_small(double value, double tol, std::size_t& count, const std::string& where) {
  const double a = std::abs(value);
  if (a >= tol / 10 && a <= tol * 10) {
    std::ostringstream os;
    os << "indeterminate kernel: singular value " << a << " within a factor 10 of tolerance " << tol << " ("
       << where << ")";
    throw IndeterminateKernel(os.str());
  }
  if (a < tol) ++count;
}

inline CMatrix select_columns(const CMatrix& m, const std::vector<std::size_t>& cols) {
  CMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(c) = m.col(cols[c]);
  return out;
}

inline CMatrix select(const CMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  CMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t c = 0; c < cols.size(); ++c) out(a, c) = m(rows[a], cols[c]);
  return out;
}

}  // namespace detail

/// dim ker D_V intersected with p-forms, for p = 0..n.
inline std::vector<std::size_t> kernel_by_degree(const TruncatedOperator& op, double tol = kDefaultTolerance) {
  std::vector<std::size_t> out(op.n + 1, 0);
  std::vector<std::vector<std::size_t>> cols(op.n + 1);
  for (int p = 0; p <= op.n; ++p) cols[p] = op.indices_of_degree(p);
  for (std::size_t m = 0; m < op.blocks.size(); ++m) {
    CMatrix a = op.hermitian_block(m);
    for (int p = 0; p <= op.n; ++p) {
      Eigen::JacobiSVD<CMatrix> svd(detail::select_columns(a, cols[p]));
      for (auto s : svd.singularValues())
        detail::classify_small(s, tol, out[p], "mode " + std::to_string(m) + ", degree " + std::to_string(p));
    }
  }
  return out;
}

inline std::size_t kernel_dimension(const TruncatedOperator& op, double tol = kDefaultTolerance) {
  std::size_t total = 0;
  for (auto k : kernel_by_degree(op, tol)) total += k;
  return total;
}

/// dim ker^+ - dim ker^- with respect to iota_V.
inline long euler_index(const TruncatedOperator& op, double tol = kDefaultTolerance) {
  auto ks = kernel_by_degree(op, tol);
  long out = 0;
  for (std::size_t p = 0; p < ks.size(); ++p) out += minus_one_pow(static_cast<long>(p)) * static_cast<long>(ks[p]);
  return out;
}

struct EvenSignature {
  long trace_route = 0;  // Tr(tau_V on ker D_V)
  long form_route = 0;   // signature of <., tau_V .> on middle-degree harmonic forms
  bool agree() const { return trace_route == form_route; }
};

inline EvenSignature even_signature_index(const TruncatedOperator& op, double tol = kDefaultTolerance) {
  if (op.n % 2 != 0) throw HodgeError("even_signature_index needs an even-dimensional torus");
  const int mid = op.n / 2;
  const CMatrix tau_h = op.hermitian(op.tau);
  const auto mid_cols = op.indices_of_degree(mid);
  double trace = 0;
  long pos = 0;
  long neg = 0;
  for (std::size_t m = 0; m < op.blocks.size(); ++m) {
    CMatrix a = op.hermitian_block(m);
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      std::size_t before = count;
      detail::classify_small(eig.eigenvalues()(i), tol, count, "mode " + std::to_string(m));
      if (count != before) {
        auto v = eig.eigenvectors().col(i);
        trace += (v.adjoint() * tau_h * v)(0, 0).real();
      }
    }
    Eigen::JacobiSVD<CMatrix> svd(detail::select_columns(a, mid_cols), Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < svd.matrixV().cols(); ++i) {
      double value = i < s.size() ? s(i) : 0.0;
      std::size_t c = 0;
      detail::classify_small(value, tol, c, "mode " + std::to_string(m) + ", middle degree");
      if (c) null_cols.push_back(i);
    }
    if (null_cols.empty()) continue;
    CMatrix y(static_cast<Eigen::Index>(mid_cols.size()), static_cast<Eigen::Index>(null_cols.size()));
    for (std::size_t c = 0; c < null_cols.size(); ++c) y.col(c) = svd.matrixV().col(null_cols[c]);
    CMatrix tau_mid = detail::select(tau_h, mid_cols, mid_cols);
    CMatrix gram = y.adjoint() * tau_mid * y;
    gram = 0.5 * (gram + gram.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> geig(gram, Eigen::EigenvaluesOnly);
    for (auto v : geig.eigenvalues()) {
      if (std::abs(v) < 1e-6) throw HodgeError("degenerate form on middle-degree harmonic forms");
      (v > 0 ? pos : neg) += 1;
    }
  }
  EvenSignature out;
  out.trace_route = std::lround(trace);
  if (std::abs(trace - static_cast<double>(out.trace_route)) > 1e-6)
    throw HodgeError("trace of tau_V on the kernel is not an integer");
  out.form_route = pos - neg;
  return out;
}

/// Spectrum of iota_V tau_V D_V restricted to iota_V = +1 (odd n).
inline std::vector<double> odd_operator_spectrum(const TruncatedOperator& op) {
  if (op.n % 2 != 1) throw HodgeError("odd signature operator needs an odd-dimensional torus");
  const auto even = op.even_indices();
  const CMatrix alpha = op.iota * op.tau;
  std::vector<double> out;
  for (const auto& d : op.blocks) {
    CMatrix a = detail::select(op.hermitian(alpha * d), even, even);
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
    for (auto v : eig.eigenvalues()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct HomotopyReport {
  std::vector<double> s_values;
  std::vector<double> min_abs_eigenvalue;
  double square_residual = 0;  // |(D + i iota tau)^2 - (D^2 + 1)|
  bool invertible_at_end = false;
};

/// The path D_V + s i iota_V tau_V, s in [0, 1] (odd n).
inline HomotopyReport homotopy_surrogate(const TruncatedOperator& op, int steps = 8) {
  if (op.n % 2 != 1) throw HodgeError("homotopy surrogate needs an odd-dimensional torus");
  HomotopyReport rep;
  const CMatrix shift = Complex(0, 1) * op.iota * op.tau;
  const CMatrix id = CMatrix::Identity(op.block_dim(), op.block_dim());
  for (int i = 0; i <= steps; ++i) {
    double s = static_cast<double>(i) / steps;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : op.blocks) {
      CMatrix a = op.hermitian(d + s * shift);
      a = 0.5 * (a + a.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
      best = std::min(best, eig.eigenvalues().cwiseAbs().minCoeff());
      if (i == steps) {
        CMatrix full = d + shift;
        rep.square_residual =
            std::max(rep.square_residual, max_abs(full * full - (d * d + id)) / std::max(1.0, max_abs(d * d)));
      }
    }
    rep.s_values.push_back(s);
    rep.min_abs_eigenvalue.push_back(best);
  }
  rep.invertible_at_end = rep.min_abs_eigenvalue.back() >= 1 - 1e-9;
  return rep;
}

// ------------------------------------------------------------ families

struct FamilyConfig {
  int cutoff = kDefaultCutoff;
  double tol = kDefaultTolerance;
  int grid = kDefaultGrid;
  int max_depth = kDefaultRefinementDepth;
};

inline void validate_family(const MonodromyBundle& b) {
  if (b.globally_flat && b.parameterized())
    throw HodgeError("a globally flat family cannot depend on the parameter");
}

struct LoopCertificate {
  bool verified = false;
  std::vector<std::vector<long>> shifts;  // shifts[a][j]: frequency shift of component a along circle j
  double residual = 0;
  std::size_t compared_modes = 0;
  std::string detail;
};

/// Checks that the operator at t = 1 is conjugate to the one at t = 0 by the
/// gauge transformation exp(2 pi i s_a . x) on component a, mode by mode on
/// the part of the window where both modes are present.
inline LoopCertificate verify_loop(const MonodromyBundle& b, int cutoff) {
  LoopCertificate cert;
  if (!b.parameterized()) {
    fiber_data(b, Rational(0));
    cert.verified = true;
    cert.shifts.assign(b.rank(), std::vector<long>(b.n, 0));
    cert.compared_modes = frequency_window(b.n, cutoff).size();
    return cert;
  }
  auto f0 = fiber_data(b, Rational(0));
  auto f1 = fiber_data(b, Rational(1));
  if (!f0.diagonal_logs || !f1.diagonal_logs) {
    cert.detail = "loop verification requires diagonal monodromies";
    return cert;
  }
  const int r = f0.r;
  if (max_abs(f0.h - f1.h) > 1e-12 || max_abs(f0.sigma - f1.sigma) > 1e-12) {
    cert.detail = "compatible pair differs at the endpoints";
    return cert;
  }
  cert.shifts.assign(r, std::vector<long>(b.n, 0));
  for (int j = 0; j < b.n; ++j)
    for (int a = 0; a < r; ++a) {
      Complex delta = f1.theta[j](a, a) - f0.theta[j](a, a);
      long s = std::lround(delta.imag());
      if (std::abs(delta - Complex(0, static_cast<double>(s))) > 1e-9) {
        cert.detail = "monodromies differ at the endpoints";
        return cert;
      }
      cert.shifts[a][j] = s;
    }
  for (int a = 0; a < r; ++a)
    for (int c = 0; c < r; ++c)
      if (std::abs(f0.h(a, c)) > 1e-14 && cert.shifts[a] != cert.shifts[c]) {
        cert.detail = "metric couples components with different shifts";
        return cert;
      }
  auto op0 = assemble(f0, cutoff);
  auto op1 = assemble(f1, cutoff);
  const auto bd = op0.block_dim();
  for (std::size_t m = 0; m < op1.modes.size(); ++m) {
    bool compared = false;
    for (std::size_t i = 0; i < bd; ++i)
      for (std::size_t c = 0; c < bd; ++c) {
        const int a = static_cast<int>(i % r);
        const int e = static_cast<int>(c % r);
        std::vector<int> target = op1.modes[m];
        for (int j = 0; j < b.n; ++j) target[j] += static_cast<int>(cert.shifts[a][j]);
        auto idx = frequency_index(target, cutoff);
        if (!idx) continue;
        Complex expected = cert.shifts[a] == cert.shifts[e] ? op0.blocks[*idx](i, c) : Complex(0);
        cert.residual = std::max(cert.residual, std::abs(op1.blocks[m](i, c) - expected));
        compared = true;
      }
    if (compared) ++cert.compared_modes;
  }
  cert.verified = cert.compared_modes > 0 && cert.residual < 1e-9;
  if (!cert.verified && cert.detail.empty()) cert.detail = "blocks differ after the frequency shift";
  return cert;
}

struct FlowStep {
  Rational t0;
  Rational t1;
  long crossings_plus = 0;   // with +epsilon
  long crossings_minus = 0;  // with -epsilon
};

struct SpectralFlowResult {
  long flow = 0;
  long flow_plus = 0;
  long flow_minus = 0;
  int cutoff = 0;
  std::size_t evaluations = 0;
  int depth_used = 0;
  std::vector<FlowStep> steps;  // steps with crossings
  LoopCertificate loop;
};

namespace detail {

inline long count_below(const std::vector<double>& spec, double shift) {
  long out = 0;
  for (double v : spec)
    if (v + shift < 0) ++out;
  return out;
}

}  // namespace detail

/// Net number of eigenvalues of the restricted odd signature operator moving
/// from negative to positive as t runs over [0, 1]. Consecutive grid points
/// are refined by halving while eigenvalues within pi of zero move by more
/// than pi/2 between them.
inline SpectralFlowResult spectral_flow(const MonodromyBundle& b, const FamilyConfig& cfg = {}) {
  validate_family(b);
  if (!b.loop) throw HodgeError("spectral flow needs a loop family");
  if (cfg.grid < 1) throw HodgeError("grid must be >= 1");
  SpectralFlowResult res;
  res.cutoff = cfg.cutoff;
  res.loop = verify_loop(b, cfg.cutoff);
  if (!res.loop.verified) throw HodgeError("loop verification failed: " + res.loop.detail);

  std::map<Rational, std::vector<double>> cache;
  auto spec_at = [&](const Rational& t) -> const std::vector<double>& {
    const Rational key = b.parameterized() ? t : Rational(0);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ++res.evaluations;
    return cache.emplace(key, odd_operator_spectrum(assemble(b, key, cfg.cutoff))).first->second;
  };
  const double eps = cfg.tol * 10;
  const double window = std::numbers::pi;
  for (const Rational& t : {Rational(0), Rational(1)}) {
    for (double v : spec_at(t)) {
      if (std::abs(std::abs(v) - eps) < cfg.tol)
        throw HodgeError("perturb endpoints: eigenvalue near the perturbation size at an endpoint");
    }
  }

  struct Interval {
    Rational a;
    Rational b;
    int depth;
  };
  std::vector<Interval> stack;
  for (int i = cfg.grid - 1; i >= 0; --i)
    stack.push_back({Rational(i, cfg.grid), Rational(i + 1, cfg.grid), 0});
  while (!stack.empty()) {
    Interval iv = stack.back();
    stack.pop_back();
    const auto& sa = spec_at(iv.a);
    const auto& sb = spec_at(iv.b);
    if (sa.size() != sb.size()) throw HodgeError("spectrum size changed along the family");
    double displacement = 0;
    for (std::size_t i = 0; i < sa.size(); ++i)
      if (std::min(std::abs(sa[i]), std::abs(sb[i])) <= window)
        displacement = std::max(displacement, std::abs(sa[i] - sb[i]));
    if (displacement > window / 2) {
      if (iv.depth >= cfg.max_depth) throw HodgeError("spectral flow refinement budget exceeded");
      Rational mid = (iv.a + iv.b) / 2;
      mid.canonicalize();
      stack.push_back({mid, iv.b, iv.depth + 1});
      stack.push_back({iv.a, mid, iv.depth + 1});
      res.depth_used = std::max(res.depth_used, iv.depth + 1);
      continue;
    }
    FlowStep step{iv.a, iv.b, detail::count_below(sa, eps) - detail::count_below(sb, eps),
                  detail::count_below(sa, -eps) - detail::count_below(sb, -eps)};
    res.flow_plus += step.crossings_plus;
    res.flow_minus += step.crossings_minus;
    if (step.crossings_plus != 0 || step.crossings_minus != 0) res.steps.push_back(step);
  }
  if (res.flow_plus != res.flow_minus)
    throw HodgeError("perturb endpoints: flows with +epsilon and -epsilon differ (" + std::to_string(res.flow_plus) +
                     " vs " + std::to_string(res.flow_minus) + ")");
  res.flow = res.flow_plus;
  return res;
}

struct KernelProfile {
  std::vector<Rational> t;
  std::vector<long> kernel;  // -1 where indeterminate
  bool constant = false;
  std::size_t indeterminate = 0;
};

inline KernelProfile kernel_constancy_report(const MonodromyBundle& b, const FamilyConfig& cfg = {}) {
  validate_family(b);
  KernelProfile out;
  std::optional<long> fixed;  // the operator of a constant family
  for (int i = 0; i <= cfg.grid; ++i) {
    Rational t(i, cfg.grid);
    t.canonicalize();
    out.t.push_back(t);
    if (fixed) {
      out.kernel.push_back(*fixed);
      if (*fixed < 0) ++out.indeterminate;
      continue;
    }
    try {
      out.kernel.push_back(static_cast<long>(kernel_dimension(assemble(b, t, cfg.cutoff), cfg.tol)));
    } catch (const IndeterminateKernel&) {
      out.kernel.push_back(-1);
      ++out.indeterminate;
    }
    if (!b.parameterized()) fixed = out.kernel.back();
  }
  out.constant = out.indeterminate == 0 &&
                 std::all_of(out.kernel.begin(), out.kernel.end(), [&](long k) { return k == out.kernel.front(); });
  return out;
}

// ------------------------------------------------------------ shipped bundles

inline MonodromyBundle lusztig_family(int winding = 1) {
  MonodromyBundle b;
  b.name = winding == 1 ? "lusztig" : "lusztig-winding-" + std::to_string(winding);
  b.n = 1;
  b.p = 1;
  b.q = 0;
  b.eta = expr_matrix({{"1"}});
  b.monodromies = {expr_matrix({{"exp(2*pi*i*" + std::to_string(winding) + "*t)"}})};
  b.loop = true;
  return b;
}

/// Lusztig's line with the angle t + delta sin(2 pi t).
inline MonodromyBundle perturbed_lusztig_family(const std::string& delta = "1/10") {
  MonodromyBundle b = lusztig_family();
  b.name = "lusztig-perturbed";
  b.monodromies = {expr_matrix({{"exp(2*pi*i*(t + (" + delta + ")*sin(2*pi*t)))"}})};
  return b;
}

/// Lusztig's line plus its inverse twist, with the second summand negative
/// (definite = false) or positive for eta.
inline MonodromyBundle lusztig_with_inverse_family(bool definite = false) {
  MonodromyBundle b;
  b.name = definite ? "lusztig-with-inverse-definite" : "lusztig-with-inverse";
  b.n = 1;
  b.p = definite ? 2 : 1;
  b.q = definite ? 0 : 1;
  b.eta = definite ? diagonal_expr({"1", "1"}) : diagonal_expr({"1", "-1"});
  b.monodromies = {diagonal_expr({"exp(2*pi*i*t)", "exp(-2*pi*i*t)"})};
  b.loop = true;
  return b;
}

inline MonodromyBundle trivial_circle_family() {
  MonodromyBundle b;
  b.name = "trivial-circle";
  b.n = 1;
  b.eta = expr_matrix({{"1"}});
  b.monodromies = {expr_matrix({{"1"}})};
  b.loop = true;
  b.globally_flat = true;
  return b;
}

/// Constant (1,1) bundle on S^1 with monodromy diag(w, w^{-1}), w = e^{2 pi i / 3}.
inline MonodromyBundle flat_pair_circle_family() {
  MonodromyBundle b;
  b.name = "flat-pair-circle";
  b.n = 1;
  b.p = 1;
  b.q = 1;
  b.eta = diagonal_expr({"1", "-1"});
  b.monodromies = {diagonal_expr({"exp(2*pi*i/3)", "exp(-2*pi*i/3)"})};
  b.loop = true;
  b.globally_flat = true;
  return b;
}

/// Constant rank-2 bundle on S^1 preserving diag(1,-1) with a non-diagonal
/// hyperbolic monodromy and a non-standard background metric.
inline MonodromyBundle hyperbolic_circle_family() {
  MonodromyBundle b;
  b.name = "hyperbolic-circle";
  b.n = 1;
  b.p = 1;
  b.q = 1;
  b.eta = diagonal_expr({"1", "-1"});
  b.h0 = expr_matrix({{"2", "1/2"}, {"1/2", "1"}});
  // cosh/sinh of 1/2 written through exp.
  b.monodromies = {expr_matrix({{"(exp(1/2)+exp(-1/2))/2", "(exp(1/2)-exp(-1/2))/2"},
                                {"(exp(1/2)-exp(-1/2))/2", "(exp(1/2)+exp(-1/2))/2"}})};
  b.loop = true;
  b.globally_flat = true;
  return b;
}

inline MonodromyBundle trivial_torus_line(int n) {
  MonodromyBundle b;
  b.name = "trivial-line-T" + std::to_string(n);
  b.n = n;
  b.eta = expr_matrix({{"1"}});
  for (int j = 0; j < n; ++j) b.monodromies.push_back(expr_matrix({{"1"}}));
  b.globally_flat = true;
  return b;
}

/// Constant (1,1) bundle on T^2 with monodromies diag(w_j, w_j^{-1}).
inline MonodromyBundle flat_pair_torus() {
  MonodromyBundle b;
  b.name = "flat-pair-T2";
  b.n = 2;
  b.p = 1;
  b.q = 1;
  b.eta = diagonal_expr({"1", "-1"});
  b.monodromies = {diagonal_expr({"exp(2*pi*i/3)", "exp(-2*pi*i/3)"}), diagonal_expr({"exp(2*pi*i/5)", "exp(-2*pi*i/5)"})};
  b.globally_flat = true;
  return b;
}

/// Fiber T^2 of the exterior square of Lusztig's bundle over the point (t1, t2)
/// of the base torus.
inline MonodromyBundle lusztig_squared_fiber(const Rational& t1, const Rational& t2) {
  MonodromyBundle b;
  b.name = "lusztig-squared-fiber";
  b.n = 2;
  b.eta = expr_matrix({{"1"}});
  b.monodromies = {expr_matrix({{"exp(2*pi*i*(" + t1.get_str() + "))"}}),
                   expr_matrix({{"exp(2*pi*i*(" + t2.get_str() + "))"}})};
  return b;
}

}  // namespace tautsig::hodge
